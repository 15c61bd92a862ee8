#pragma once

// Embedded Dormand-Prince 5(4) pair for two-component systems, with the
// classical fourth-order continuous extension.  Supports integration in
// either direction, an event function located on the dense output, and an
// optional per-step guard that can veto an accepted step (used to monitor
// exact first integrals).

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "eigenbound/errors.hpp"

namespace eigenbound::detail {

using State2 = std::array<double, 2>;

struct Dopri5Settings {
    double abs_tol = 1e-11;
    double rel_tol = 1e-11;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 4'000'000;
};

/// One accepted step with its dense-output coefficients.
struct DenseStep {
    double s0 = 0;
    double h = 0;
    std::array<State2, 5> rcont{};

    State2 eval(double s) const {
        const double theta = (s - s0) / h;
        const double theta1 = 1.0 - theta;
        State2 y;
        for (int i = 0; i < 2; ++i) {
            y[i] = rcont[0][i] +
                   theta * (rcont[1][i] +
                            theta1 * (rcont[2][i] +
                                      theta * (rcont[3][i] + theta1 * rcont[4][i])));
        }
        return y;
    }
};

struct Integration {
    std::vector<DenseStep> steps;
    double s_begin = 0;
    double s_final = 0;
    State2 y_final{};
    // Set when the event function crossed zero; integration stops there.
    std::optional<double> event_s;

    /// Dense evaluation anywhere between s_begin and s_final.
    State2 eval(double s) const {
        if (steps.empty()) return y_final;
        // binary search for the step containing s (steps ordered in the
        // direction of integration)
        const bool fwd = steps.front().h > 0;
        std::size_t lo = 0, hi = steps.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            const DenseStep& st = steps[mid];
            const double s1 = st.s0 + st.h;
            const bool before = fwd ? (s > s1) : (s < s1);
            if (before)
                lo = mid + 1;
            else
                hi = mid;
        }
        return steps[lo].eval(s);
    }
};

using EventFn = std::function<double(double, const State2&)>;
using StepGuard = std::function<bool(const State2&, const State2&)>;

namespace dp {
// Butcher tableau of DOPRI5(4).
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// e = b(5th) - b(4th), for the embedded error estimate.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights.
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;
} // namespace dp

/// Integrate dy/ds = f(s, y) from s0 to s_end (s_end may be below s0).
/// If `event` is given, stops where it first crosses from > 0 to <= 0; the
/// crossing is located on the dense output to 1e-12 relative in s.
/// If `guard` is given, an error-accepted step may still be rejected (the
/// step is retried at half size).
template <class RHS>
Integration integrate(RHS&& f, double s0, State2 y0, double s_end,
                      const Dopri5Settings& set, const EventFn& event = {},
                      const StepGuard& guard = {}) {
    Integration out;
    out.s_begin = s0;
    out.s_final = s0;
    out.y_final = y0;
    if (s_end == s0) return out;

    const double dir = (s_end > s0) ? 1.0 : -1.0;
    const double span = std::abs(s_end - s0);

    double s = s0;
    State2 y = y0;
    State2 k1 = f(s, y);

    // initial step: conservative guess, the controller adapts quickly
    double h;
    {
        const double yn = std::max(std::abs(y[0]), std::abs(y[1]));
        const double fn = std::max(std::abs(k1[0]), std::abs(k1[1]));
        double guess = 1e-3 * span;
        if (fn > 0) guess = std::min(guess, 0.01 * std::max(yn, 1e-5) / fn);
        h = dir * std::max(std::min(guess, set.max_step), 1e-12 * span);
    }

    bool last_rejected = false;
    double ev_prev = event ? event(s, y) : 1.0;

    for (std::size_t nstep = 0;; ++nstep) {
        if (nstep >= set.max_steps)
            throw StepFailure("step budget exhausted at s=" + std::to_string(s), s);
        if (std::abs(h) < 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(s), 1.0))
            throw StepFailure("step size underflow at s=" + std::to_string(s), s);

        bool final_step = false;
        if ((s + h - s_end) * dir >= 0.0) {
            h = s_end - s;
            final_step = true;
        }

        using namespace dp;
        State2 k2, k3, k4, k5, k6, k7, ynew, yt;

        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * a21 * k1[i];
        k2 = f(s + c2 * h, yt);
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(s + c3 * h, yt);
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(s + c4 * h, yt);
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(s + c5 * h, yt);
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = f(s + h, yt);
        for (int i = 0; i < 2; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = f(s + h, ynew);

        double err = 0;
        for (int i = 0; i < 2; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc =
                set.abs_tol + set.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / 2.0);

        if (!std::isfinite(err) || err > 1.0 ||
            (guard && !guard(y, ynew) && std::abs(h) > 64 * std::numeric_limits<double>::epsilon() *
                                                          std::max(std::abs(s), 1.0))) {
            const double fac = std::isfinite(err) && err > 1.0
                                   ? std::max(0.9 * std::pow(err, -0.2), 0.1)
                                   : 0.5;
            h *= fac;
            last_rejected = true;
            continue;
        }

        // accepted: assemble the dense-output polynomial
        DenseStep st;
        st.s0 = s;
        st.h = h;
        for (int i = 0; i < 2; ++i) {
            const double ydiff = ynew[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            st.rcont[0][i] = y[i];
            st.rcont[1][i] = ydiff;
            st.rcont[2][i] = bspl;
            st.rcont[3][i] = ydiff - h * k7[i] - bspl;
            st.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                  d6 * k6[i] + d7 * k7[i]);
        }
        out.steps.push_back(st);

        const double snew = s + h;

        if (event) {
            const double ev_new = event(snew, ynew);
            if (ev_prev > 0.0 && ev_new <= 0.0) {
                // bisect the dense output for the crossing
                double lo = s, hi = snew;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (event(mid, st.eval(mid)) > 0.0)
                        lo = mid;
                    else
                        hi = mid;
                    if (std::abs(hi - lo) <= 1e-12 * std::max(1.0, std::abs(hi))) break;
                }
                out.event_s = 0.5 * (lo + hi);
                out.s_final = *out.event_s;
                out.y_final = st.eval(*out.event_s);
                return out;
            }
            ev_prev = ev_new;
        }

        s = snew;
        y = ynew;
        k1 = k7; // FSAL
        out.s_final = s;
        out.y_final = y;

        if (final_step) return out;

        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        fac = std::min(fac, last_rejected ? 1.0 : 10.0);
        fac = std::max(fac, 0.2);
        last_rejected = false;
        h *= fac;
        if (std::abs(h) > set.max_step) h = dir * set.max_step;
    }
}

} // namespace eigenbound::detail
