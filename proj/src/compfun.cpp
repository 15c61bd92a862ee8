#include "eigenbound/compfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "eigenbound/detail/dopri5.hpp"
#include "eigenbound/errors.hpp"

namespace eigenbound::compfun {

namespace {

[[noreturn]] void domain_error(const std::string& msg) { throw DomainError(msg); }

double sign_pow(double x, double e) {
    // sign(x) * |x|^e, with pow(0, e>0) = 0
    if (x == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(x), e), x);
}

} // namespace

double t_kappa(double kappa, double t) {
    if (kappa > 0) {
        const double rk = std::sqrt(kappa);
        const double pole = std::numbers::pi / (2.0 * rk);
        if (std::abs(t) > pole * (1.0 - kEpsSing))
            domain_error("t_kappa: t=" + std::to_string(t) +
                         " is inside the clearance of the tangent pole at " +
                         std::to_string(pole));
        return rk * std::tan(rk * t);
    }
    if (kappa == 0) return 0.0;
    const double rk = std::sqrt(-kappa);
    return -rk * std::tanh(rk * t);
}

double c_kappa(double kappa, double t) {
    if (kappa > 0) return std::cos(std::sqrt(kappa) * t);
    if (kappa == 0) return 1.0;
    return std::cosh(std::sqrt(-kappa) * t);
}

double s_kappa(double kappa, double t) {
    if (kappa > 0) {
        const double rk = std::sqrt(kappa);
        return std::sin(rk * t) / rk;
    }
    if (kappa == 0) return t;
    const double rk = std::sqrt(-kappa);
    return std::sinh(rk * t) / rk;
}

double c_kl(double kappa, double lambda, double t) {
    if (t < 0)
        domain_error("c_kl: requires t >= 0, got t=" + std::to_string(t));
    return c_kappa(kappa, t) - lambda * s_kappa(kappa, t);
}

double c_kl_deriv(double kappa, double lambda, double t) {
    if (t < 0)
        domain_error("c_kl_deriv: requires t >= 0, got t=" + std::to_string(t));
    return -kappa * s_kappa(kappa, t) - lambda * c_kappa(kappa, t);
}

double t_kl(double kappa, double lambda, double t) {
    const double c = c_kl(kappa, lambda, t);
    if (c <= kEpsSing)
        domain_error("t_kl: c_kl(" + std::to_string(kappa) + ", " + std::to_string(lambda) +
                     ", " + std::to_string(t) + ") = " + std::to_string(c) +
                     " is inside the zero clearance");
    return -c_kl_deriv(kappa, lambda, t) / c;
}

FirstZero c_kl_first_zero(double kappa, double lambda) {
    if (kappa > 0) {
        const double rk = std::sqrt(kappa);
        // c_kl = cos(x) - (lambda/rk) sin(x) with x = rk*t; first positive
        // zero at x = atan2(rk, lambda) for every sign of lambda.
        return {true, std::atan2(rk, lambda) / rk};
    }
    if (kappa == 0) {
        if (lambda > 0) return {true, 1.0 / lambda};
        return {};
    }
    const double rk = std::sqrt(-kappa);
    if (lambda > rk) return {true, std::atanh(rk / lambda) / rk};
    return {};
}

double pi_p(double p) {
    if (!(p > 1.0))
        domain_error("pi_p: requires p > 1, got p=" + std::to_string(p));
    return 2.0 * std::numbers::pi / (p * std::sin(std::numbers::pi / p));
}

namespace {

// sin_p on the base quarter period [0, half], half = pi_p/2, by integration
// in the flux variable q = |u'|^{p-2} u':
//   u' = sign(q) |q|^{1/(p-1)},   q' = -(p-1) |u|^{p-2} u.
// The invariant |u|^p + |q|^{p/(p-1)} = 1 is an exact first integral; a step
// whose invariant drift exceeds 1e-10 is rejected.
//
// The lower part of the quarter integrates forward from (0, 1).  The upper
// part integrates backward from the maximum (1, 0): recovering u' from q is
// ill conditioned where q -> 0, and anchoring the degenerate point keeps the
// derivative accurate there.
std::pair<double, double> sin_p_base(double p, double half, double t) {
    const double flux_exp = 1.0 / (p - 1.0);
    const auto invariant = [p, flux_exp](const detail::State2& y) {
        return std::pow(std::abs(y[0]), p) + std::pow(std::abs(y[1]), p * flux_exp);
    };
    const auto guard = [&invariant](const detail::State2& a, const detail::State2& b) {
        return std::abs(invariant(b) - invariant(a)) <= 1e-10;
    };

    detail::State2 y;
    if (t <= 0.5 * half) {
        const auto rhs = [p, flux_exp](double, const detail::State2& v) -> detail::State2 {
            return {sign_pow(v[1], flux_exp), -(p - 1.0) * sign_pow(v[0], p - 1.0)};
        };
        y = detail::integrate(rhs, 0.0, {0.0, 1.0}, t, detail::Dopri5Settings{},
                              /*event=*/{}, guard)
                .y_final;
    } else {
        // state (u, q) at t = half - tau, integrated in tau
        const auto rhs = [p, flux_exp](double, const detail::State2& v) -> detail::State2 {
            return {-sign_pow(v[1], flux_exp), (p - 1.0) * sign_pow(v[0], p - 1.0)};
        };
        y = detail::integrate(rhs, 0.0, {1.0, 0.0}, half - t, detail::Dopri5Settings{},
                              /*event=*/{}, guard)
                .y_final;
    }
    return {y[0], sign_pow(y[1], flux_exp)};
}

} // namespace

double sin_p_quarter_period(double p) {
    const double fe = 1.0 / (p - 1.0);
    const auto rhs = [p, fe](double, const detail::State2& v) -> detail::State2 {
        return {sign_pow(v[1], fe), -(p - 1.0) * sign_pow(v[0], p - 1.0)};
    };
    const auto event = [](double, const detail::State2& v) { return v[1]; };
    // the formula value only bounds the integration range
    const double limit = 1.5 * pi_p(p) / 2.0;
    const auto run =
        detail::integrate(rhs, 0.0, {0.0, 1.0}, limit, detail::Dopri5Settings{}, event);
    if (!run.event_s)
        throw StepFailure("sin_p_quarter_period: no flux zero found", run.s_final);
    return *run.event_s;
}

std::pair<double, double> sin_p(double p, double t) {
    const double half = pi_p(p) / 2.0; // validates p > 1
    const double period = 4.0 * half;

    // reduce to the base quarter period: oddness (derivative is even),
    // half-period antisymmetry, reflection about the quarter point
    double vsign = 1.0, dsign = 1.0;
    if (t < 0) {
        t = -t;
        vsign = -vsign;
    }
    double r = std::fmod(t, period);
    if (r >= 2.0 * half) {
        r -= 2.0 * half;
        vsign = -vsign;
        dsign = -dsign;
    }
    if (r > half) {
        r = 2.0 * half - r;
        dsign = -dsign;
    }

    auto [u, du] = sin_p_base(p, half, r);
    return {vsign * u, dsign * du};
}

} // namespace eigenbound::compfun
