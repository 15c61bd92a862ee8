#include "eigenbound/shoot.hpp"

#include <cmath>
#include <string>

#include "eigenbound/compfun.hpp"
#include "eigenbound/errors.hpp"

namespace eigenbound::shoot {

namespace {

constexpr double kEndClip = 1e-9;     // relative clearance from the endpoint
constexpr double kDegenerate = 1e-4;  // endpoint weight below this counts as a zero
constexpr double kTailMass = 3e-8;    // omitted tail weight-mass per unit length
constexpr int kSampleCount = 257;     // dense grid attached to a trajectory
constexpr int kMaxExpansions = 60;    // bracket growth budget, 2^60 x guess

double sign_pow(double x, double e) {
    if (x == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(x), e), x);
}

// The shot is integrated in divergence form, with the weighted flux
// Q = w |phi'|^{p-2} phi' as the second state:
//     phi' = sign(Q) |Q / w|^{1/(p-1)},   Q' = -mu w |phi|^{p-2} phi.
// Unlike the drift form q' = drift*q - ..., this has no growing homogeneous
// mode, so integration error is not amplified where the weight gets small.
// Since w(0) = 1 the initial data (phi, Q) = (0, 1) matches the flux
// normalization, and Q vanishes exactly where the flux does.
struct DivergenceSystem {
    const model::ModelProblem* problem;
    double mu;
    double flux_exp; // 1/(p-1)
    double pm1;      // p-1

    detail::State2 operator()(double s, const detail::State2& y) const {
        const double w = model::weight(*problem, s);
        return {sign_pow(y[1] / w, flux_exp), -mu * w * sign_pow(y[0], pm1)};
    }
};

detail::Integration run(const model::ModelProblem& problem, double mu, double s_from,
                        detail::State2 y_from, double s_to, bool stop_at_flux_zero,
                        double step_cap_fraction = 1.0 / 64.0) {
    DivergenceSystem rhs{&problem, mu, 1.0 / (problem.p - 1.0), problem.p - 1.0};
    detail::Dopri5Settings settings;
    // a step cap keeps the dense-output interpolant well below the tolerance
    // of the pair, so residual checks can difference it; certificates use a
    // finer cap than bracketing shots
    settings.max_step = std::abs(s_to - s_from) * step_cap_fraction;
    detail::EventFn event;
    if (stop_at_flux_zero)
        event = [](double, const detail::State2& y) { return y[1]; };
    return detail::integrate(rhs, s_from, y_from, s_to, settings, event);
}

constexpr double kCertificateStepCap = 1.0 / 256.0;

Trajectory make_trajectory(const model::ModelProblem& problem, detail::Integration run_result) {
    Trajectory traj;
    traj.problem = problem;
    traj.dense = std::move(run_result);
    // a backward-integrated certificate begins at the far end
    traj.terminal_s = std::max(traj.dense.s_begin, traj.dense.s_final);
    traj.terminal = traj.dense.event_s ? Terminal::FluxZero : Terminal::ReachedEnd;
    traj.samples.reserve(kSampleCount);
    for (int i = 0; i < kSampleCount; ++i) {
        const double s = traj.terminal_s * i / (kSampleCount - 1);
        traj.samples.push_back(traj.eval(s));
    }
    return traj;
}

// Working endpoint of the shot.  Regular problems clip the last 1e-9
// relative sliver.  When the weight vanishes at the endpoint, the stop backs
// off to where the omitted tail mass (end - s) * w(s) ~ kTailMass * end:
// the cut shifts the eigenvalue by O(tail mass / total mass) while keeping
// the flux away from the fully degenerate point.
struct StopPoint {
    double s;
    bool degenerate; // endpoint weight effectively vanishes
};

StopPoint integration_stop(const model::ModelProblem& problem) {
    const double end = problem.half_length * (1.0 - kEndClip);
    if (model::weight(problem, end) >= kDegenerate) return {end, false};
    const double target = kTailMass * problem.half_length;
    double lo = 0.0, hi = 0.5 * end;
    for (int i = 0; i < 100; ++i) {
        const double delta = 0.5 * (lo + hi);
        if (delta * model::weight(problem, end - delta) < target)
            lo = delta;
        else
            hi = delta;
    }
    return {end - 0.5 * (lo + hi), true};
}

struct Shot {
    bool event;     // flux zero strictly before the endpoint
    double residual; // |q| at the stopping point
};

Shot shoot_once(const model::ModelProblem& problem, double mu, double s_stop,
                int& integrations) {
    ++integrations;
    const auto res = run(problem, mu, 0.0, {0.0, 1.0}, s_stop, true);
    return {res.event_s.has_value(), std::abs(res.y_final[1])};
}

double initial_guess(const model::ModelProblem& problem) {
    // zero-drift closed form; right order of magnitude for all desk-scale drifts
    const double p = problem.p;
    return (p - 1.0) * std::pow(compfun::pi_p(p) / (2.0 * problem.half_length), p);
}

} // namespace

Sample Trajectory::eval(double s) const {
    if (s == 0.0) return {0.0, 0.0, 1.0};
    const auto y = dense.eval(s);
    // the dense state carries the weighted flux
    return {s, y[0], y[1] / model::weight(problem, s)};
}

Trajectory integrate(const model::ModelProblem& problem, double mu) {
    model::require_valid(problem);
    if (!(mu > 0)) throw DomainError("integrate: requires mu > 0");
    return make_trajectory(
        problem, run(problem, mu, 0.0, {0.0, 1.0}, integration_stop(problem).s, true));
}

std::optional<double> first_flux_zero(const model::ModelProblem& problem, double mu) {
    model::require_valid(problem);
    if (!(mu > 0)) throw DomainError("first_flux_zero: requires mu > 0");
    const auto res = run(problem, mu, 0.0, {0.0, 1.0}, integration_stop(problem).s, true);
    return res.event_s;
}

EigenResult solve(const model::ModelProblem& problem, double rel_tol) {
    model::require_valid(problem);
    if (!(rel_tol >= 1e-12))
        throw DomainError("solve: rel_tol must be >= 1e-12");

    int integrations = 0;
    const double mu0 = initial_guess(problem);
    const auto stop = integration_stop(problem);
    const double s_stop = stop.s;

    // bracket: lo has no flux zero before the endpoint, hi has one
    double lo, hi;
    if (shoot_once(problem, mu0, s_stop, integrations).event) {
        hi = mu0;
        lo = mu0;
        int k = 0;
        do {
            if (++k > kMaxExpansions)
                throw BracketFailure("solve: no event-free mu above " +
                                     std::to_string(mu0 / (1ULL << 60)));
            hi = lo;
            lo *= 0.5;
        } while (shoot_once(problem, lo, s_stop, integrations).event);
    } else {
        lo = mu0;
        hi = mu0;
        int k = 0;
        do {
            if (++k > kMaxExpansions)
                throw BracketFailure("solve: doubling exceeded 2^60 x initial guess " +
                                     std::to_string(mu0));
            lo = hi;
            hi *= 2.0;
        } while (!shoot_once(problem, hi, s_stop, integrations).event);
    }

    const double bracket_lo = lo, bracket_hi = hi;
    int bisections = 0;
    while (hi - lo > rel_tol * 0.5 * (hi + lo)) {
        const double mid = 0.5 * (lo + hi);
        if (shoot_once(problem, mid, s_stop, integrations).event)
            hi = mid;
        else
            lo = mid;
        ++bisections;
    }

    EigenResult result;
    result.eigenvalue = 0.5 * (lo + hi);
    double residual;
    if (!stop.degenerate) {
        // certificate: integrate at the final mu without event termination so
        // the trajectory reaches the endpoint; q there is the shooting residual
        result.certificate = make_trajectory(
            problem,
            run(problem, result.eigenvalue, 0.0, {0.0, 1.0}, s_stop, false,
                kCertificateStepCap));
        residual = std::abs(result.certificate.dense.y_final[1]);
    } else {
        // Degenerate endpoint: the forward direction amplifies error where the
        // weight vanishes, the backward direction contracts it.  Anchor the
        // certificate at the endpoint with (phi, Q) = (1, 0), integrate down
        // to 0, and rescale by homogeneity to the q(0) = 1 normalization.
        const double end = problem.half_length * (1.0 - kEndClip);
        auto back = run(problem, result.eigenvalue, end, {1.0, 0.0}, 0.0, false,
                        kCertificateStepCap);
        const double q0 = back.y_final[1]; // w(0) = 1
        if (q0 > 0) {
            const double scale_phi = std::pow(q0, -1.0 / (problem.p - 1.0));
            for (auto& st : back.steps)
                for (auto& rc : st.rcont) {
                    rc[0] *= scale_phi;
                    rc[1] /= q0;
                }
            back.y_final[0] *= scale_phi;
            back.y_final[1] = 1.0;
            residual = std::abs(back.y_final[0]); // value mismatch at s = 0
            result.certificate = make_trajectory(problem, std::move(back));
        } else {
            result.certificate = make_trajectory(
                problem,
            run(problem, result.eigenvalue, 0.0, {0.0, 1.0}, s_stop, false,
                kCertificateStepCap));
            residual = std::abs(result.certificate.dense.y_final[1]);
        }
    }
    ++integrations;
    result.diagnostics = {bracket_lo, bracket_hi, bisections, integrations, residual};
    return result;
}

EigenResult solve_neumann_full(const model::ModelProblem& problem, double rel_tol) {
    if (problem.kind != model::BoundaryKind::NeumannPair)
        throw DomainError("solve_neumann_full: requires a Neumann-pair problem");
    model::require_valid(problem);
    if (!(rel_tol >= 1e-12))
        throw DomainError("solve_neumann_full: rel_tol must be >= 1e-12");

    const double a = integration_stop(problem).s;
    int integrations = 0;

    // Wronskian-type mismatch of the two one-sided Neumann shots at s = 0.
    // Positive below the first nonzero eigenvalue, negative just above it.
    const auto mismatch = [&](double mu) {
        ++integrations;
        const auto left = run(problem, mu, -a, {-1.0, 0.0}, 0.0, false);
        const auto right = run(problem, mu, +a, {+1.0, 0.0}, 0.0, false);
        const double phi_l = left.y_final[0], q_l = left.y_final[1];
        const double phi_r = right.y_final[0], q_r = right.y_final[1];
        return q_l * phi_r - q_r * phi_l;
    };

    const double mu0 = initial_guess(problem);
    double lo, hi;
    if (mismatch(mu0) > 0) {
        lo = mu0;
        hi = mu0;
        int k = 0;
        do {
            if (++k > kMaxExpansions)
                throw BracketFailure("solve_neumann_full: doubling exceeded 2^60 x guess " +
                                     std::to_string(mu0));
            lo = hi;
            hi *= 2.0;
        } while (mismatch(hi) > 0);
    } else {
        hi = mu0;
        lo = mu0;
        int k = 0;
        do {
            if (++k > kMaxExpansions)
                throw BracketFailure("solve_neumann_full: halving exhausted below guess " +
                                     std::to_string(mu0));
            hi = lo;
            lo *= 0.5;
        } while (mismatch(lo) <= 0);
    }

    const double bracket_lo = lo, bracket_hi = hi;
    int bisections = 0;
    while (hi - lo > rel_tol * 0.5 * (hi + lo)) {
        const double mid = 0.5 * (lo + hi);
        if (mismatch(mid) > 0)
            lo = mid;
        else
            hi = mid;
        ++bisections;
    }

    EigenResult result;
    result.eigenvalue = 0.5 * (lo + hi);
    // certificate on the reduced half interval, comparable with solve()
    result.certificate = make_trajectory(
        problem, run(problem, result.eigenvalue, 0.0, {0.0, 1.0}, a, false,
                     kCertificateStepCap));
    ++integrations;
    result.diagnostics = {bracket_lo, bracket_hi, bisections, integrations,
                          std::abs(result.certificate.dense.y_final[1])};
    return result;
}

} // namespace eigenbound::shoot
