#include "eigenbound/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "eigenbound/errors.hpp"

namespace eigenbound::model {

namespace {

void check_range(const ModelProblem& problem, double s, const char* who) {
    const double slack = 1e-12 * std::max(problem.half_length, 1.0);
    const double lo = problem.kind == BoundaryKind::NeumannPair ? -problem.half_length : 0.0;
    if (s < lo - slack || s > problem.half_length + slack) {
        std::ostringstream msg;
        msg << who << ": s=" << s << " outside the working interval [" << lo << ", "
            << problem.half_length << "]";
        throw DomainError(msg.str());
    }
}

} // namespace

GeometryProfile quaternionic_profile(int m, double kappa) {
    if (m < 2)
        throw DomainError("quaternionic_profile: requires m >= 2, got m=" + std::to_string(m));
    return {{{4.0 * (m - 1), kappa}, {3.0, 4.0 * kappa}}, std::nullopt};
}

GeometryProfile riemannian_profile(int n, double kappa) {
    if (n < 2)
        throw DomainError("riemannian_profile: requires n >= 2, got n=" + std::to_string(n));
    return {{{static_cast<double>(n - 1), kappa}}, std::nullopt};
}

double drift(const ModelProblem& problem, double s) {
    check_range(problem, s, "drift");
    double sum = 0;
    if (problem.kind == BoundaryKind::NeumannPair) {
        for (const auto& term : problem.profile.terms)
            sum += term.multiplicity * compfun::t_kappa(term.curvature, s);
    } else {
        const double lambda = problem.profile.lambda();
        for (const auto& term : problem.profile.terms)
            sum += term.multiplicity * compfun::t_kl(term.curvature, lambda, s);
    }
    return sum;
}

double weight(const ModelProblem& problem, double s) {
    check_range(problem, s, "weight");
    double prod = 1;
    const bool neumann = problem.kind == BoundaryKind::NeumannPair;
    const double lambda = problem.profile.lambda();
    for (const auto& term : problem.profile.terms) {
        const double factor = neumann ? compfun::c_kappa(term.curvature, s)
                                      : compfun::c_kl(term.curvature, lambda, std::max(s, 0.0));
        if (factor <= 0) {
            std::ostringstream msg;
            msg << "weight: factor with curvature " << term.curvature << " is " << factor
                << " at s=" << s;
            throw DomainError(msg.str());
        }
        prod *= std::pow(factor, term.multiplicity);
    }
    return prod;
}

std::optional<ValidationIssue> validate(const ModelProblem& problem) {
    if (!(problem.p > 1.0))
        throw DomainError("validate: requires p > 1, got p=" + std::to_string(problem.p));
    if (!(problem.half_length > 0))
        throw DomainError("validate: requires a positive interval length");
    if (problem.profile.terms.empty())
        throw DomainError("validate: profile has no terms");
    for (const auto& term : problem.profile.terms)
        if (!(term.multiplicity > 0))
            throw DomainError("validate: multiplicities must be positive");

    const bool neumann = problem.kind == BoundaryKind::NeumannPair;
    const double lambda = problem.profile.lambda();
    const double end = problem.half_length;

    std::optional<ValidationIssue> worst;
    for (std::size_t i = 0; i < problem.profile.terms.size(); ++i) {
        const auto& term = problem.profile.terms[i];
        compfun::FirstZero zero;
        if (neumann) {
            if (term.curvature > 0) {
                const double rk = std::sqrt(term.curvature);
                zero = {true, std::numbers::pi / (2.0 * rk)};
            }
        } else {
            zero = compfun::c_kl_first_zero(term.curvature, lambda);
        }
        if (!zero.exists) continue;
        // a zero exactly at the endpoint is allowed; only interior zeros are singular
        if (zero.location >= end * (1.0 - 1e-12)) continue;
        if (!worst || zero.location < worst->zero_location) {
            std::ostringstream msg;
            msg << "weight factor " << i << " (curvature " << term.curvature;
            if (!neumann) msg << ", boundary convexity " << lambda;
            msg << ") vanishes at s=" << zero.location << ", inside [0, " << end << "]";
            worst = ValidationIssue{i, term.curvature, zero.location, msg.str()};
        }
    }
    return worst;
}

void require_valid(const ModelProblem& problem) {
    if (auto issue = validate(problem))
        throw ValidationError(issue->message, issue->term_index, issue->curvature,
                              issue->zero_location);
}

} // namespace eigenbound::model
