#pragma once

// Geometry profiles and the 1-D model eigenvalue problems they induce.
// A profile is a list of (multiplicity, curvature) pairs plus an optional
// boundary-convexity parameter; it encodes the drift
//     sum_i a_i * T_{k_i}(s)            (Neumann pair)
//     sum_i a_i * T_{k_i,lambda}(s)     (Dirichlet-Neumann)
// and the dual weight
//     prod_i c_{k_i}(s)^{a_i}    resp.  prod_i C_{k_i,lambda}(s)^{a_i}.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "eigenbound/compfun.hpp"

namespace eigenbound::model {

struct ProfileTerm {
    double multiplicity; // > 0
    double curvature;
};

struct GeometryProfile {
    std::vector<ProfileTerm> terms;
    std::optional<compfun::BoundaryConvexity> boundary;

    double lambda() const { return boundary ? boundary->lambda : 0.0; }
};

enum class BoundaryKind {
    NeumannPair,      // phi'(-L) = phi'(L) = 0 on [-L, L], reduced to [0, L]
    DirichletNeumann, // phi(0) = 0, phi'(R) = 0 on [0, R]
};

struct ModelProblem {
    GeometryProfile profile;
    double p = 2.0;           // exponent, > 1
    double half_length = 1.0; // D/2 for Neumann pairs, R for Dirichlet
    BoundaryKind kind = BoundaryKind::NeumannPair;
};

/// Drift profile of a quaternionic space form comparison:
/// terms [(4(m-1), kappa), (3, 4 kappa)].  Requires m >= 2.
GeometryProfile quaternionic_profile(int m, double kappa);

/// Classical Riemannian comparison drift: terms [(n-1, kappa)].  Requires n >= 2.
GeometryProfile riemannian_profile(int n, double kappa);

/// Drift coefficient at s.  Neumann profiles accept |s| <= half_length,
/// Dirichlet profiles 0 <= s <= half_length.
double drift(const ModelProblem& problem, double s);

/// Dual weight at s; weight(0) = 1.  Throws DomainError if a factor is <= 0.
double weight(const ModelProblem& problem, double s);

/// First interior zero of a weight factor, if any.
struct ValidationIssue {
    std::size_t term_index;
    double curvature;
    double zero_location;
    std::string message;
};

/// Empty result means the weight is strictly positive on [0, half_length);
/// a zero exactly at the endpoint is admissible (the model degenerates there
/// but the problem is still well posed).
std::optional<ValidationIssue> validate(const ModelProblem& problem);

/// validate() that throws ValidationError instead of returning the issue.
void require_valid(const ModelProblem& problem);

} // namespace eigenbound::model
