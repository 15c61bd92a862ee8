#pragma once

// Shooting solver for the model eigenvalue problems, integrated in the
// divergence form with the weighted flux Q = w |phi'|^{p-2} phi':
//     phi' = sign(Q) |Q / w|^{1/(p-1)},   Q' = -mu w |phi|^{p-2} phi.
// The flux formulation has no degeneracy at critical points of phi, so the
// Neumann endpoint (flux zero) is an ordinary event; the divergence form in
// addition has no growing homogeneous mode, so error is not amplified where
// the weight gets small.

#include <optional>
#include <vector>

#include "eigenbound/detail/dopri5.hpp"
#include "eigenbound/model.hpp"

namespace eigenbound::shoot {

struct Sample {
    double s;
    double phi;
    double q; // flux |phi'|^{p-2} phi'
};

enum class Terminal {
    ReachedEnd, // q positive up to the working endpoint
    FluxZero,   // q crossed zero at terminal_s
};

struct Trajectory {
    std::vector<Sample> samples; // uniform grid from 0 to terminal_s
    Terminal terminal = Terminal::ReachedEnd;
    double terminal_s = 0;

    /// Dense evaluation of (phi, q) anywhere in [0, terminal_s].
    Sample eval(double s) const;

    // accepted steps with dense output of (phi, w*q), plus the problem that
    // converts the weighted flux back
    detail::Integration dense;
    model::ModelProblem problem;
};

struct EigenResult {
    double eigenvalue = 0;
    Trajectory certificate;
    struct Diagnostics {
        double bracket_lo = 0;
        double bracket_hi = 0;
        int bisections = 0;
        int integrations = 0;
        double terminal_flux = 0; // |q| at the working endpoint
    } diagnostics;
};

/// Integrate the flux system from (s, phi, q) = (0, 0, 1) under trial mu,
/// stopping at the working endpoint or at the first zero of q (located on
/// the dense output).  The working endpoint clips the last 1e-9 relative
/// sliver of the interval, and for profiles whose weight vanishes exactly at
/// the endpoint it backs off to where the omitted tail mass becomes
/// negligible: past that point the flux carries no resolvable information,
/// while the cut shifts the eigenvalue by less than the solver tolerances.
Trajectory integrate(const model::ModelProblem& problem, double mu);

/// Location of the first flux zero under trial mu, if it occurs before the
/// working endpoint.
std::optional<double> first_flux_zero(const model::ModelProblem& problem, double mu);

/// First eigenvalue: the mu whose flux zero lands exactly on the endpoint,
/// found by doubling/halving from the zero-drift closed-form guess and then
/// bisecting on the event location.  Default rel_tol 1e-9.
EigenResult solve(const model::ModelProblem& problem, double rel_tol = 1e-9);

/// Full-interval Neumann solve on [-L, L] without the symmetry reduction:
/// shoots from both endpoints with Neumann data and matches the
/// Wronskian-type mismatch q_left*phi_right - q_right*phi_left at s = 0.
/// Cross-validates the half-interval reduction used by solve().
EigenResult solve_neumann_full(const model::ModelProblem& problem, double rel_tol = 1e-9);

} // namespace eigenbound::shoot
