#pragma once

// Discrete weighted Rayleigh-quotient minimizer, used to cross-validate the
// shooting solver.  Shares only the analytic weight evaluation with the rest
// of the library; no ODE integration happens here.

#include <vector>

#include "eigenbound/model.hpp"

namespace eigenbound::oracle {

/// Uniform-mesh discretization of the quotient
///   sum_i w_{i+1/2} |(phi_{i+1}-phi_i)/h|^p h  /  sum_i b_i w_i |phi_i|^p h
/// on [0, end] with phi_0 = 0 fixed and the endpoint free (natural Neumann);
/// b_i are the trapezoid factors.
struct DiscreteProblem {
    int n = 0;    // cells; nodes 0..n
    double h = 0; // cell width
    double p = 2;
    std::vector<double> node_weight; // n+1 values, all positive
    std::vector<double> mid_weight;  // n values, all positive
};

/// Build the discretization of a validated model problem; weights are
/// evaluated analytically at nodes and midpoints.  Requires n >= 16.
DiscreteProblem make_discrete(const model::ModelProblem& problem, int n);

/// The discrete quotient for a nodal vector (size n+1, phi_0 must be 0).
double rayleigh(const DiscreteProblem& dp, const std::vector<double>& phi);

struct MinimizeResult {
    double lambda = 0;
    std::vector<double> phi; // oriented nonnegative, max-norm 1
    int iterations = 0;
};

/// First-eigenvalue minimizer.  p = 2: inverse power iteration on the
/// generalized symmetric tridiagonal problem (Thomas factorization),
/// tolerance 1e-12.  p != 2: preconditioned projected gradient descent with
/// Armijo backtracking, warm-started from the p = 2 minimizer, stopping when
/// the quotient decreases by less than 1e-12 relatively per sweep.
MinimizeResult minimize(const DiscreteProblem& dp, int max_iters = 50000);

/// Values at n/2 and n cells plus the second-order Richardson combination.
struct Estimate {
    double coarse = 0;
    double fine = 0;
    double richardson = 0;
    int n_coarse = 0;
    int n_fine = 0;
    int iterations = 0;
    std::vector<double> phi_fine; // minimizer on the fine mesh
};

Estimate estimate(const model::ModelProblem& problem, int n, int max_iters = 50000);

} // namespace eigenbound::oracle
