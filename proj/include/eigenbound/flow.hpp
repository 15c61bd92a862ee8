#pragma once

// Explicit integrator for the 1-D degenerate flow
//     phi_t = sign(F phi) |F phi|^{1/(p-1)},
// where F is the divergence-form model operator (w q)'/w.  Used to check
// that the computed first eigenvalue governs the exponential decay rate of
// the separable solution.

#include <functional>
#include <memory>
#include <vector>

#include "eigenbound/model.hpp"

namespace eigenbound::flow {

/// Uniform grid on [0, end] with the model weights cached at nodes and
/// midpoints.  Immutable once built; shared between states.
struct Mesh {
    double end = 0;
    int n = 0;
    double h = 0;
    std::vector<double> node_weight; // n+1
    std::vector<double> mid_weight;  // n
};

std::shared_ptr<const Mesh> make_mesh(const model::ModelProblem& problem, int n);

/// Nodal state at one time.  Boundary conditions: value 0 at s = 0; the end
/// node carries a half cell whose outer face has zero flux.
struct FlowState {
    std::shared_ptr<const Mesh> mesh;
    std::vector<double> values; // n+1
    double time = 0;
};

/// Build a state from nodal data given as a function of s; the boundary
/// conditions are imposed on the sampled values.
FlowState make_state(const model::ModelProblem& problem, int n,
                     const std::function<double(double)>& initial);

/// Discrete model operator (w q)'/w with one-sided differences at midpoints;
/// second order in h at interior nodes, first order at the flux endpoint.
std::vector<double> apply_F(const model::ModelProblem& problem, const FlowState& state);

/// Largest admissible explicit step, 0.2 * h^{p/(p-1)}.
double stability_bound(const model::ModelProblem& problem, int n);

/// One forward-Euler step of every node but the pinned one; the boundary
/// conditions are reimposed afterwards.  Throws StabilityError if the update
/// creates a new sign change (overshoot detector) and DomainError if dt
/// exceeds the stability bound.
FlowState step(const model::ModelProblem& problem, const FlowState& state, double dt);

/// Least-squares slope of log max-norm over [T/2, T], returned as a positive
/// decay rate.  Throws DomainError if the norm underflows before T/2.
double decay_rate(const model::ModelProblem& problem, const FlowState& initial, double T);

} // namespace eigenbound::flow
