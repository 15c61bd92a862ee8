#include "eigenbound/flow.hpp"

#include <cmath>
#include <string>

#include "eigenbound/errors.hpp"

namespace eigenbound::flow {

namespace {

// |x|^e for x >= 0 with the hot-loop exponents special-cased
double pow_mag(double x, double e) {
    if (e == 0.5) return std::sqrt(x);
    if (e == 1.0) return x;
    if (e == 2.0) return x * x;
    if (e == 3.0) return x * x * x;
    return std::pow(x, e);
}

double sign_pow(double x, double e) {
    if (x == 0.0) return 0.0;
    return std::copysign(pow_mag(std::abs(x), e), x);
}

// |F|^{1/(p-1)} with a floor inside the power; the floor only matters at
// bit level, it has no effect at tested scales.  Signed zeros map to zero.
double rate_of(double F, double inv_pm1) {
    if (F == 0.0) return 0.0;
    const double mag = std::max(std::abs(F), 1e-300);
    return std::copysign(pow_mag(mag, inv_pm1), F);
}

int sign_changes(const std::vector<double>& v) {
    int count = 0;
    double last = 0;
    for (double x : v) {
        if (x == 0.0) continue;
        if (last != 0.0 && ((x > 0) != (last > 0))) ++count;
        last = x;
    }
    return count;
}

void impose_bcs(std::vector<double>& v) { v.front() = 0.0; }

// F at every node, reading cached weights; out must have n+1 entries.
void eval_F(const Mesh& mesh, double p, const std::vector<double>& v,
            std::vector<double>& out) {
    const int n = mesh.n;
    const double h = mesh.h;
    const double pm1 = p - 1.0;

    // weighted fluxes at midpoints
    thread_local std::vector<double> wq;
    wq.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        wq[i] = mesh.mid_weight[i] * sign_pow((v[i + 1] - v[i]) / h, pm1);

    out[0] = 0.0; // value pinned at s = 0
    for (int i = 1; i < n; ++i)
        out[i] = (wq[i] - wq[i - 1]) / (h * mesh.node_weight[i]);
    // half cell at the flux endpoint, zero flux on the outer face
    out[n] = -wq[n - 1] / (0.5 * h * mesh.node_weight[n]);
}

} // namespace

std::shared_ptr<const Mesh> make_mesh(const model::ModelProblem& problem, int n) {
    if (n < 8) throw DomainError("make_mesh: requires n >= 8");
    model::require_valid(problem);
    auto mesh = std::make_shared<Mesh>();
    mesh->end = problem.half_length;
    mesh->n = n;
    mesh->h = problem.half_length / n;
    mesh->node_weight.resize(n + 1);
    mesh->mid_weight.resize(n);
    for (int i = 0; i <= n; ++i) mesh->node_weight[i] = model::weight(problem, i * mesh->h);
    for (int i = 0; i < n; ++i)
        mesh->mid_weight[i] = model::weight(problem, (i + 0.5) * mesh->h);
    return mesh;
}

FlowState make_state(const model::ModelProblem& problem, int n,
                     const std::function<double(double)>& initial) {
    FlowState state;
    state.mesh = make_mesh(problem, n);
    state.values.resize(n + 1);
    for (int i = 0; i <= n; ++i) state.values[i] = initial(i * state.mesh->h);
    impose_bcs(state.values);
    return state;
}

std::vector<double> apply_F(const model::ModelProblem& problem, const FlowState& state) {
    std::vector<double> out(state.values.size());
    eval_F(*state.mesh, problem.p, state.values, out);
    return out;
}

double stability_bound(const model::ModelProblem& problem, int n) {
    const double h = problem.half_length / n;
    return 0.2 * std::pow(h, problem.p / (problem.p - 1.0));
}

FlowState step(const model::ModelProblem& problem, const FlowState& state, double dt) {
    const double bound = stability_bound(problem, state.mesh->n);
    if (dt > bound * (1.0 + 1e-12))
        throw DomainError("step: dt=" + std::to_string(dt) + " exceeds the stability bound " +
                          std::to_string(bound));

    const int before = sign_changes(state.values);

    FlowState next;
    next.mesh = state.mesh;
    next.time = state.time + dt;
    next.values = state.values;

    std::vector<double> F(state.values.size());
    eval_F(*state.mesh, problem.p, state.values, F);
    const double inv_pm1 = 1.0 / (problem.p - 1.0);
    // every node except the pinned one; the end node carries a half cell with
    // zero flux on its outer face
    for (int i = 1; i <= state.mesh->n; ++i)
        next.values[i] += dt * rate_of(F[i], inv_pm1);
    impose_bcs(next.values);

    if (sign_changes(next.values) > before)
        throw StabilityError("step: overshoot detected at t=" + std::to_string(next.time));
    return next;
}

double decay_rate(const model::ModelProblem& problem, const FlowState& initial, double T) {
    if (!(T > 0)) throw DomainError("decay_rate: requires T > 0");
    double mx = 0;
    for (double v : initial.values) mx = std::max(mx, std::abs(v));
    if (mx == 0) throw DomainError("decay_rate: initial data is zero");

    const Mesh& mesh = *initial.mesh;
    const double dt = stability_bound(problem, mesh.n);
    const long nsteps = static_cast<long>(std::ceil(T / dt));
    const long sample_every = std::max(1L, nsteps / 4000);
    const double inv_pm1 = 1.0 / (problem.p - 1.0);

    std::vector<double> values = initial.values;
    std::vector<double> F(values.size());
    std::vector<double> ts, lognorms;
    const int before = sign_changes(values);

    for (long k = 0; k < nsteps; ++k) {
        eval_F(mesh, problem.p, values, F);
        for (int i = 1; i <= mesh.n; ++i) values[i] += dt * rate_of(F[i], inv_pm1);
        impose_bcs(values);
        const double t = initial.time + (k + 1) * dt;

        if ((k + 1) % sample_every == 0 || k + 1 == nsteps) {
            if (sign_changes(values) > before)
                throw StabilityError("decay_rate: overshoot detected at t=" +
                                     std::to_string(t));
            double norm = 0;
            for (double v : values) norm = std::max(norm, std::abs(v));
            if (norm < 1e-290) {
                if (t < initial.time + T / 2)
                    throw DomainError("decay_rate: state underflowed before the fit window");
                break;
            }
            if (t >= initial.time + T / 2) {
                ts.push_back(t);
                lognorms.push_back(std::log(norm));
            }
        }
    }
    if (ts.size() < 2) throw DomainError("decay_rate: not enough samples in the fit window");

    // least-squares slope
    const double m = static_cast<double>(ts.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += lognorms[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * lognorms[i];
    }
    const double slope = (m * stl - st * sl) / (m * stt - st * st);
    return -slope;
}

} // namespace eigenbound::flow
