#include "eigenbound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "eigenbound/errors.hpp"

namespace eigenbound::oracle {

namespace {

double sign_pow(double x, double e) {
    if (x == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(x), e), x);
}

// Thomas factorization of a tridiagonal system, no pivoting (all our
// matrices are symmetric positive definite).
struct Tridiag {
    std::vector<double> lower, diag, upper; // sizes n-1, n, n-1
    std::vector<double> fdiag, flower;      // factorization storage

    void factor() {
        const std::size_t n = diag.size();
        fdiag = diag;
        flower.assign(n > 0 ? n - 1 : 0, 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            const double m = lower[i - 1] / fdiag[i - 1];
            flower[i - 1] = m;
            fdiag[i] -= m * upper[i - 1];
        }
    }

    std::vector<double> solve(std::vector<double> rhs) const {
        const std::size_t n = fdiag.size();
        for (std::size_t i = 1; i < n; ++i) rhs[i] -= flower[i - 1] * rhs[i - 1];
        rhs[n - 1] /= fdiag[n - 1];
        for (std::size_t i = n - 1; i-- > 0;)
            rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / fdiag[i];
        return rhs;
    }
};

// Trapezoid mass factors b_i * h for the unknowns phi_1..phi_n.
std::vector<double> mass_diagonal(const DiscreteProblem& dp) {
    std::vector<double> b(dp.n);
    for (int j = 1; j <= dp.n; ++j)
        b[j - 1] = dp.node_weight[j] * dp.h * (j == dp.n ? 0.5 : 1.0);
    return b;
}

// p = 2 stiffness matrix over the unknowns phi_1..phi_n, with edge
// coefficients coef[i] on cell i (i = 0..n-1).
Tridiag stiffness(const DiscreteProblem& dp, const std::vector<double>& coef) {
    const int n = dp.n;
    Tridiag A;
    A.diag.assign(n, 0.0);
    A.lower.assign(n - 1, 0.0);
    A.upper.assign(n - 1, 0.0);
    for (int j = 1; j <= n; ++j) {
        double d = coef[j - 1] / dp.h;
        if (j < n) d += coef[j] / dp.h;
        A.diag[j - 1] = d;
        if (j < n) A.lower[j - 1] = A.upper[j - 1] = -coef[j] / dp.h;
    }
    return A;
}

void orient_and_normalize(std::vector<double>& x) {
    double mx = 0, at = 0;
    for (double v : x)
        if (std::abs(v) > mx) {
            mx = std::abs(v);
            at = v;
        }
    if (mx == 0) return;
    const double scale = (at < 0 ? -1.0 : 1.0) / mx;
    for (double& v : x) v *= scale;
}

// quotient over the unknowns (phi_0 = 0 implicit)
double quotient(const DiscreteProblem& dp, const std::vector<double>& x) {
    const int n = dp.n;
    const double p = dp.p;
    double num = 0, den = 0;
    double prev = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = (x[i] - prev) / dp.h;
        num += dp.mid_weight[i] * std::pow(std::abs(d), p) * dp.h;
        prev = x[i];
    }
    for (int j = 1; j <= n; ++j)
        den += dp.node_weight[j] * dp.h * (j == n ? 0.5 : 1.0) * std::pow(std::abs(x[j - 1]), p);
    if (den == 0) throw DomainError("rayleigh: denominator vanished");
    return num / den;
}

MinimizeResult minimize_p2(const DiscreteProblem& dp, int max_iters) {
    const int n = dp.n;
    Tridiag A = stiffness(dp, dp.mid_weight);
    A.factor();
    const auto b = mass_diagonal(dp);

    std::vector<double> x(n);
    for (int j = 1; j <= n; ++j) x[j - 1] = j * dp.h; // positive ramp start

    double lambda = quotient(dp, x);
    int it = 0;
    for (;; ++it) {
        if (it >= max_iters)
            throw NoConvergence("oracle: inverse iteration hit the iteration cap",
                                it, lambda, 0.0);
        std::vector<double> rhs(n);
        for (int j = 0; j < n; ++j) rhs[j] = b[j] * x[j];
        x = A.solve(std::move(rhs));
        double nrm = 0;
        for (int j = 0; j < n; ++j) nrm += b[j] * x[j] * x[j];
        nrm = std::sqrt(nrm);
        for (double& v : x) v /= nrm;
        const double next = quotient(dp, x);
        const bool done = std::abs(next - lambda) <= 1e-12 * next;
        lambda = next;
        if (done) break;
    }

    orient_and_normalize(x);
    return {quotient(dp, x), std::move(x), it + 1};
}

// gradient of the quotient at x, over the unknowns
std::vector<double> quotient_gradient(const DiscreteProblem& dp, const std::vector<double>& x,
                                      double R) {
    const int n = dp.n;
    const double p = dp.p;
    double den = 0;
    for (int j = 1; j <= n; ++j)
        den += dp.node_weight[j] * dp.h * (j == n ? 0.5 : 1.0) * std::pow(std::abs(x[j - 1]), p);

    // edge fluxes w_{i+1/2} |d_i|^{p-2} d_i
    std::vector<double> flux(n);
    double prev = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = (x[i] - prev) / dp.h;
        flux[i] = dp.mid_weight[i] * sign_pow(d, p - 1.0);
        prev = x[i];
    }

    std::vector<double> g(n);
    for (int j = 1; j <= n; ++j) {
        double dN = p * flux[j - 1];
        if (j < n) dN -= p * flux[j];
        const double bj = dp.node_weight[j] * dp.h * (j == dp.n ? 0.5 : 1.0);
        const double dD = p * bj * sign_pow(x[j - 1], p - 1.0);
        g[j - 1] = (dN - R * dD) / den;
    }
    return g;
}

MinimizeResult minimize_general(const DiscreteProblem& dp, int max_iters) {
    const int n = dp.n;
    const double p = dp.p;

    MinimizeResult warm = minimize_p2(dp, max_iters);
    std::vector<double> x = std::move(warm.phi);
    orient_and_normalize(x);

    double R = quotient(dp, x);
    double alpha = 1.0;
    int it = 0;

    for (;; ++it) {
        if (it >= max_iters)
            throw NoConvergence("oracle: descent hit the iteration cap", it, R,
                                std::numeric_limits<double>::quiet_NaN());

        const auto g = quotient_gradient(dp, x, R);

        // descent metric: variable-coefficient stiffness frozen at the current
        // iterate, so the conditioning of the direction solve is mesh-independent
        std::vector<double> coef(n);
        double dmax = 0;
        {
            double prev = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = std::abs((x[i] - prev) / dp.h);
                dmax = std::max(dmax, d);
                prev = x[i];
            }
            prev = 0.0;
            const double floor_d = std::max(1e-6 * dmax, 1e-300);
            for (int i = 0; i < n; ++i) {
                const double d = std::max(std::abs((x[i] - prev) / dp.h), floor_d);
                coef[i] = dp.mid_weight[i] * (p - 1.0) * std::pow(d, p - 2.0);
                prev = x[i];
            }
        }
        Tridiag K = stiffness(dp, coef);
        K.factor();
        const auto dir = K.solve(g);

        double slope = 0;
        for (int j = 0; j < n; ++j) slope += g[j] * dir[j];
        if (!(slope > 0)) break; // stationary to rounding

        // Armijo backtracking
        alpha = std::min(alpha * 2.0, 4.0);
        double Rnew = R;
        std::vector<double> trial;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            trial = x;
            for (int j = 0; j < n; ++j) trial[j] -= alpha * dir[j];
            const double Rt = quotient(dp, trial);
            if (Rt <= R - 1e-4 * alpha * slope) {
                Rnew = Rt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break; // no further progress at machine scale

        x = std::move(trial);
        orient_and_normalize(x);
        const double decrease = R - Rnew;
        R = quotient(dp, x);
        if (decrease < 1e-12 * R) break;
    }

    return {R, std::move(x), warm.iterations + it};
}

} // namespace

DiscreteProblem make_discrete(const model::ModelProblem& problem, int n) {
    if (n < 16) throw DomainError("make_discrete: requires n >= 16");
    model::require_valid(problem);

    DiscreteProblem dp;
    dp.n = n;
    dp.h = problem.half_length / n;
    dp.p = problem.p;
    dp.node_weight.resize(n + 1);
    dp.mid_weight.resize(n);
    for (int i = 0; i <= n; ++i) {
        const double w = model::weight(problem, i * dp.h);
        if (!(w > 0))
            throw DomainError("make_discrete: weight not positive at node " + std::to_string(i));
        dp.node_weight[i] = w;
    }
    for (int i = 0; i < n; ++i) {
        const double w = model::weight(problem, (i + 0.5) * dp.h);
        if (!(w > 0))
            throw DomainError("make_discrete: weight not positive at midpoint " +
                              std::to_string(i));
        dp.mid_weight[i] = w;
    }
    return dp;
}

double rayleigh(const DiscreteProblem& dp, const std::vector<double>& phi) {
    if (static_cast<int>(phi.size()) != dp.n + 1)
        throw DomainError("rayleigh: expected " + std::to_string(dp.n + 1) + " nodal values");
    if (phi[0] != 0.0)
        throw DomainError("rayleigh: phi_0 must be 0");
    bool nonzero = false;
    for (double v : phi)
        if (v != 0.0) nonzero = true;
    if (!nonzero) throw DomainError("rayleigh: phi is identically zero");
    return quotient(dp, std::vector<double>(phi.begin() + 1, phi.end()));
}

MinimizeResult minimize(const DiscreteProblem& dp, int max_iters) {
    MinimizeResult res =
        dp.p == 2.0 ? minimize_p2(dp, max_iters) : minimize_general(dp, max_iters);
    // report with the constrained node included
    res.phi.insert(res.phi.begin(), 0.0);
    return res;
}

Estimate estimate(const model::ModelProblem& problem, int n, int max_iters) {
    if (n % 2 != 0) throw DomainError("estimate: n must be even");
    const auto coarse = minimize(make_discrete(problem, n / 2), max_iters);
    auto fine = minimize(make_discrete(problem, n), max_iters);
    Estimate est;
    est.coarse = coarse.lambda;
    est.fine = fine.lambda;
    est.richardson = (4.0 * fine.lambda - coarse.lambda) / 3.0;
    est.n_coarse = n / 2;
    est.n_fine = n;
    est.iterations = coarse.iterations + fine.iterations;
    est.phi_fine = std::move(fine.phi);
    return est;
}

} // namespace eigenbound::oracle
