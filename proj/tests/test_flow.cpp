#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "eigenbound/compfun.hpp"
#include "eigenbound/errors.hpp"
#include "eigenbound/flow.hpp"
#include "eigenbound/shoot.hpp"

using namespace eigenbound;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

model::ModelProblem flat(double p, double length) {
    return {model::quaternionic_profile(2, 0.0), p, length, model::BoundaryKind::NeumannPair};
}

} // namespace

TEST_CASE("apply_F of a sine is its Laplacian") {
    const auto problem = flat(2.0, 1.0);
    const int n = 256;
    const auto state =
        flow::make_state(problem, n, [](double s) { return std::sin(kPi * s / 2); });
    const auto F = flow::apply_F(problem, state);
    const double h = 1.0 / n;
    for (int i = 1; i < n; ++i) {
        const double s = i * h;
        CHECK(F[i] ==
              Approx(-(kPi / 2) * (kPi / 2) * std::sin(kPi * s / 2)).epsilon(40 * h * h));
    }
}

TEST_CASE("apply_F of a constant is zero away from the pinned node") {
    const auto problem = flat(2.0, 1.0);
    auto state = flow::make_state(problem, 64, [](double) { return 1.0; });
    // keep the constant: undo the pinned boundary value for this check
    state.values[0] = 1.0;
    const auto F = flow::apply_F(problem, state);
    for (int i = 1; i <= 64; ++i) CHECK(F[i] == 0.0);
}

TEST_CASE("apply_F of the shooting certificate is the eigen-equation") {
    const auto problem =
        model::ModelProblem{model::quaternionic_profile(2, -1.0), 2.0, 1.0,
                            model::BoundaryKind::NeumannPair};
    const auto sol = shoot::solve(problem);
    const int n = 512;
    const auto state = flow::make_state(problem, n,
                                        [&](double s) { return sol.certificate.eval(s).phi; });
    const auto F = flow::apply_F(problem, state);
    const double h = problem.half_length / n;
    for (int i = 1; i < n; ++i) {
        const double phi = state.values[i];
        CHECK(std::abs(F[i] + sol.eigenvalue * phi) <= 50 * h * h * sol.eigenvalue);
    }
}

TEST_CASE("scaling homogeneity of apply_F") {
    const auto p2 = flat(2.0, 1.0);
    auto state = flow::make_state(p2, 128, [](double s) { return std::sin(kPi * s / 2); });
    // power-of-two scaling commutes with every rounding step at p = 2
    auto doubled = state;
    for (double& v : doubled.values) v *= 2.0;
    const auto F1 = flow::apply_F(p2, state);
    const auto F2 = flow::apply_F(p2, doubled);
    for (std::size_t i = 0; i < F1.size(); ++i) CHECK(F2[i] == 2.0 * F1[i]);

    const auto p3 = flat(3.0, 1.0);
    auto s3 = flow::make_state(p3, 128, [](double s) { return std::sin(kPi * s / 2); });
    auto s3c = s3;
    const double c = 1.7;
    for (double& v : s3c.values) v *= c;
    const auto G1 = flow::apply_F(p3, s3);
    const auto G2 = flow::apply_F(p3, s3c);
    const double factor = std::pow(c, 2.0); // c^{p-1}
    double scale = 0;
    for (double g : G1) scale = std::max(scale, std::abs(g));
    // homogeneity up to the rounding of pow, amplified by the divided
    // differences of nearly equal fluxes
    for (std::size_t i = 0; i < G1.size(); ++i)
        CHECK(std::abs(G2[i] - factor * G1[i]) <= 1e-11 * scale);
}

TEST_CASE("zero data stays zero") {
    const auto problem = flat(2.0, 1.0);
    auto state = flow::make_state(problem, 64, [](double) { return 0.0; });
    const double dt = flow::stability_bound(problem, 64);
    for (int k = 0; k < 10; ++k) state = flow::step(problem, state, dt);
    for (double v : state.values) CHECK(v == 0.0);
    CHECK(state.time == Approx(10 * dt));
}

TEST_CASE("step rejects an oversized dt") {
    const auto problem = flat(2.0, 1.0);
    const auto state = flow::make_state(problem, 64, [](double s) { return s; });
    const double bound = flow::stability_bound(problem, 64);
    CHECK_THROWS_AS(flow::step(problem, state, 2 * bound), DomainError);
}

TEST_CASE("eigenfunction data decays at the heat rate for p=2") {
    const auto problem = flat(2.0, kPi / 2); // mu = 1
    const auto state = flow::make_state(problem, 129,
                                        [](double s) { return std::sin(s); });
    const double rate = flow::decay_rate(problem, state, 6.0);
    CHECK(rate == Approx(1.0).epsilon(1e-2));
}

TEST_CASE("generic positive data decays at the same rate for p=2") {
    const auto problem = flat(2.0, kPi / 2);
    const auto state = flow::make_state(problem, 129, [](double s) {
        return s * (kPi - s) / 2.5; // positive, satisfies the value BC
    });
    const double rate = flow::decay_rate(problem, state, 8.0);
    CHECK(rate == Approx(1.0).epsilon(2e-2));
}

TEST_CASE("flows preserve nodewise ordering at p=2") {
    const auto problem = flat(2.0, 1.0);
    auto lower = flow::make_state(problem, 65, [](double s) { return std::sin(kPi * s / 2); });
    auto upper = flow::make_state(problem, 65, [](double s) {
        return std::sin(kPi * s / 2) + 0.3 * s;
    });
    const double dt = flow::stability_bound(problem, 65);
    for (int k = 0; k < 500; ++k) {
        lower = flow::step(problem, lower, dt);
        upper = flow::step(problem, upper, dt);
        for (std::size_t i = 0; i < lower.values.size(); ++i)
            CHECK(lower.values[i] <= upper.values[i] + 1e-14);
    }
}

TEST_CASE("evolved eigenfunction keeps its shape") {
    const auto problem = flat(2.0, kPi / 2);
    auto state = flow::make_state(problem, 129, [](double s) { return std::sin(s); });
    const auto reference = state.values;
    const double dt = flow::stability_bound(problem, 129);
    const int steps = static_cast<int>(2.0 / dt);
    for (int k = 0; k < steps; ++k) state = flow::step(problem, state, dt);

    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        dot += state.values[i] * reference[i];
        na += state.values[i] * state.values[i];
        nb += reference[i] * reference[i];
    }
    CHECK(dot / std::sqrt(na * nb) >= 1.0 - 1e-4);
}

TEST_CASE("decay_rate input checking") {
    const auto problem = flat(2.0, 1.0);
    const auto zero = flow::make_state(problem, 64, [](double) { return 0.0; });
    CHECK_THROWS_AS(flow::decay_rate(problem, zero, 1.0), DomainError);
}
