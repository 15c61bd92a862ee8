#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eigenbound/errors.hpp"
#include "eigenbound/model.hpp"

using namespace eigenbound;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

model::ModelProblem neumann(model::GeometryProfile profile, double p, double diameter) {
    return {std::move(profile), p, diameter / 2.0, model::BoundaryKind::NeumannPair};
}

model::ModelProblem dirichlet(model::GeometryProfile profile, double lambda, double p,
                              double inradius) {
    profile.boundary = compfun::BoundaryConvexity{lambda};
    return {std::move(profile), p, inradius, model::BoundaryKind::DirichletNeumann};
}

} // namespace

TEST_CASE("profile constructors") {
    const auto q = model::quaternionic_profile(2, 1.0);
    REQUIRE(q.terms.size() == 2);
    CHECK(q.terms[0].multiplicity == 4.0);
    CHECK(q.terms[0].curvature == 1.0);
    CHECK(q.terms[1].multiplicity == 3.0);
    CHECK(q.terms[1].curvature == 4.0);

    const auto q0 = model::quaternionic_profile(3, 0.0);
    CHECK(q0.terms[0].multiplicity == 8.0);
    CHECK(q0.terms[0].curvature == 0.0);
    CHECK(q0.terms[1].curvature == 0.0);

    const auto qn = model::quaternionic_profile(2, -1.0);
    CHECK(qn.terms[0].curvature == -1.0);
    CHECK(qn.terms[1].curvature == -4.0);

    const auto r = model::riemannian_profile(2, 1.0);
    REQUIRE(r.terms.size() == 1);
    CHECK(r.terms[0].multiplicity == 1.0);
    CHECK(r.terms[0].curvature == 1.0);
    CHECK(model::riemannian_profile(5, 0.0).terms[0].multiplicity == 4.0);
    CHECK(model::riemannian_profile(3, -1.0).terms[0].curvature == -1.0);

    CHECK_THROWS_AS(model::quaternionic_profile(1, 0.0), DomainError);
    CHECK_THROWS_AS(model::riemannian_profile(1, 0.0), DomainError);
}

TEST_CASE("drift values") {
    // odd drift vanishes at the center for any Neumann profile
    for (int m : {2, 4}) {
        const auto problem = neumann(model::quaternionic_profile(m, 0.7), 2.0, 1.0);
        CHECK(model::drift(problem, 0.0) == 0.0);
    }
    // quaternionic m=2, kappa=1 at s=0.1
    const auto problem = neumann(model::quaternionic_profile(2, 1.0), 2.0, 1.0);
    const double expect = 4.0 * std::tan(0.1) + 3.0 * 2.0 * std::tan(0.2);
    CHECK(model::drift(problem, 0.1) == Approx(expect).epsilon(1e-14));
    // Dirichlet drift at 0 collects (sum of multiplicities) * lambda
    for (double lambda : {-0.4, 0.0, 0.9}) {
        const auto dp = dirichlet(model::quaternionic_profile(2, 0.3), lambda, 2.0, 0.5);
        CHECK(model::drift(dp, 0.0) == Approx(7.0 * lambda).epsilon(1e-14));
    }
    CHECK_THROWS_AS(model::drift(problem, 2.0), DomainError);
}

TEST_CASE("weight values") {
    const auto problem = neumann(model::quaternionic_profile(2, 1.0), 2.0, 1.0);
    CHECK(model::weight(problem, 0.0) == 1.0);
    for (double s : {0.1, 0.3}) {
        const double expect = std::pow(std::cos(s), 4.0) * std::pow(std::cos(2 * s), 3.0);
        CHECK(model::weight(problem, s) == Approx(expect).epsilon(1e-14));
    }
    // flat Dirichlet weight (1 - lambda s)^7 for the m=2 profile
    const auto dp = dirichlet(model::quaternionic_profile(2, 0.0), 0.6, 2.0, 1.0);
    for (double s : {0.0, 0.4, 1.0})
        CHECK(model::weight(dp, s) == Approx(std::pow(1.0 - 0.6 * s, 7.0)).epsilon(1e-13));
}

TEST_CASE("zero curvature gives zero drift and unit weight") {
    const auto q = neumann(model::quaternionic_profile(3, 0.0), 1.5, 2.0);
    const auto r = neumann(model::riemannian_profile(4, 0.0), 3.0, 2.0);
    for (double s : {0.0, 0.3, 0.9}) {
        CHECK(model::drift(q, s) == 0.0);
        CHECK(model::drift(r, s) == 0.0);
        CHECK(model::weight(q, s) == 1.0);
        CHECK(model::weight(r, s) == 1.0);
    }
}

TEST_CASE("drift-weight duality") {
    const std::vector<model::ModelProblem> problems = {
        neumann(model::quaternionic_profile(2, -1.0), 2.0, 2.0),
        neumann(model::quaternionic_profile(3, 0.2), 1.5, 2.0),
        dirichlet(model::quaternionic_profile(2, 0.2), 0.5, 2.0, 0.8),
        dirichlet(model::quaternionic_profile(2, -1.0), -0.5, 3.0, 0.8),
    };
    for (const auto& problem : problems) {
        const double end = problem.half_length;
        const double h = 1e-6 * end;
        for (int i = 1; i <= 40; ++i) {
            const double s = end * i / 41.0;
            const double fd = (std::log(model::weight(problem, s + h)) -
                               std::log(model::weight(problem, s - h))) /
                              (2 * h);
            const double d = model::drift(problem, s);
            CHECK(std::abs(fd + d) / std::max(1.0, std::abs(d)) <= 1e-6);
        }
    }
}

TEST_CASE("validation rejects interior weight zeros with the location") {
    // c_{4 kappa} = cos(2s) vanishes at pi/4, inside [0, pi/2]
    const auto bad = neumann(model::quaternionic_profile(2, 1.0), 2.0, kPi);
    const auto issue = model::validate(bad);
    REQUIRE(issue.has_value());
    CHECK(issue->curvature == 4.0);
    CHECK(issue->zero_location == Approx(kPi / 4).epsilon(1e-14));
    CHECK(issue->message.find("vanishes") != std::string::npos);
    CHECK_THROWS_AS(model::require_valid(bad), ValidationError);

    // 1 - s vanishes at s=1 < R=2
    const auto badd = dirichlet(model::quaternionic_profile(2, 0.0), 1.0, 2.0, 2.0);
    const auto di = model::validate(badd);
    REQUIRE(di.has_value());
    CHECK(di->zero_location == Approx(1.0).epsilon(1e-14));

    // hyperbolic zero: lambda > sqrt(-kappa) pulls C to zero at atanh(beta/lambda)/beta;
    // the kappa=-1 factor (beta=1) vanishes before the kappa=-4 one (beta=2)
    const auto badh = dirichlet(model::quaternionic_profile(2, -1.0), 3.0, 2.0, 2.0);
    const auto hi = model::validate(badh);
    REQUIRE(hi.has_value());
    CHECK(hi->curvature == -1.0);
    CHECK(hi->zero_location == Approx(std::atanh(1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("nonpositive curvature and convexity always validate") {
    for (double kappa : {-2.0, 0.0})
        for (double lambda : {-1.5, 0.0}) {
            const auto nd = dirichlet(model::quaternionic_profile(2, kappa), lambda, 2.0, 50.0);
            CHECK(!model::validate(nd).has_value());
        }
    const auto nn = neumann(model::quaternionic_profile(2, -1.0), 2.0, 100.0);
    CHECK(!model::validate(nn).has_value());
}

TEST_CASE("an endpoint weight zero is admissible") {
    // the round-sphere comparison: weight cos^{m-1}(s) vanishes exactly at D/2
    const auto sphere = neumann(model::riemannian_profile(3, 1.0), 2.0, kPi);
    CHECK(!model::validate(sphere).has_value());
    // but any longer interval puts the zero strictly inside
    const auto longer = neumann(model::riemannian_profile(3, 1.0), 2.0, kPi * 1.01);
    CHECK(model::validate(longer).has_value());
}

TEST_CASE("validation is monotone in the interval length") {
    for (double scale : {0.999, 0.9, 0.5, 0.1}) {
        const auto shorter =
            neumann(model::quaternionic_profile(2, 1.0), 2.0, kPi / 2 * scale);
        CHECK(!model::validate(shorter).has_value());
    }
}
