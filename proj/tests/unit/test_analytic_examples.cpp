#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bvcontrol/analytic_examples.hpp"

using namespace bvc;
using std::numbers::pi;

namespace {

double xc() { return std::acos((12.0 - 4.0 * std::sqrt(8.0)) / 4.0) / (2.0 * pi); }

}  // namespace

TEST_SUITE("analytic_examples") {

TEST_CASE("jump abscissa satisfies its defining equation") {
    const double c = 12.0 - 4.0 * std::sqrt(8.0);
    CHECK(4.0 * std::cos(2.0 * pi * xc()) == doctest::Approx(c).epsilon(1e-15));
    CHECK(xc() > 0.0);
    CHECK(xc() < 0.25);
}

TEST_CASE("optimal control structure") {
    auto spec = example1();
    REQUIRE(spec.exact.has_value());
    const auto& u = spec.exact->control;
    CHECK(u.base() == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(u.jump_count() == 3);
    CHECK(u.locations()[0] == doctest::Approx(xc()).epsilon(1e-15));
    CHECK(u.locations()[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(u.locations()[2] == doctest::Approx(1.0 - xc()).epsilon(1e-15));
    CHECK(u.heights()[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(u.heights()[1] == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(u.heights()[2] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(u.bv_seminorm() == doctest::Approx(4.5).epsilon(1e-15));
}

TEST_CASE("multiplier touches the bounds exactly at the jumps") {
    auto spec = example1();
    const auto& phi = spec.exact->multiplier;
    const double a = spec.alpha;
    CHECK(phi(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(phi(1.0) == doctest::Approx(0.0).scale(a).epsilon(1e-12));
    CHECK(phi(xc()) == doctest::Approx(a).epsilon(1e-12));
    CHECK(phi(0.5) == doctest::Approx(-a).epsilon(1e-12));
    CHECK(phi(1.0 - xc()) == doctest::Approx(a).epsilon(1e-12));
    // interior bound: |phi| <= alpha on a fine sample
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        CHECK(std::abs(phi(x)) <= a * (1.0 + 1e-12));
    }
}

TEST_CASE("adjoint is the multiplier derivative") {
    auto spec = example1();
    const auto& phi = spec.exact->multiplier;
    const auto& p = spec.exact->adjoint;
    const double step = 1e-6;
    for (double x : {0.1, 0.3, 0.45, 0.62, 0.9}) {
        const double fd = (phi(x + step) - phi(x - step)) / (2 * step);
        CHECK(p(x) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("state satisfies the equation piecewise") {
    auto spec = example1();
    const auto& y = spec.exact->state;
    const auto& u = spec.exact->control;
    CHECK(y(0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(y(1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    // inside each smooth piece the state is quadratic, so the second
    // difference is exact: -y'' = u
    const double step = 1e-4;
    for (double x : {0.1, 0.3, 0.48, 0.6, 0.9}) {
        const double ypp = (y(x + step) - 2.0 * y(x) + y(x - step)) / (step * step);
        CHECK(-ypp == doctest::Approx(u.evaluate(x)).epsilon(1e-6));
    }
    // continuity of y and y' across a jump location
    const double t = 0.5, eps = 1e-9;
    CHECK(y(t - eps) == doctest::Approx(y(t + eps)).epsilon(1e-7));
    const double dl = (y(t) - y(t - eps)) / eps;
    const double dr = (y(t + eps) - y(t)) / eps;
    CHECK(dl == doctest::Approx(dr).epsilon(1e-5));
}

TEST_CASE("step source solver reproduces the parabolic solution") {
    StepSourceSolution s(JumpControl::constant(1.0));
    for (double x : {0.0, 0.2, 0.5, 0.77, 1.0}) {
        CHECK(s.value(x) == doctest::Approx(0.5 * x * (1.0 - x)).epsilon(1e-14));
        CHECK(s.derivative(x) == doctest::Approx(0.5 - x).epsilon(1e-14));
    }
}

TEST_CASE("consistency check passes for the shipped data") {
    auto spec = example1();
    auto report = verify_example1_consistency(spec, 512);
    for (const auto& f : report.failures) MESSAGE(f);
    CHECK(report.ok);
}

TEST_CASE("consistency check scales with alpha") {
    auto spec = example1(2e-5);
    auto report = verify_example1_consistency(spec, 256);
    for (const auto& f : report.failures) MESSAGE(f);
    CHECK(report.ok);
}

TEST_CASE("consistency check rejects a perturbed target") {
    auto spec = example1();
    auto base = spec.target;
    spec.target = [base](double x) { return base(x) + 0.01; };
    auto report = verify_example1_consistency(spec, 256);
    CHECK_FALSE(report.ok);
    CHECK_FALSE(report.failures.empty());
}

TEST_CASE("consistency check validates the sample size") {
    auto spec = example1();
    CHECK_THROWS_AS(verify_example1_consistency(spec, 3), std::invalid_argument);
}

TEST_CASE("smooth example has no closed-form solution attached") {
    auto spec = example2();
    CHECK_FALSE(spec.exact.has_value());
    CHECK(spec.target(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(spec.target(0.5) == doctest::Approx(1.0 / (pi * pi)).epsilon(1e-14));
    CHECK(spec.coefficients.diffusion(0.3) == 1.0);
    CHECK(spec.coefficients.reaction(0.3) == 0.0);
    CHECK(spec.alpha == 1e-5);
}

TEST_CASE("examples resolve by name") {
    CHECK(example_by_name("example1").name == "example1");
    CHECK(example_by_name("example2", 3e-4).alpha == 3e-4);
    CHECK_THROWS_AS(example_by_name("nope"), std::invalid_argument);
}

}  // TEST_SUITE
