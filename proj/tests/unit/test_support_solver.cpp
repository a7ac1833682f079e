#include <doctest.h>

#include <cmath>
#include <vector>

#include "bvcontrol/analytic_examples.hpp"
#include "bvcontrol/quadrature.hpp"
#include "bvcontrol/support_solver.hpp"

using namespace bvc;

namespace {

OuterIterate iterate(std::vector<int> support, std::vector<double> coords, double objective) {
    OuterIterate it;
    it.support_size = static_cast<int>(support.size());
    it.support = std::move(support);
    it.support_coords = std::move(coords);
    it.objective = objective;
    return it;
}

}  // namespace

TEST_SUITE("support_solver") {

TEST_CASE("detect picks sign changes of the adjoint") {
    auto mesh = uniform_mesh(4);
    auto r = detect_support(P0Function(mesh, {1.0, -1.0, -2.0, 3.0}));
    CHECK(r.nodes == std::vector<int>{1, 3});
    CHECK_FALSE(r.degenerate);

    auto none = detect_support(P0Function(mesh, {0.5, 1.0, 2.0, 0.25}));
    CHECK(none.nodes.empty());
    CHECK_FALSE(none.degenerate);
}

TEST_CASE("near-zero adjoint cells inherit the left sign") {
    auto mesh = uniform_mesh(3);
    auto r = detect_support(P0Function(mesh, {1e-14, 1.0, -1.0}));
    CHECK(r.degenerate);
    CHECK(r.nodes == std::vector<int>{2});  // tiny first cell counts as positive side

    auto zeros = detect_support(P0Function(mesh, {0.0, 0.0, 0.0}));
    CHECK(zeros.degenerate);
    CHECK(zeros.nodes.empty());
}

TEST_CASE("termination names") {
    CHECK(to_string(Termination::T1) == "T1");
    CHECK(to_string(Termination::T2) == "T2");
    CHECK(to_string(Termination::MaxIter) == "MaxIter");
}

TEST_CASE("first stopping rule fires on a repeated support") {
    std::vector<OuterIterate> hist{iterate({3, 7}, {0.3, 0.7}, 1.0)};
    std::vector<double> same{0.3, 0.7};
    auto t = check_termination(hist, same, 1e-10);
    REQUIRE(t.has_value());
    CHECK(*t == Termination::T1);

    std::vector<double> moved{0.3, 0.8};
    CHECK_FALSE(check_termination(hist, moved, 1e-10).has_value());

    std::vector<double> close{0.3, 0.7 + 1e-11};
    auto tc = check_termination(hist, close, 1e-10);
    REQUIRE(tc.has_value());
    CHECK(*tc == Termination::T1);
}

TEST_CASE("size change defers to the next round") {
    std::vector<OuterIterate> hist{iterate({3, 7}, {0.3, 0.7}, 1.0)};
    std::vector<double> bigger{0.3, 0.5, 0.7};
    CHECK_FALSE(check_termination(hist, bigger, 1e-10).has_value());
    CHECK_FALSE(check_termination(hist, std::vector<double>{}, 1e-10).has_value());
}

TEST_CASE("second stopping rule needs a genuine descent cycle") {
    // supports alternate A, B, A; rule fires only if f(A) < f(B)
    std::vector<OuterIterate> cycling{iterate({3}, {0.3}, 1.0), iterate({4}, {0.4}, 2.0)};
    std::vector<double> back{0.3};
    auto t = check_termination(cycling, back, 1e-10);
    REQUIRE(t.has_value());
    CHECK(*t == Termination::T2);

    std::vector<OuterIterate> ascending{iterate({3}, {0.3}, 2.0), iterate({4}, {0.4}, 1.0)};
    CHECK_FALSE(check_termination(ascending, back, 1e-10).has_value());

    // mismatched sizes along the cycle: no decision
    std::vector<OuterIterate> mixed{iterate({3, 5}, {0.3, 0.5}, 1.0), iterate({4}, {0.4}, 2.0)};
    CHECK_FALSE(check_termination(mixed, back, 1e-10).has_value());
}

TEST_CASE("repeat of the previous support wins over the cycle rule") {
    // both rules would fire here; the immediate repeat decides
    std::vector<OuterIterate> hist{iterate({3}, {0.3}, 0.5), iterate({3}, {0.3}, 1.0)};
    std::vector<double> same{0.3};
    auto t = check_termination(hist, same, 1e-10);
    REQUIRE(t.has_value());
    CHECK(*t == Termination::T1);
}

TEST_CASE("no history, no decision") {
    CHECK_FALSE(check_termination({}, std::vector<double>{0.5}, 1e-10).has_value());
}

TEST_CASE("zero target stops immediately with an empty support") {
    auto sys = assemble_system(uniform_mesh(16), Coefficients::constant(1.0));
    auto res = run_outer(sys, std::vector<double>(16, 0.0), 1e-3);
    CHECK(res.termination == Termination::T1);
    CHECK(res.support_nodes.empty());
    CHECK(res.solution.base == 0.0);
    CHECK(res.solution.objective == 0.0);
    CHECK(res.control.jump_count() == 0);
    CHECK(res.outer_iterations == 2);
    CHECK(res.history.size() == 2);
}

TEST_CASE("example problem recovers a three-jump control") {
    auto spec = example1();
    const int n = 64;
    auto sys = assemble_system(uniform_mesh(n), spec.coefficients);
    std::vector<double> target(n);
    for (int j = 0; j < n; ++j) {
        const auto [xl, xr] = sys->mesh()->cell(j);
        target[j] = gauss5_average(spec.target, xl, xr);
    }
    OuterConfig cfg;
    int traces = 0;
    cfg.trace = [&](int, const OuterIterate&, const std::string&) { ++traces; };
    auto res = run_outer(sys, target, spec.alpha, cfg);
    CHECK(res.termination != Termination::MaxIter);
    CHECK(res.solution.converged);
    CHECK(res.assumption_ok);
    CHECK(res.control.jump_count() == 3);
    CHECK(res.solution.kkt_residual <= 1e-6 * spec.alpha);
    CHECK(static_cast<int>(res.history.size()) == res.outer_iterations);
    CHECK(traces >= res.outer_iterations);

    // jump locations near the known discontinuities, one cell each
    const double h = 1.0 / n;
    REQUIRE(res.control.jump_count() == 3);
    const auto& ex = *spec.exact;
    auto exact_locs = ex.control.locations();
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(res.control.locations()[i] - exact_locs[i]) <= h + 1e-12);
    }
}

TEST_CASE("iteration cap reports best effort") {
    auto spec = example1();
    const int n = 32;
    auto sys = assemble_system(uniform_mesh(n), spec.coefficients);
    std::vector<double> target(n);
    for (int j = 0; j < n; ++j) {
        const auto [xl, xr] = sys->mesh()->cell(j);
        target[j] = gauss5_average(spec.target, xl, xr);
    }
    OuterConfig cfg;
    cfg.max_outer = 1;
    auto res = run_outer(sys, target, spec.alpha, cfg);
    CHECK(res.termination == Termination::MaxIter);
    CHECK(res.outer_iterations == 1);
    CHECK(res.history.size() == 1);
}

TEST_CASE("input validation") {
    auto sys = assemble_system(uniform_mesh(8), Coefficients::constant(1.0));
    CHECK_THROWS_AS(run_outer(nullptr, std::vector<double>(8, 0.0), 1e-3),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_outer(sys, std::vector<double>(4, 0.0), 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(run_outer(sys, std::vector<double>(8, 0.0), -1.0), std::invalid_argument);
    OuterConfig bad;
    bad.max_outer = 0;
    CHECK_THROWS_AS(run_outer(sys, std::vector<double>(8, 0.0), 1e-3, bad),
                    std::invalid_argument);
}

}  // TEST_SUITE
