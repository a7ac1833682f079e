#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "bvcontrol/bv_control.hpp"
#include "bvcontrol/mesh.hpp"

using namespace bvc;

namespace {

JumpControl random_control(std::mt19937& rng) {
    std::uniform_int_distribution<int> count(0, 6);
    std::uniform_real_distribution<double> unit(0.02, 0.98);
    std::uniform_real_distribution<double> height(-2.0, 2.0);
    const int k = count(rng);
    std::vector<double> locs;
    while (static_cast<int>(locs.size()) < k) {
        double x = unit(rng);
        bool clash = false;
        for (double l : locs) clash |= std::abs(l - x) < 1e-6;
        if (!clash) locs.push_back(x);
    }
    std::sort(locs.begin(), locs.end());
    std::vector<double> heights(k);
    for (double& c : heights) c = height(rng);
    return JumpControl(height(rng), std::move(locs), std::move(heights));
}

MeshPtr random_mesh(std::mt19937& rng) {
    std::uniform_int_distribution<int> count(2, 40);
    std::uniform_real_distribution<double> gap(0.2, 1.0);
    const int n = count(rng);
    std::vector<double> nodes{0.0};
    for (int i = 0; i < n; ++i) nodes.push_back(nodes.back() + gap(rng));
    const double total = nodes.back();
    for (double& x : nodes) x /= total;
    nodes.back() = 1.0;
    return mesh_from_nodes(nodes);
}

}  // namespace

TEST_SUITE("bv_control") {

TEST_CASE("step evaluation takes left limits") {
    JumpControl u(0.5, {0.3, 0.5, 0.7}, {1.0, -2.0, 1.5});
    CHECK(u.evaluate(0.0) == 0.5);
    CHECK(u.evaluate(0.3) == 0.5);   // left limit at the jump
    CHECK(u.evaluate(0.4) == 1.5);
    CHECK(u.evaluate(0.5) == 1.5);
    CHECK(u.evaluate(0.6) == -0.5);
    CHECK(u.evaluate(0.7) == -0.5);
    CHECK(u.evaluate(0.9) == 1.0);
    CHECK(u.evaluate(1.0) == 1.0);
}

TEST_CASE("constructor validates jump data") {
    CHECK_THROWS_AS(JumpControl(0.0, {0.5}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(JumpControl(0.0, {0.6, 0.4}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(JumpControl(0.0, {0.4, 0.4}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(JumpControl(0.0, {0.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(JumpControl(0.0, {1.0}, {1.0}), std::invalid_argument);
    CHECK_NOTHROW(JumpControl(0.0, {0.5}, {0.0}));
}

TEST_CASE("seminorm sums absolute heights") {
    JumpControl u(0.5, {0.2, 0.5, 0.8}, {1.0, -2.0, 1.5});
    CHECK(u.bv_seminorm() == doctest::Approx(4.5).epsilon(1e-15));
    CHECK(JumpControl::constant(3.0).bv_seminorm() == 0.0);
}

TEST_CASE("cell integrals split cells at jumps") {
    auto mesh = uniform_mesh(2);
    // jump of height 2 at x = 0.25: u = 1 on (0,0.25), 3 on (0.25,1)
    JumpControl u(1.0, {0.25}, {2.0});
    auto ints = cell_integrals(u, *mesh);
    REQUIRE(ints.size() == 2);
    CHECK(ints[0] == doctest::Approx(0.25 * 1.0 + 0.25 * 3.0).epsilon(1e-15));
    CHECK(ints[1] == doctest::Approx(0.5 * 3.0).epsilon(1e-15));

    // jump exactly at the interior node: no splitting needed
    JumpControl v(0.0, {0.5}, {1.0});
    auto iv = cell_integrals(v, *mesh);
    CHECK(iv[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(iv[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("projection preserves cell integrals") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        auto u = random_control(rng);
        auto mesh = random_mesh(rng);
        auto proj = upsilon_project(u, mesh);
        auto exact = cell_integrals(u, *mesh);
        double scale = 1.0;
        for (double v : exact) scale = std::max(scale, std::abs(v));
        for (int i = 0; i < mesh->cell_count(); ++i) {
            const auto [a, b] = mesh->cell(i);
            CHECK(std::abs(proj.value(i) * (b - a) - exact[i]) <= 1e-14 * scale);
        }
    }
}

TEST_CASE("projection error bounded by mesh size times variation") {
    std::mt19937 rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        auto u = random_control(rng);
        auto mesh = random_mesh(rng);
        auto proj = to_jump_control(upsilon_project(u, mesh));
        CHECK(l1_distance(u, proj) <= mesh->h_max() * u.bv_seminorm() + 1e-12);
    }
}

TEST_CASE("projection does not increase variation") {
    std::mt19937 rng(33);
    for (int trial = 0; trial < 100; ++trial) {
        auto u = random_control(rng);
        auto mesh = random_mesh(rng);
        auto proj = to_jump_control(upsilon_project(u, mesh));
        CHECK(proj.bv_seminorm() <= u.bv_seminorm() + 1e-12);
    }
}

TEST_CASE("distances between simple bumps") {
    JumpControl bump(0.0, {0.45, 0.55}, {1.0, -1.0});
    JumpControl zero = JumpControl::constant(0.0);
    CHECK(l1_distance(bump, zero) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(l2_distance(bump, zero) == doctest::Approx(std::sqrt(0.1)).epsilon(1e-14));
}

TEST_CASE("distance axioms on random pairs") {
    std::mt19937 rng(34);
    for (int trial = 0; trial < 50; ++trial) {
        auto u = random_control(rng);
        auto v = random_control(rng);
        auto w = random_control(rng);
        CHECK(l1_distance(u, u) <= 1e-14);
        CHECK(l2_distance(u, u) <= 1e-14);
        CHECK(l1_distance(u, v) == doctest::Approx(l1_distance(v, u)).epsilon(1e-12));
        CHECK(l2_distance(u, v) == doctest::Approx(l2_distance(v, u)).epsilon(1e-12));
        CHECK(l1_distance(u, w) <= l1_distance(u, v) + l1_distance(v, w) + 1e-12);
        CHECK(l2_distance(u, w) <= l2_distance(u, v) + l2_distance(v, w) + 1e-12);
    }
}

TEST_CASE("json round trip") {
    JumpControl u(0.5, {0.25, 0.75}, {1.0, -1.5});
    auto j = u.to_json();
    auto back = JumpControl::from_json(j);
    CHECK(back.base() == u.base());
    REQUIRE(back.jump_count() == 2);
    CHECK(back.locations()[0] == 0.25);
    CHECK(back.locations()[1] == 0.75);
    CHECK(back.heights()[0] == 1.0);
    CHECK(back.heights()[1] == -1.5);
}

TEST_CASE("antiderivative accumulates cell masses") {
    auto mesh = uniform_mesh(4);
    P0Function p(mesh, {1.0, -1.0, 2.0, 0.0});
    auto phi = antiderivative(p);
    REQUIRE(phi.size() == 5);
    CHECK(phi.value(0) == 0.0);
    CHECK(phi.value(1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(phi.value(2) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(phi.value(3) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(phi.value(4) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("piecewise constant converts to jump form") {
    auto mesh = uniform_mesh(4);
    P0Function f(mesh, {1.0, 1.0, 3.0, 2.0});
    auto u = to_jump_control(f);
    CHECK(u.base() == 1.0);
    REQUIRE(u.jump_count() == 2);  // zero jump at 0.25 dropped
    CHECK(u.locations()[0] == 0.5);
    CHECK(u.heights()[0] == 2.0);
    CHECK(u.locations()[1] == 0.75);
    CHECK(u.heights()[1] == -1.0);
    for (double x : {0.1, 0.3, 0.6, 0.9})
        CHECK(u.evaluate(x) == f.evaluate(x));
}

}  // TEST_SUITE
