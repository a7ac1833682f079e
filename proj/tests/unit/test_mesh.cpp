#include <doctest.h>

#include <numeric>
#include <stdexcept>

#include "bvcontrol/mesh.hpp"

using namespace bvc;

TEST_SUITE("mesh") {

TEST_CASE("uniform two cells") {
    Mesh m = Mesh::uniform(2);
    REQUIRE(m.cell_count() == 2);
    REQUIRE(m.node_count() == 3);
    CHECK(m.nodes()[0] == 0.0);
    CHECK(m.nodes()[1] == 0.5);
    CHECK(m.nodes()[2] == 1.0);
    CHECK(m.h_max() == 0.5);
    CHECK(m.cell(1).first == 0.5);
    CHECK(m.cell(1).second == 1.0);
}

TEST_CASE("uniform rejects fewer than two cells") {
    CHECK_THROWS_AS(Mesh::uniform(1), std::invalid_argument);
    CHECK_THROWS_AS(Mesh::uniform(0), std::invalid_argument);
    CHECK_THROWS_AS(Mesh::uniform(-4), std::invalid_argument);
}

TEST_CASE("dyadic nodes are exact and nested") {
    Mesh coarse = Mesh::uniform(8);
    Mesh fine = Mesh::uniform(16);
    for (int i = 0; i <= 8; ++i) {
        // dyadic rationals are representable, so equality is exact
        CHECK(coarse.nodes()[i] == static_cast<double>(i) / 8.0);
        CHECK(coarse.nodes()[i] == fine.nodes()[2 * i]);
    }
}

TEST_CASE("explicit nodes validated") {
    CHECK_NOTHROW(Mesh({0.0, 0.3, 0.7, 1.0}));
    CHECK_THROWS_AS(Mesh({0.1, 0.5, 1.0}), std::invalid_argument);   // must start at 0
    CHECK_THROWS_AS(Mesh({0.0, 0.5, 0.9}), std::invalid_argument);   // must end at 1
    CHECK_THROWS_AS(Mesh({0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Mesh({0.0, 0.7, 0.3, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Mesh({0.0, 1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(Mesh(std::vector<double>{0.0}), std::invalid_argument);
}

TEST_CASE("cell sizes partition the interval") {
    Mesh m({0.0, 0.1, 0.35, 0.6, 0.85, 1.0});
    const auto& s = m.cell_sizes();
    CHECK(std::accumulate(s.begin(), s.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.h_max() == doctest::Approx(0.25));
}

TEST_CASE("same_mesh compares partitions") {
    auto a = uniform_mesh(4);
    auto b = uniform_mesh(4);
    auto c = uniform_mesh(8);
    CHECK(same_mesh(a, a));
    CHECK(same_mesh(a, b));  // equal nodes, distinct objects
    CHECK_FALSE(same_mesh(a, c));
}

TEST_CASE("parent_cells maps dyadic refinement") {
    auto coarse = uniform_mesh(4);
    auto fine = uniform_mesh(8);
    auto parent = parent_cells(*coarse, *fine);
    REQUIRE(parent.size() == 8);
    for (int f = 0; f < 8; ++f) CHECK(parent[f] == f / 2);
}

TEST_CASE("parent_cells handles non-uniform nesting") {
    Mesh coarse({0.0, 0.5, 1.0});
    Mesh fine({0.0, 0.25, 0.5, 0.6, 1.0});
    auto parent = parent_cells(coarse, fine);
    REQUIRE(parent.size() == 4);
    CHECK(parent[0] == 0);
    CHECK(parent[1] == 0);
    CHECK(parent[2] == 1);
    CHECK(parent[3] == 1);
}

TEST_CASE("parent_cells rejects non-nested meshes") {
    Mesh coarse = Mesh::uniform(3);
    Mesh fine = Mesh::uniform(4);
    CHECK_THROWS_AS(parent_cells(coarse, fine), std::invalid_argument);
}

}  // TEST_SUITE
