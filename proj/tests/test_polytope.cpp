#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "wjsr/polytope.hpp"

using namespace wjsr;

namespace {

SymPolytope cross_polytope() {
    return SymPolytope{2, {{1.0, 0.0}, {0.0, 1.0}}};
}

SymPolytope square() {
    return SymPolytope{2, {{1.0, 1.0}, {1.0, -1.0}}};
}

int count_occurrences(const std::string& text, const std::string& needle) {
    int n = 0;
    for (size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++n;
    return n;
}

}  // namespace

TEST_CASE("polytope norm of the cross polytope is the l1 norm", "[polytope]") {
    auto p = cross_polytope();
    REQUIRE(p.spanning());
    REQUIRE(polytope_norm(p, {1.0, 0.0}) == Catch::Approx(1.0));
    REQUIRE(polytope_norm(p, {0.5, 0.5}) == Catch::Approx(1.0));
    REQUIRE(polytope_norm(p, {2.0, 0.0}) == Catch::Approx(2.0));
    REQUIRE(polytope_norm(p, {0.3, -0.2}) == Catch::Approx(0.5));
    REQUIRE(polytope_norm(p, {0.0, 0.0}) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("polytope norm of the square is the max norm", "[polytope]") {
    auto p = square();
    REQUIRE(polytope_norm(p, {1.0, 0.0}) == Catch::Approx(1.0));
    REQUIRE(polytope_norm(p, {0.5, 0.25}) == Catch::Approx(0.5));
    REQUIRE(polytope_norm(p, {-0.3, 0.9}) == Catch::Approx(0.9));
}

TEST_CASE("norm axioms hold on random points", "[polytope][prop]") {
    auto p = square();
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        Vec x{u(rng), u(rng)}, y{u(rng), u(rng)};
        double nx = polytope_norm(p, x);
        double ny = polytope_norm(p, y);
        REQUIRE(polytope_norm(p, {x[0] + y[0], x[1] + y[1]}) <= nx + ny + 1e-9);
        REQUIRE(polytope_norm(p, {-x[0], -x[1]}) == Catch::Approx(nx).margin(1e-10));
        REQUIRE(polytope_norm(p, {0.5 * x[0], 0.5 * x[1]}) == Catch::Approx(0.5 * nx).margin(1e-10));
    }
}

TEST_CASE("non-spanning vertex sets give a seminorm on the span", "[polytope]") {
    SymPolytope p{2, {{1.0, 0.0}}};
    REQUIRE_FALSE(p.spanning());
    REQUIRE(polytope_norm(p, {2.0, 0.0}) == Catch::Approx(2.0));
    REQUIRE(polytope_norm(p, {0.0, 1.0}) == std::numeric_limits<double>::infinity());
    REQUIRE_FALSE(is_interior(p, {0.0, 0.5}));
}

TEST_CASE("invalid polytopes and points are rejected", "[polytope]") {
    REQUIRE_THROWS_AS(polytope_norm(SymPolytope{2, {}}, Vec{1.0, 0.0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(polytope_norm(SymPolytope{0, {}}, Vec{}), std::invalid_argument);
    REQUIRE_THROWS_AS(polytope_norm(cross_polytope(), Vec{1.0, 0.0, 0.0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(polytope_norm(SymPolytope{2, {{1.0, 0.0}, {0.0}}}, Vec{1.0, 0.0}),
                      std::invalid_argument);
}

TEST_CASE("interiority respects the tolerance band", "[polytope]") {
    auto p = cross_polytope();
    REQUIRE(is_interior(p, {0.4, 0.4}));          // norm 0.8
    REQUIRE_FALSE(is_interior(p, {0.5, 0.5}));    // exactly on the boundary
    REQUIRE_FALSE(is_interior(p, {0.6, 0.5}));    // outside
    REQUIRE_FALSE(is_interior(p, {0.5 - 1e-12, 0.5}, 1e-10));  // within eta of the boundary
}

TEST_CASE("vertex reduction removes duplicates, sign copies and interior points", "[polytope]") {
    SymPolytope p{2,
                  {{1.0, 0.0},
                   {0.0, 1.0},
                   {1.0, 0.0},        // duplicate
                   {-1.0, 0.0},       // sign copy
                   {0.2, 0.2},        // interior
                   {0.5, 0.5}}};      // on the boundary, redundant for the hull
    auto r = reduce_vertices(p);
    REQUIRE(r.vertices.size() == 2);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        Vec x{u(rng), u(rng)};
        REQUIRE(polytope_norm(r, x) == Catch::Approx(polytope_norm(p, x)).margin(1e-9));
    }
}

TEST_CASE("flow shift bound on diagonal generators", "[polytope][mu]") {
    auto p = cross_polytope();

    auto id = mu_shift(p, {Mat::identity(2)});
    REQUIRE(id.mu == Catch::Approx(1.0).margin(1e-6));

    auto diag = mu_shift(p, {Mat{{0.3, 0.0}, {0.0, -1.0}}});
    REQUIRE(diag.mu == Catch::Approx(0.3).margin(1e-6));
    REQUIRE(diag.argmax_vertex >= 0);
    REQUIRE(diag.argmax_matrix == 0);

    // Two generators: the bound is the max over both.
    auto both = mu_shift(p, {Mat{{0.3, 0.0}, {0.0, -1.0}}, Mat{{0.7, 0.0}, {0.0, 0.1}}});
    REQUIRE(both.mu == Catch::Approx(0.7).margin(1e-6));
    REQUIRE(both.argmax_matrix == 1);
}

TEST_CASE("flow shift bound on a rotation generator", "[polytope][mu]") {
    // At the corner (1,1) of the max-norm ball the field (-y, x) pushes the
    // second coordinate outward at unit rate, so mu = 1; scaling the
    // generator scales the bound.
    Mat j{{0.0, -1.0}, {1.0, 0.0}};
    auto s1 = mu_shift(square(), {j});
    REQUIRE(s1.mu == Catch::Approx(1.0).margin(1e-5));
    auto s2 = mu_shift(square(), {0.25 * j});
    REQUIRE(s2.mu == Catch::Approx(0.25).margin(1e-5));
}

TEST_CASE("flow shift bound obeys the shift identity", "[polytope][mu][prop]") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Mat b(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) b(i, j) = u(rng);
        auto p = trial % 2 == 0 ? cross_polytope() : square();
        double base = mu_shift(p, {b}).mu;
        double t = 0.5 + trial * 0.1;
        Mat shifted = b + t * Mat::identity(2);
        REQUIRE(mu_shift(p, {shifted}).mu == Catch::Approx(base + t).margin(1e-6));
    }
}

TEST_CASE("flow shift bound input validation", "[polytope][mu]") {
    REQUIRE_THROWS_AS(mu_shift(cross_polytope(), {}), std::invalid_argument);
    REQUIRE_THROWS_AS(mu_shift(cross_polytope(), {Mat::identity(3)}), std::invalid_argument);
    REQUIRE_THROWS_AS(mu_shift(cross_polytope(), {Mat::identity(2)}, -1.0),
                      std::invalid_argument);
}

TEST_CASE("json round trip preserves the polytope", "[polytope][io]") {
    SymPolytope p{2, {{1.0, 0.25}, {-0.125, 1.0}, {0.75, -0.5}}};
    auto q = polytope_from_json(polytope_to_json(p));
    REQUIRE(q.dim == p.dim);
    REQUIRE(q.vertices.size() == p.vertices.size());
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Vec x{u(rng), u(rng)};
        REQUIRE(polytope_norm(q, x) == Catch::Approx(polytope_norm(p, x)).margin(1e-12));
    }
    REQUIRE_THROWS_AS(polytope_from_json("{\"dim\": 2}"), std::invalid_argument);
    REQUIRE_THROWS_AS(polytope_from_json("not json"), std::invalid_argument);
}

TEST_CASE("svg output marks every vertex pair", "[polytope][io]") {
    SymPolytope p{2, {{1.0, 0.0}, {0.0, 1.0}, {0.8, 0.8}}};
    std::string svg = polytope_to_svg(p);
    REQUIRE(svg.find("<svg") != std::string::npos);
    REQUIRE(svg.find("<polygon") != std::string::npos);
    REQUIRE(count_occurrences(svg, "<circle") == 6);  // both signs of 3 vertices
    REQUIRE(svg.find(">v0<") != std::string::npos);
    REQUIRE(svg.find(">-v2<") != std::string::npos);
    REQUIRE_THROWS_AS(polytope_to_svg(SymPolytope{3, {{1.0, 0.0, 0.0}}}),
                      std::invalid_argument);
}
