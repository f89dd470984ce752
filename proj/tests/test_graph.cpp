#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "wjsr/graph.hpp"

using namespace wjsr;

namespace {

// Two-vertex cycle with diagonal operators: the only closed paths are
// powers of the cycle, whose product is diag(1, 0.5).
GraphSystem two_cycle() {
    GraphSystem gs;
    gs.dims = {2, 2};
    gs.edges.push_back({0, 1, Mat{{0.5, 0.0}, {0.0, 1.0}}, 1.0, "B"});
    gs.edges.push_back({1, 0, Mat{{2.0, 0.0}, {0.0, 0.5}}, 1.0, "A"});
    return gs;
}

// Single vertex with one self-loop per matrix: path products are exactly the
// unconstrained products, so graph quantities must match the plain ones.
GraphSystem loop_graph(const WeightedSystem& sys) {
    GraphSystem gs;
    gs.dims = {sys.dim()};
    for (size_t i = 0; i < sys.matrices.size(); ++i)
        gs.edges.push_back({0, 0, sys.matrices[i], sys.weights[i], sys.label(int(i))});
    return gs;
}

WeightedSystem random_system(std::mt19937& rng, int n, int m) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> w(0.5, 2.0);
    WeightedSystem sys;
    for (int a = 0; a < m; ++a) {
        Mat mat(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) mat(i, j) = u(rng);
        sys.matrices.push_back(mat);
        sys.weights.push_back(w(rng));
    }
    return sys;
}

}  // namespace

TEST_CASE("graph validation", "[graph]") {
    auto gs = two_cycle();
    REQUIRE_NOTHROW(gs.validate());

    GraphSystem one_way;
    one_way.dims = {2, 2};
    one_way.edges.push_back({0, 1, Mat::identity(2), 1.0, ""});
    REQUIRE_THROWS_AS(one_way.validate(), std::invalid_argument);  // not strongly connected

    GraphSystem bad_shape = two_cycle();
    bad_shape.edges[0].op = Mat::identity(3);
    REQUIRE_THROWS_AS(bad_shape.validate(), std::invalid_argument);

    GraphSystem bad_weight = two_cycle();
    bad_weight.edges[1].weight = 0.0;
    REQUIRE_THROWS_AS(bad_weight.validate(), std::invalid_argument);

    GraphSystem bad_flows = two_cycle();
    bad_flows.generators = {{Mat::identity(2)}};  // only one family for two vertices
    REQUIRE_THROWS_AS(bad_flows.validate(), std::invalid_argument);
}

TEST_CASE("path composition and endpoints", "[graph]") {
    auto gs = two_cycle();
    auto p = path_of(gs, {0, 1});  // edge 0 first: op = A * B
    REQUIRE(p.tail(gs) == 0);
    REQUIRE(p.head(gs) == 0);
    REQUIRE(p.closed);
    REQUIRE(p.total_weight == Catch::Approx(2.0));
    REQUIRE(p.op(0, 0) == Catch::Approx(1.0));
    REQUIRE(p.op(1, 1) == Catch::Approx(0.5));

    auto open_path = path_of(gs, {0});
    REQUIRE(open_path.tail(gs) == 0);
    REQUIRE(open_path.head(gs) == 1);
    REQUIRE_FALSE(open_path.closed);

    REQUIRE_THROWS_AS(path_of(gs, {0, 0}), std::invalid_argument);  // does not concatenate
    REQUIRE_THROWS_AS(path_of(gs, std::vector<int>{}), std::invalid_argument);
    REQUIRE_THROWS_AS(path_of(gs, {7}), std::invalid_argument);
}

TEST_CASE("closed paths canonicalize to a rooted cycle", "[graph]") {
    auto gs = two_cycle();
    // Both rotations of the 2-cycle root at vertex 0.
    REQUIRE(canonical_closed_path(gs, {0, 1}) == std::vector<int>{0, 1});
    REQUIRE(canonical_closed_path(gs, {1, 0}) == std::vector<int>{0, 1});
    // Repetitions collapse.
    REQUIRE(canonical_closed_path(gs, {0, 1, 0, 1}) == std::vector<int>{0, 1});
    REQUIRE_THROWS_AS(canonical_closed_path(gs, {0}), std::invalid_argument);

    // Parallel self-loops break ties by edge index.
    WeightedSystem sys;
    sys.matrices = {Mat::identity(2), Mat::identity(2)};
    sys.weights = {1.0, 1.0};
    auto lg = loop_graph(sys);
    REQUIRE(canonical_closed_path(lg, {1, 0}) == std::vector<int>{0, 1});
}

TEST_CASE("cycle radius of the two-vertex fixture", "[graph]") {
    auto gs = two_cycle();
    auto r2 = graph_rho_k_exact(gs, 2);
    REQUIRE(r2.value >= 1.0 - 1e-12);

    // Only even lengths close; at every even k the best closed value is 1,
    // but open paths can contribute norm only, and the norm of diag blocks
    // is what the sweep reports. All values upper-bound the radius 1.
    for (int k : {2, 4, 6}) {
        auto s = graph_rho_k_exact(gs, k);
        REQUIRE(s.value >= 1.0 - 1e-12);
        REQUIRE(s.value <= 1.1);
    }

    auto cand = make_graph_candidate(gs, {0, 1});
    REQUIRE(cand.spectral_ok);
    REQUIRE(cand.rho_c == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(cand.path.edges == std::vector<int>{0, 1});

    REQUIRE_THROWS_AS(graph_rho_k_exact(gs, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(graph_rho_k_exact(gs, 8, 3), std::runtime_error);  // path budget
}

TEST_CASE("multinorm certificate on the two-vertex fixture", "[graph][ipa]") {
    auto gs = two_cycle();
    auto res = graph_invariant_polytope(gs);
    REQUIRE(res.status == IpaStatus::converged);
    REQUIRE(res.candidate.rho_c == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(res.multinorm.parts.size() == 2);
    for (const auto& part : res.multinorm.parts) {
        REQUIRE(part.dim == 2);
        REQUIRE(part.spanning());
    }
    REQUIRE(std::abs(res.eps_extremal) <= 1e-8);
    REQUIRE(verify_multinorm(gs, res.multinorm, res.candidate.rho_c, 1e-9));
    REQUIRE(measure_multinorm_eps(gs, res.multinorm, res.candidate.rho_c) <= 1e-9);

    // Edge-wise invariance, stated directly: images of tail vertices stay
    // inside the head ball after scaling.
    for (const auto& e : gs.edges) {
        double scale = std::pow(res.candidate.rho_c, -e.weight);
        for (const auto& v : res.multinorm.parts[e.from].vertices) {
            Vec img = mat_vec(e.op, v);
            for (double& c : img) c *= scale;
            REQUIRE(polytope_norm(res.multinorm.parts[e.to], img) <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("perturbed multinorms fail verification", "[graph][ipa]") {
    auto gs = two_cycle();
    auto res = graph_invariant_polytope(gs);
    REQUIRE(res.status == IpaStatus::converged);

    auto shrunk = res.multinorm;
    for (auto& v : shrunk.parts[0].vertices)
        for (double& c : v) c *= 0.9;
    REQUIRE(measure_multinorm_eps(gs, shrunk, res.candidate.rho_c) > 1e-6);
    REQUIRE_FALSE(verify_multinorm(gs, shrunk, res.candidate.rho_c, 0.0));

    // A too-optimistic radius also fails.
    REQUIRE_FALSE(verify_multinorm(gs, res.multinorm, 0.9 * res.candidate.rho_c, 0.0));
}

TEST_CASE("single-vertex graphs match the unconstrained machinery", "[graph][prop]") {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        auto sys = random_system(rng, 2 + trial % 2, 2);
        auto gs = loop_graph(sys);
        for (int k : {1, 2, 4}) {
            auto a = rho_k_exact(sys, k);
            auto b = graph_rho_k_exact(gs, k);
            REQUIRE(b.value == Catch::Approx(a.value).margin(1e-9 * std::max(1.0, a.value)));
        }
    }
}

TEST_CASE("lifting embeds paths as block products", "[graph]") {
    auto gs = two_cycle();
    auto lifted = lift(gs);
    REQUIRE(lifted.matrices.size() == 2);
    REQUIRE(lifted.matrices[0].rows() == 4);
    REQUIRE(lifted.weights[0] == Catch::Approx(1.0));

    // Concatenating product: nonzero exactly in the (to=0, from=0) block and
    // equal to the cycle operator there.
    Mat prod = lifted.matrices[1] * lifted.matrices[0];  // A after B
    REQUIRE(prod(0, 0) == Catch::Approx(1.0));
    REQUIRE(prod(1, 1) == Catch::Approx(0.5));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (!(i < 2 && j < 2)) REQUIRE(prod(i, j) == Catch::Approx(0.0).margin(1e-15));

    // Non-concatenating product vanishes entirely.
    Mat dead = lifted.matrices[0] * lifted.matrices[0];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) REQUIRE(dead(i, j) == Catch::Approx(0.0).margin(1e-15));

    // The lifted weighted radius matches the graph radius: closed-path
    // products survive, everything else is nilpotent.
    auto cand = find_candidates(lifted, 8, 100000);
    REQUIRE_FALSE(cand.empty());
    REQUIRE(cand.front().rho_c == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("graph candidates rank the extremal cycle first", "[graph]") {
    auto gs = two_cycle();
    auto cands = find_graph_candidates(gs);
    REQUIRE_FALSE(cands.empty());
    REQUIRE(cands.front().rho_c == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(cands.front().path.closed);
    REQUIRE(cands.front().path.edges == std::vector<int>{0, 1});
}
