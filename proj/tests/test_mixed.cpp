#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "wjsr/mixed.hpp"

using namespace wjsr;

namespace {

// Planar hybrid system: one rotational jump of weight 1, two spiral
// generators. The time-1 discretization has a length-5 extremal cycle.
MixedSystem spiral_system() {
    MixedSystem ms;
    ms.jumps = {Mat{{0.0, -1.4}, {1.4, 0.0}}};
    ms.jump_weights = {1.0};
    ms.generators = {Mat{{0.34657359027997264, 0.78539816339744828},
                         {-0.78539816339744828, 0.34657359027997264}},
                     Mat{{0.60459978807807269, 1.2091995761561454},
                         {-1.2091995761561454, -0.60459978807807269}}};
    return ms;
}

const BoundsReport& spiral_report() {
    static const BoundsReport rep = lyapunov_bounds(spiral_system(), 1.0);
    return rep;
}

MixedSystem random_mixed(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    MixedSystem ms;
    Mat a(2, 2), b(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            a(i, j) = u(rng);
            b(i, j) = u(rng);
        }
    ms.jumps = {a};
    ms.jump_weights = {1.0};
    ms.generators = {b};
    return ms;
}

double entrywise_diff(const MixedSystem& a, const MixedSystem& b) {
    double d = 0.0;
    for (size_t k = 0; k < a.jumps.size(); ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                d = std::max(d, std::abs(a.jumps[k](i, j) - b.jumps[k](i, j)));
    for (size_t k = 0; k < a.generators.size(); ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                d = std::max(d, std::abs(a.generators[k](i, j) - b.generators[k](i, j)));
    return d;
}

}  // namespace

TEST_CASE("mixed system validation", "[mixed]") {
    auto ms = spiral_system();
    REQUIRE_NOTHROW(ms.validate());
    REQUIRE(ms.dim() == 2);

    MixedSystem empty;
    REQUIRE_THROWS_AS(empty.validate(), std::invalid_argument);

    MixedSystem jumps_only;
    jumps_only.jumps = {Mat::identity(2)};
    jumps_only.jump_weights = {1.0};
    REQUIRE_NOTHROW(jumps_only.validate());

    MixedSystem flows_only;
    flows_only.generators = {Mat::identity(2)};
    REQUIRE_NOTHROW(flows_only.validate());

    MixedSystem bad = spiral_system();
    bad.jump_weights = {0.0};
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

    MixedSystem ragged = spiral_system();
    ragged.generators.push_back(Mat::identity(3));
    REQUIRE_THROWS_AS(ragged.validate(), std::invalid_argument);
}

TEST_CASE("discretization keeps jumps and exponentiates flows", "[mixed]") {
    auto ms = spiral_system();
    auto dz = discretize(ms, 1.0);
    REQUIRE(dz.system.matrices.size() == 3);
    REQUIRE(dz.tau == 1.0);
    REQUIRE(dz.jump_of == std::vector<int>{0, -1, -1});
    REQUIRE(dz.flow_of == std::vector<int>{-1, 0, 1});
    REQUIRE(dz.system.weights[0] == Catch::Approx(1.0));
    REQUIRE(dz.system.weights[1] == Catch::Approx(1.0));
    REQUIRE(dz.system.weights[2] == Catch::Approx(1.0));

    Mat e1 = expm(ms.generators[0]);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            REQUIRE(dz.system.matrices[1](i, j) == Catch::Approx(e1(i, j)).margin(1e-13));

    // Fractional step: weight tau and e^{tau B}.
    auto dz4 = discretize(ms, 0.4);
    REQUIRE(dz4.system.weights[1] == Catch::Approx(0.4));
    Mat e04 = expm(ms.generators[0], 0.4);
    REQUIRE(dz4.system.matrices[1](0, 0) == Catch::Approx(e04(0, 0)).margin(1e-13));

    // No flows: the discretization is the jump family itself.
    MixedSystem jumps_only;
    jumps_only.jumps = {Mat{{1.0, 1.0}, {0.0, 1.0}}, Mat{{0.8, 0.0}, {0.8, 0.8}}};
    jumps_only.jump_weights = {1.0, 2.0};
    auto dj = discretize(jumps_only, 0.7);
    REQUIRE(dj.system.matrices.size() == 2);
    REQUIRE(dj.system.weights[1] == Catch::Approx(2.0));

    REQUIRE_THROWS_AS(discretize(ms, 0.0), std::invalid_argument);
}

TEST_CASE("growth rate of a closed product", "[mixed]") {
    WeightedProduct p;
    p.word = {0};
    p.matrix = std::exp(1.0) * Mat::identity(2);
    p.total_weight = 1.0;
    REQUIRE(beta_of(p) == Catch::Approx(1.0).epsilon(1e-12));

    p.total_weight = 2.0;
    REQUIRE(beta_of(p) == Catch::Approx(0.5).epsilon(1e-12));

    WeightedProduct nil;
    nil.word = {0};
    nil.matrix = Mat{{0.0, 1.0}, {0.0, 0.0}};
    nil.total_weight = 1.0;
    REQUIRE(beta_of(nil) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("bounds for the spiral system at step one", "[mixed][pipeline]") {
    const auto& rep = spiral_report();
    REQUIRE(rep.status == IpaStatus::converged);
    REQUIRE(rep.witness == std::vector<int>{0, 1, 2, 0, 2});
    REQUIRE(rep.beta == Catch::Approx(0.38).margin(5e-3));
    REQUIRE(rep.rho == Catch::Approx(std::exp(rep.beta)).epsilon(1e-12));
    REQUIRE(rep.polytope.vertices.size() == 8);
    REQUIRE(rep.mu_valid);
    REQUIRE(rep.beta <= rep.mu + 1e-9);
    REQUIRE(rep.mu == Catch::Approx(0.812065636115692).margin(1e-9));
    REQUIRE(rep.mu >= rep.mu_flow - 1e-12);
    REQUIRE(std::abs(rep.eps_extremal) <= 1e-8);

    // beta is the averaged log growth of the witness cycle.
    auto dz = discretize(spiral_system(), 1.0);
    REQUIRE(rep.beta ==
            Catch::Approx(std::log(averaged_spectral_value(dz.system, rep.witness)))
                .epsilon(1e-12));
}

TEST_CASE("no flows reduces the bounds to the weighted radius", "[mixed][pipeline]") {
    MixedSystem ms;
    ms.jumps = {Mat{{1.0, 1.0}, {0.0, 1.0}}, Mat{{0.8, 0.0}, {0.8, 0.8}}};
    ms.jump_weights = {1.0, 2.0};
    auto rep = lyapunov_bounds(ms, 1.0);
    REQUIRE(rep.status == IpaStatus::converged);
    REQUIRE(rep.rho == Catch::Approx(1.314496347291999).margin(1e-9));
    REQUIRE(rep.beta == Catch::Approx(std::log(1.314496347291999)).margin(1e-9));
    REQUIRE(rep.mu_valid);
    // Without flow modes the upper bound collapses onto beta + eps.
    REQUIRE(rep.mu == Catch::Approx(rep.beta).margin(1e-8));
}

TEST_CASE("shift acts additively on systems", "[mixed][shift]") {
    auto ms = spiral_system();
    REQUIRE(entrywise_diff(shift(ms, 0.0), ms) == 0.0);

    auto twice = shift(shift(ms, 0.2), 0.3);
    auto once = shift(ms, 0.5);
    REQUIRE(entrywise_diff(twice, once) <= 1e-12);

    auto s = shift(ms, -0.5);
    REQUIRE(s.jumps[0](1, 0) == Catch::Approx(std::exp(-0.5) * 1.4).epsilon(1e-12));
    REQUIRE(s.generators[0](0, 0) ==
            Catch::Approx(ms.generators[0](0, 0) - 0.5).epsilon(1e-12));
    REQUIRE(s.generators[0](0, 1) == Catch::Approx(ms.generators[0](0, 1)).epsilon(1e-12));
}

TEST_CASE("both bounds move by exactly the shift", "[mixed][shift][pipeline]") {
    const auto& base = spiral_report();
    auto shifted = lyapunov_bounds(shift(spiral_system(), -0.5), 1.0);
    REQUIRE(shifted.status == IpaStatus::converged);
    REQUIRE(shifted.beta == Catch::Approx(base.beta - 0.5).margin(1e-6));
    REQUIRE(shifted.mu == Catch::Approx(base.mu - 0.5).margin(1e-6));
    REQUIRE(shifted.witness == base.witness);
}

TEST_CASE("shift identity on random systems", "[mixed][shift][prop]") {
    std::mt19937 rng(19);
    LyapunovOptions opt;
    opt.max_len = 12;
    opt.max_nodes = 30000;
    opt.ipa.max_rounds = 40;
    for (int trial = 0; trial < 3; ++trial) {
        auto ms = random_mixed(rng);
        double t = trial % 2 == 0 ? 0.3 : -0.4;
        auto a = lyapunov_bounds(ms, 0.7, opt);
        auto b = lyapunov_bounds(shift(ms, t), 0.7, opt);
        REQUIRE(b.beta == Catch::Approx(a.beta + t).margin(1e-6));
        if (a.mu_valid && b.mu_valid)
            REQUIRE(b.mu == Catch::Approx(a.mu + t).margin(1e-6));
    }
}

TEST_CASE("sandwich order on random systems", "[mixed][prop]") {
    std::mt19937 rng(23);
    LyapunovOptions opt;
    opt.max_len = 12;
    opt.max_nodes = 30000;
    opt.ipa.max_rounds = 40;
    int valid = 0;
    for (int trial = 0; trial < 8; ++trial) {
        auto ms = random_mixed(rng);
        auto rep = lyapunov_bounds(ms, 0.5, opt);
        if (!rep.mu_valid) continue;
        ++valid;
        REQUIRE(rep.beta <= rep.mu + 1e-9);
        REQUIRE(rep.mu >= rep.mu_flow - 1e-12);
    }
    REQUIRE(valid >= 4);  // the pipeline certifies most of these
}

TEST_CASE("simulation flows exactly and interpolates dark intervals", "[mixed][simulate]") {
    MixedSystem ms;
    ms.jumps = {Mat{{0.0, -1.4}, {1.4, 0.0}}};
    ms.jump_weights = {1.0};
    ms.generators = {Mat{{0.0, -1.0}, {1.0, 0.0}}};

    SwitchingLaw law;
    law.events.push_back({SwitchEvent::Kind::flow, 0, 0.5});
    law.events.push_back({SwitchEvent::Kind::jump, 0, 0.0});

    auto tr = simulate(ms, law, {1.0, 0.0}, 0.25);
    REQUIRE(tr.size() == 7);  // horizon 1.5 at dt 0.25
    REQUIRE(tr[0].t == Catch::Approx(0.0));
    REQUIRE(tr[0].active);
    REQUIRE(tr[1].x[0] == Catch::Approx(std::cos(0.25)).margin(1e-12));
    REQUIRE(tr[1].x[1] == Catch::Approx(std::sin(0.25)).margin(1e-12));

    // Dark interval [0.5, 1.5]: interpolated, flagged inactive.
    REQUIRE_FALSE(tr[3].active);
    REQUIRE_FALSE(tr[5].active);
    Vec before = tr[2].x;
    Vec after = tr.back().x;
    REQUIRE(tr.back().t == Catch::Approx(1.5));
    REQUIRE(tr.back().active);
    REQUIRE(after[0] == Catch::Approx(-1.4 * before[1]).margin(1e-12));
    REQUIRE(after[1] == Catch::Approx(1.4 * before[0]).margin(1e-12));
    // Midpoint of the dark interval sits halfway between the endpoints.
    REQUIRE(tr[4].x[0] == Catch::Approx(0.5 * (before[0] + after[0])).margin(1e-12));

    // Zero generator: constant trajectory.
    MixedSystem still;
    still.generators = {Mat::zero(2, 2)};
    SwitchingLaw rest;
    rest.events.push_back({SwitchEvent::Kind::flow, 0, 1.0});
    auto ct = simulate(still, rest, {0.3, -0.7}, 0.2);
    for (const auto& s : ct) {
        REQUIRE(s.x[0] == Catch::Approx(0.3));
        REQUIRE(s.x[1] == Catch::Approx(-0.7));
        REQUIRE(s.active);
    }

    // Singular jump: the state reaches the origin and stays there.
    MixedSystem killer;
    killer.jumps = {Mat::zero(2, 2)};
    killer.jump_weights = {1.0};
    killer.generators = {Mat::identity(2)};
    SwitchingLaw kl;
    kl.events.push_back({SwitchEvent::Kind::jump, 0, 0.0});
    kl.events.push_back({SwitchEvent::Kind::flow, 0, 1.0});
    auto kt = simulate(killer, kl, {1.0, 2.0}, 0.5);
    REQUIRE(kt.back().x[0] == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(kt.back().x[1] == Catch::Approx(0.0).margin(1e-15));

    // Malformed laws.
    SwitchingLaw bad;
    bad.events.push_back({SwitchEvent::Kind::flow, 0, -1.0});
    REQUIRE_THROWS_AS(simulate(ms, bad, {1.0, 0.0}, 0.1), std::invalid_argument);
    SwitchingLaw out;
    out.events.push_back({SwitchEvent::Kind::flow, 5, 1.0});
    REQUIRE_THROWS_AS(simulate(ms, out, {1.0, 0.0}, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(simulate(ms, law, {1.0, 0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("extremal cycle trajectory grows at exactly beta", "[mixed][simulate][pipeline]") {
    const auto& rep = spiral_report();
    auto dz = discretize(spiral_system(), 1.0);
    auto prod = product_of(dz.system, rep.witness);
    auto eig = leading_eigenpair(prod.matrix);
    REQUIRE(eig.is_unique_simple);
    REQUIRE(eig.is_real);

    // Events of one period, in time order (rightmost factor acts first).
    SwitchingLaw law;
    for (int rep_count = 0; rep_count < 3; ++rep_count)
        for (auto it = rep.witness.rbegin(); it != rep.witness.rend(); ++it) {
            int mode = *it;
            if (dz.jump_of[mode] >= 0)
                law.events.push_back({SwitchEvent::Kind::jump, dz.jump_of[mode], 0.0});
            else
                law.events.push_back({SwitchEvent::Kind::flow, dz.flow_of[mode], 1.0});
        }

    auto tr = simulate(spiral_system(), law, eig.leading_vector, 0.5);
    double period = prod.total_weight;
    REQUIRE(tr.back().t == Catch::Approx(3.0 * period));
    double rate = (std::log(norm2(tr.back().x)) - std::log(norm2(tr.front().x))) /
                  (3.0 * period);
    REQUIRE(rate == Catch::Approx(rep.beta).margin(1e-9));
}

TEST_CASE("certified norm never grows along normalized trajectories", "[mixed][simulate][prop]") {
    const auto& rep = spiral_report();
    auto normalized = shift(spiral_system(), -rep.mu);

    std::mt19937 rng(29);
    std::uniform_real_distribution<double> dur(0.2, 1.2);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    std::uniform_int_distribution<int> gen(0, 1);
    std::uniform_int_distribution<int> kind(0, 3);

    for (int traj = 0; traj < 10; ++traj) {
        SwitchingLaw law;
        for (int e = 0; e < 6; ++e) {
            if (kind(rng) == 0)
                law.events.push_back({SwitchEvent::Kind::jump, 0, 0.0});
            else
                law.events.push_back({SwitchEvent::Kind::flow, gen(rng), dur(rng)});
        }
        Vec x0{coord(rng), coord(rng)};
        auto tr = simulate(normalized, law, x0, 0.05);
        double prev = polytope_norm(rep.polytope, tr.front().x);
        for (const auto& s : tr) {
            if (!s.active) continue;
            double cur = polytope_norm(rep.polytope, s.x);
            REQUIRE(cur <= prev * (1.0 + 1e-7) + 1e-12);
            prev = cur;
        }
    }
}
