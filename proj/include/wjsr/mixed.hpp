#pragma once

#include <string>
#include <vector>

#include "wjsr/ipa.hpp"
#include "wjsr/weighted.hpp"

namespace wjsr {

// Hybrid linear system: discrete jumps x(b_i) = A x(a_i), each occupying a
// "dark" interval of length alpha, interleaved with continuous flows
// x' = B x from a finite set of generators. The Lyapunov exponent measures
// worst-case growth against the global clock, dark intervals included.
struct MixedSystem {
    std::vector<Mat> jumps;       // A_1..A_m
    Vec jump_weights;             // alpha_1..alpha_m, strictly positive
    std::vector<Mat> generators;  // B_1..B_M; may be empty

    int dim() const;
    void validate() const;
};

// Discretization: keep the jumps, replace each flow by its time-tau step
// e^{tau B} with weight tau. Lower bounds computed on the result transfer
// to the mixed system because every discretized trajectory is admissible.
struct Discretized {
    WeightedSystem system;
    std::vector<int> jump_of;  // per mode: jump index, or -1
    std::vector<int> flow_of;  // per mode: generator index, or -1
    double tau = 0.0;
};
Discretized discretize(const MixedSystem& ms, double tau);

// Growth-rate lower bound log(rho(P))^(1/weight) of a closed product, in
// natural-log scale. -infinity when the product is nilpotent.
double beta_of(const WeightedProduct& product);

// Shifted system (e^{t alpha_i} A_i, alpha_i, B_j + t I): every trajectory
// is multiplied by e^{t s} at time s, so the Lyapunov exponent moves by
// exactly t. Used as a consistency oracle.
MixedSystem shift(const MixedSystem& ms, double t);

struct LyapunovOptions {
    int max_len = 64;            // candidate word length cap
    long max_nodes = 2'000'000;  // candidate search budget
    double delta = 1e-4;         // flow-shift LP step
    IpaOptions ipa;
};

struct BoundsReport {
    double beta = 0.0;       // lower bound on the Lyapunov exponent
    double mu = 0.0;         // upper bound (valid only if mu_valid)
    bool mu_valid = false;
    double rho = 0.0;        // e^beta, the weighted radius scale
    double tau = 0.0;
    std::vector<int> witness;  // canonical mode word in the discretized family
    double eps_extremal = 0.0; // measured polytope slack (exponent scale)
    double mu_flow = 0.0;      // smallest shift making all flows point inward
    IpaStatus status = IpaStatus::budget_exceeded;
    int rounds = 0;
    SymPolytope polytope;      // certificate for the scaled discretized family
};

// beta from the best closed product of the discretization; mu from the
// polytope certificate: jumps grow at most at rate beta + eps under the
// polytope norm, flows at most at rate mu_flow, so
//   sigma <= mu = max(mu_flow, beta + eps).
BoundsReport lyapunov_bounds(const MixedSystem& ms, double tau,
                             const LyapunovOptions& opt = {});

// Piecewise timeline: jumps occupy their alpha-length dark interval,
// flows run for the given duration.
struct SwitchEvent {
    enum class Kind { jump, flow };
    Kind kind = Kind::flow;
    int mode = 0;            // index into jumps or generators
    double duration = 0.0;   // flow time; ignored for jumps (alpha applies)
};
struct SwitchingLaw {
    std::vector<SwitchEvent> events;
};

struct TrajectorySample {
    double t = 0.0;
    Vec x;
    bool active = true;  // false inside dark intervals (interpolated)
};

// Exact flow integration via the matrix exponential; jump intervals are
// linearly interpolated for plotting and marked inactive.
std::vector<TrajectorySample> simulate(const MixedSystem& ms,
                                       const SwitchingLaw& law, const Vec& x0,
                                       double sample_dt);

}  // namespace wjsr
