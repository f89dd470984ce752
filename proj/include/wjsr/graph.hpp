#pragma once

#include <string>
#include <vector>

#include "wjsr/ipa.hpp"
#include "wjsr/polytope.hpp"
#include "wjsr/weighted.hpp"

namespace wjsr {

// Switching system on a strongly connected multigraph: each vertex carries
// a state space, each edge an operator from its tail space to its head
// space together with the time the transition consumes. Only operator
// products along paths are admissible, which models constrained switching.
struct GraphEdge {
    int from = 0;
    int to = 0;
    Mat op{0, 0};        // rows = dim(to), cols = dim(from)
    double weight = 0.0; // strictly positive
    std::string label;   // optional
};

struct GraphSystem {
    std::vector<int> dims;                      // per-vertex dimension
    std::vector<GraphEdge> edges;
    std::vector<std::vector<Mat>> generators;   // per-vertex flow families,
                                                // empty or one list per vertex

    int vertex_count() const { return int(dims.size()); }
    void validate() const;  // shapes, weights, strong connectivity
};

// Edge-index sequence in traversal order: edges[0] is applied first, so the
// composed operator is op(e_k) * ... * op(e_0).
struct GraphPath {
    std::vector<int> edges;
    Mat op{0, 0};
    double total_weight = 0.0;
    bool closed = false;

    int tail(const GraphSystem& gs) const;  // start vertex
    int head(const GraphSystem& gs) const;  // end vertex
};

GraphPath path_of(const GraphSystem& gs, const std::vector<int>& edges);

// Closed-path canonical form: collapse repetitions, then root the cycle at
// its least vertex, breaking ties by the least edge-index sequence.
std::vector<int> canonical_closed_path(const GraphSystem& gs,
                                       const std::vector<int>& edges);

// Exhaustive maximum of |op(path)|^(1/weight) over all length-k paths.
struct GraphRadiusSample {
    double value = 0.0;
    std::vector<int> path;  // traversal order
};
GraphRadiusSample graph_rho_k_exact(const GraphSystem& gs, int k,
                                    long max_paths = 10'000'000);

// Block-matrix embedding: one (sum d_i)^2 matrix per edge, zero outside the
// (to, from) block. Products of lifted matrices vanish unless the edges
// concatenate into a path, so weighted-system machinery applies unchanged.
WeightedSystem lift(const GraphSystem& gs);

struct GraphCandidate {
    GraphPath path;            // canonical closed path
    double rho_c = 0.0;        // averaged spectral value
    Vec v0;                    // leading eigenvector at the path's tail
    bool spectral_ok = false;
};

GraphCandidate make_graph_candidate(const GraphSystem& gs,
                                    const std::vector<int>& edges);
std::vector<GraphCandidate> find_graph_candidates(const GraphSystem& gs,
                                                  int max_len = 64,
                                                  long max_nodes = 2'000'000);

// One symmetric polytope per vertex; unit balls of a family of norms.
struct Multinorm {
    std::vector<SymPolytope> parts;
};

struct GraphIpaResult {
    IpaStatus status = IpaStatus::budget_exceeded;
    GraphCandidate candidate;
    Multinorm multinorm;
    int rounds = 0;
    double eps_extremal = 0.0;
    std::vector<double> growth;  // max image norm per round
};

// Invariant-polytope construction on the graph: edge operators are scaled
// by rho_c^-weight, the candidate cycle seeds every vertex it visits, and
// vertex sets grow along outgoing edges until nothing new appears.
GraphIpaResult graph_ipa(const GraphSystem& gs, const GraphCandidate& cand,
                         const IpaOptions& opt = {});

// Construction over a prepared candidate list, best first; candidates tied
// in value seed a single run together.
GraphIpaResult graph_invariant_polytope_from(
    const GraphSystem& gs, const std::vector<GraphCandidate>& cands,
    const IpaOptions& opt = {});

// Candidate search plus construction, best candidate first.
GraphIpaResult graph_invariant_polytope(const GraphSystem& gs,
                                        const IpaOptions& opt = {});

// Largest exponent overshoot over all edges: max over edges e and vertices
// v of log(|rho^-w op(e) v|_{P_head}) / w. Zero up to LP tolerance for an
// extremal multinorm.
double measure_multinorm_eps(const GraphSystem& gs, const Multinorm& mn,
                             double rho);

// Edge images satisfy |op(e) v|_{P_head} <= e^{w eps} rho^w + 1e-12, and,
// where per-vertex generators exist, flows satisfy
// mu_shift(P_i, B_i) <= log(rho) + eps + 1e-12.
bool verify_multinorm(const GraphSystem& gs, const Multinorm& mn, double rho,
                      double eps);

}  // namespace wjsr
