#pragma once

#include <vector>

#include "wjsr/polytope.hpp"
#include "wjsr/weighted.hpp"

namespace wjsr {

// Candidate extremal cycle. If the polytope construction below converges
// for it, the cycle attains the weighted radius exactly.
struct Candidate {
    WeightedProduct product;   // canonical cycle
    double rho_c = 0.0;        // averaged spectral value of the cycle
    Vec v0;                    // leading eigenvector of the cycle product
    bool spectral_ok = false;  // real leading eigenvalue, simple and isolated
};

Candidate make_candidate(const WeightedSystem& sys,
                         const std::vector<int>& word);

// Best cycles first, from a branch-and-bound sweep.
std::vector<Candidate> find_candidates(const WeightedSystem& sys,
                                       int max_len = 64,
                                       long max_nodes = 2'000'000);

enum class IpaStatus {
    converged,                       // invariant spanning polytope found
    budget_exceeded,                 // rounds or vertex cap hit
    degenerate_leading_eigenvalue,   // candidate unusable as a seed
    reducible_detected,              // vertex span refuses to fill R^d
};

struct IpaOptions {
    int max_rounds = 200;
    int max_vertices = 20000;
    double eta = 1e-10;     // interiority margin for discarding images
    double dup_tol = 1e-8;  // relative vertex-duplicate tolerance
    bool parallel = true;   // batch the norm evaluations
};

struct IpaResult {
    IpaStatus status = IpaStatus::budget_exceeded;
    Candidate candidate;
    SymPolytope polytope;        // invariant under the scaled family on
                                 // success; largest vertex has unit 2-norm
    int rounds = 0;
    double eps_extremal = 0.0;   // measured exponent overshoot (signed)
    std::vector<double> growth;  // max image norm per round
};

// Builds a polytope invariant under (rho_c^-alpha_i A_i) starting from the
// candidate's leading eigenvector. On convergence the polytope norm
// certifies that the weighted radius equals rho_c up to LP tolerance.
IpaResult run_ipa(const WeightedSystem& sys, const Candidate& cand,
                  const IpaOptions& opt = {});

// Candidate search plus construction, trying candidates best-first.
IpaResult invariant_polytope(const WeightedSystem& sys,
                             const IpaOptions& opt = {});

// Construction over a precomputed candidate list, best first. Usable
// candidates whose values tie within relative 1e-10 seed one run together:
// when several cycles maximize, an invariant polytope must contain every
// leading eigenvector, so starting from all of them is what converges.
IpaResult invariant_polytope_from(const WeightedSystem& sys,
                                  const std::vector<Candidate>& cands,
                                  const IpaOptions& opt = {});

// max_i max_v log(|A_i v|_P) / alpha_i over the scaled family: zero (up to
// solver tolerance) when P is exactly invariant.
double measure_eps_extremal(const WeightedSystem& scaled, const SymPolytope& p);

// Every vertex image satisfies |A_i v|_P <= exp(alpha_i * eps) + 1e-12.
bool verify_invariant(const WeightedSystem& scaled, const SymPolytope& p,
                      double eps);

}  // namespace wjsr
