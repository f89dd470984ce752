#pragma once

#include <limits>
#include <string>
#include <vector>

#include "wjsr/matrix.hpp"

namespace wjsr {

// Finite family of matrices with positive weights. The weighted spectral
// radius is the limit over word length of the maximal value of
//   ||A_{i_k} ... A_{i_1}||^(1 / (alpha_{i_1} + ... + alpha_{i_k})).
// Unit weights recover the classical joint spectral radius.
struct WeightedSystem {
    std::vector<Mat> matrices;
    Vec weights;                      // all strictly positive
    std::vector<std::string> labels;  // optional; defaults to "1","2",...

    int dim() const;
    void validate() const;
    std::string label(int i) const;
};

// A word of generator indices in product order: word.front() is the
// leftmost factor, i.e. the one applied last.
struct WeightedProduct {
    std::vector<int> word;
    Mat matrix{0, 0};
    double total_weight = 0.0;
};

WeightedProduct product_of(const WeightedSystem& sys,
                           const std::vector<int>& word);

// Averaged spectral value rho(P)^(1/weight) of a word's product.
double averaged_spectral_value(const WeightedSystem& sys,
                               const std::vector<int>& word);

// Collapse repetitions (z^j -> z) and rotate to the lexicographically
// least form. Words related by rotation or repetition have equal
// averaged spectral value.
std::vector<int> canonical_cycle(const std::vector<int>& word);

// Family (lambda^{alpha_i} A_i): scales the weighted radius by lambda.
WeightedSystem dilate(const WeightedSystem& sys, double lambda);

// Exhaustive sweep over all words of length exactly k: the maximum of
// |A(k)...A(1)|^(1/total weight), a one-sided sample converging to the
// weighted radius from above along the subadditive envelope.
struct RadiusSample {
    double value = 0.0;       // max averaged norm at length k
    std::vector<int> word;    // attaining word (lexicographically least on ties)
};
RadiusSample rho_k_exact(const WeightedSystem& sys, int k);        // parallel
RadiusSample rho_k_exact_serial(const WeightedSystem& sys, int k); // reference

// Branch-and-bound bracket for the weighted radius.
struct GripenbergOptions {
    double eps = 1e-8;           // absolute gap target on the radius
    long max_nodes = 2'000'000;  // search budget
    int max_depth = 64;
};
struct JsrBracket {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    std::vector<int> witness;  // canonical word attaining lower
    bool converged = false;    // upper - lower <= eps proven
    long nodes = 0;
};
JsrBracket gripenberg(const WeightedSystem& sys,
                      const GripenbergOptions& opt = {});

// Best candidate cycles for an extremal-norm construction: the top
// distinct canonical words by averaged spectral value seen during a
// converged (or budget-limited) branch-and-bound run.
struct CandidateSearch {
    std::vector<std::vector<int>> words;  // best first
    double value = 0.0;                   // value of words.front()
    bool budget_exhausted = false;
};
CandidateSearch find_candidate_words(const WeightedSystem& sys,
                                     int max_len = 64,
                                     long max_nodes = 2'000'000,
                                     int keep = 8);

// Which side of 1 the weighted radius lies on. Uses one-letter bounds,
// then branch-and-bound, then diagonally rescaled retries (any fixed
// similarity induces a valid norm, so the resulting brackets are sound).
enum class RadiusSide { below_one, above_one, unknown };
RadiusSide classify(const WeightedSystem& sys, long budget_nodes = 200000);

// The weighted radius is the unique r > 0 where the family scaled by 1/r
// crosses radius 1 (zero for nilpotent-like families). Bisection on r.
struct BisectionOptions {
    double tol = 1e-9;  // relative bracket width target
    long budget_nodes = 200000;
    int max_probes = 200;
};
struct BisectionResult {
    double lower = 0.0;
    double upper = 0.0;
    bool converged = false;
    int probes = 0;
};
BisectionResult wjsr_bisection(const WeightedSystem& sys,
                               const BisectionOptions& opt = {});

}  // namespace wjsr
