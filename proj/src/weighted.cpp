#include "wjsr/weighted.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wjsr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// In-place lexicographic comparison that prefers shorter words on ties:
// used to keep attaining words deterministic across traversal orders.
bool word_less(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

}  // namespace

int WeightedSystem::dim() const {
    return matrices.empty() ? 0 : matrices.front().rows();
}

void WeightedSystem::validate() const {
    if (matrices.empty())
        throw std::invalid_argument("weighted system: no matrices");
    if (weights.size() != matrices.size())
        throw std::invalid_argument("weighted system: weight count mismatch");
    const int d = matrices.front().rows();
    for (const Mat& m : matrices) {
        if (m.rows() != d || m.cols() != d)
            throw std::invalid_argument("weighted system: matrices must be square, same size");
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (!std::isfinite(m(i, j)))
                    throw std::invalid_argument("weighted system: nonfinite entry");
    }
    for (double w : weights)
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("weighted system: weights must be positive");
    if (!labels.empty() && labels.size() != matrices.size())
        throw std::invalid_argument("weighted system: label count mismatch");
}

std::string WeightedSystem::label(int i) const {
    if (i < 0 || i >= int(matrices.size()))
        throw std::invalid_argument("weighted system: label index out of range");
    if (!labels.empty()) return labels[i];
    return std::to_string(i + 1);
}

WeightedProduct product_of(const WeightedSystem& sys,
                           const std::vector<int>& word) {
    sys.validate();
    if (word.empty()) throw std::invalid_argument("product_of: empty word");
    WeightedProduct p;
    p.word = word;
    p.matrix = Mat::identity(sys.dim());
    for (int idx : word) {
        if (idx < 0 || idx >= int(sys.matrices.size()))
            throw std::invalid_argument("product_of: index out of range");
        p.matrix = p.matrix * sys.matrices[idx];
        p.total_weight += sys.weights[idx];
    }
    return p;
}

double averaged_spectral_value(const WeightedSystem& sys,
                               const std::vector<int>& word) {
    WeightedProduct p = product_of(sys, word);
    return std::pow(spectral_radius(p.matrix), 1.0 / p.total_weight);
}

std::vector<int> canonical_cycle(const std::vector<int>& word) {
    if (word.empty()) return word;
    const int n = int(word.size());
    // Primitive root: the shortest period that tiles the word.
    int period = n;
    for (int p = 1; p < n; ++p) {
        if (n % p != 0) continue;
        bool tiles = true;
        for (int i = p; i < n && tiles; ++i) tiles = word[i] == word[i - p];
        if (tiles) {
            period = p;
            break;
        }
    }
    std::vector<int> root(word.begin(), word.begin() + period);
    // Least rotation by direct comparison (periods here are short).
    std::vector<int> best = root;
    std::vector<int> rot = root;
    for (int s = 1; s < period; ++s) {
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
        if (rot < best) best = rot;
    }
    return best;
}

WeightedSystem dilate(const WeightedSystem& sys, double lambda) {
    sys.validate();
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("dilate: lambda must be finite and nonnegative");
    WeightedSystem out = sys;
    for (size_t i = 0; i < out.matrices.size(); ++i)
        out.matrices[i] *= std::pow(lambda, out.weights[i]);
    return out;
}

namespace {

// Depth-first sweep of the subtree rooted at a fixed prefix.
void sweep_rec(const WeightedSystem& sys, int k, std::vector<int>& word,
               const Mat& prefix, double weight, RadiusSample& best) {
    if (int(word.size()) == k) {
        const double value = std::pow(operator_norm(prefix), 1.0 / weight);
        if (value > best.value ||
            (value == best.value && word_less(word, best.word))) {
            best.value = value;
            best.word = word;
        }
        return;
    }
    for (int j = 0; j < int(sys.matrices.size()); ++j) {
        word.push_back(j);
        sweep_rec(sys, k, word, prefix * sys.matrices[j],
                  weight + sys.weights[j], best);
        word.pop_back();
    }
}

RadiusSample rho_k_impl(const WeightedSystem& sys, int k, bool parallel) {
    sys.validate();
    if (k < 1) throw std::invalid_argument("rho_k_exact: k must be >= 1");
    const int m = int(sys.matrices.size());
    double count = 1.0;
    for (int i = 0; i < k; ++i) {
        count *= m;
        if (count > 1e7)
            throw std::invalid_argument("rho_k_exact: m^k exceeds enumeration guard");
    }
    std::vector<RadiusSample> per_root(m);
    per_root.assign(m, RadiusSample{-kInf, {}});
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel && k > 1)
#endif
    for (int j = 0; j < m; ++j) {
        std::vector<int> word{j};
        sweep_rec(sys, k, word, sys.matrices[j], sys.weights[j], per_root[j]);
    }
    (void)parallel;
    RadiusSample best{-kInf, {}};
    for (int j = 0; j < m; ++j) {
        if (per_root[j].value > best.value ||
            (per_root[j].value == best.value &&
             word_less(per_root[j].word, best.word)))
            best = per_root[j];
    }
    return best;
}

}  // namespace

RadiusSample rho_k_exact(const WeightedSystem& sys, int k) {
    return rho_k_impl(sys, k, true);
}

RadiusSample rho_k_exact_serial(const WeightedSystem& sys, int k) {
    return rho_k_impl(sys, k, false);
}

namespace {

// Slim search-tree arena: words are reconstructed by walking parents.
struct ArenaNode {
    int letter = -1;
    int parent = -1;
    int depth = 0;
};

struct HeapEntry {
    double avg_norm = 0.0;
    int arena = -1;
    Mat product{0, 0};
    double weight = 0.0;
    bool operator<(const HeapEntry& other) const {
        if (avg_norm != other.avg_norm) return avg_norm < other.avg_norm;
        return arena > other.arena;  // earlier nodes first on ties
    }
};

std::vector<int> arena_word(const std::vector<ArenaNode>& arena, int idx) {
    std::vector<int> w;
    for (int cur = idx; cur >= 0; cur = arena[cur].parent)
        w.push_back(arena[cur].letter);
    std::reverse(w.begin(), w.end());
    return w;
}

// Collects the best distinct cycles seen during the search.
struct CycleCollector {
    int keep = 8;
    std::vector<std::pair<double, std::vector<int>>> entries;  // value desc

    void offer(double value, const std::vector<int>& word, double floor) {
        if (value < floor) return;
        std::vector<int> canon = canonical_cycle(word);
        for (auto& e : entries) {
            if (e.second == canon) {
                e.first = std::max(e.first, value);
                return;
            }
        }
        entries.emplace_back(value, std::move(canon));
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return word_less(a.second, b.second);
                  });
        if (int(entries.size()) > 4 * keep) entries.resize(4 * keep);
    }
};

JsrBracket gripenberg_impl(const WeightedSystem& sys,
                           const GripenbergOptions& opt,
                           CycleCollector* collector) {
    sys.validate();
    if (!(opt.eps > 0.0))
        throw std::invalid_argument("gripenberg: eps must be positive");
    const int m = int(sys.matrices.size());

    JsrBracket out;
    std::vector<ArenaNode> arena;
    std::priority_queue<HeapEntry> heap;
    double lambda = 0.0;
    std::vector<int> witness;
    double deep_max = 0.0;  // nodes parked at the depth cap

    auto visit = [&](const Mat& prod, double weight, int arena_idx) {
        const double sp = std::pow(spectral_radius(prod), 1.0 / weight);
        // Reconstructing the word is O(depth); skip it for clearly
        // uncompetitive nodes, which is nearly all of them.
        const bool competitive =
            witness.empty() || sp >= lambda ||
            (collector && sp >= lambda * (1.0 - 1e-4));
        if (!competitive) return sp;
        const std::vector<int> w = arena_word(arena, arena_idx);
        if (witness.empty() || sp > lambda ||
            (sp == lambda &&
             word_less(canonical_cycle(w), canonical_cycle(witness)))) {
            if (sp > lambda) lambda = sp;
            witness = w;
        }
        if (collector) collector->offer(sp, w, lambda * (1.0 - 1e-4));
        return sp;
    };

    for (int j = 0; j < m; ++j) {
        arena.push_back({j, -1, 1});
        const int idx = int(arena.size()) - 1;
        visit(sys.matrices[j], sys.weights[j], idx);
        const double an =
            std::pow(operator_norm(sys.matrices[j]), 1.0 / sys.weights[j]);
        heap.push({an, idx, sys.matrices[j], sys.weights[j]});
    }

    long expanded = 0;
    while (!heap.empty()) {
        if (heap.top().avg_norm <= lambda + opt.eps) break;  // all below cut
        if (expanded >= opt.max_nodes) {
            out.lower = lambda;
            out.upper = std::max({lambda + opt.eps, heap.top().avg_norm, deep_max});
            out.witness = canonical_cycle(witness);
            out.converged = false;
            out.nodes = expanded;
            return out;
        }
        HeapEntry top = heap.top();
        heap.pop();
        if (arena[top.arena].depth >= opt.max_depth) {
            deep_max = std::max(deep_max, top.avg_norm);
            continue;
        }
        ++expanded;
        for (int j = 0; j < m; ++j) {
            Mat prod = top.product * sys.matrices[j];
            const double weight = top.weight + sys.weights[j];
            arena.push_back({j, top.arena, arena[top.arena].depth + 1});
            const int idx = int(arena.size()) - 1;
            visit(prod, weight, idx);
            const double an = std::pow(operator_norm(prod), 1.0 / weight);
            if (an > lambda + opt.eps)
                heap.push({an, idx, std::move(prod), weight});
        }
    }

    out.lower = lambda;
    out.upper = std::max(lambda + opt.eps, deep_max);
    out.witness = canonical_cycle(witness);
    out.converged = out.upper <= lambda + opt.eps * (1.0 + 1e-12);
    out.nodes = expanded;
    return out;
}

}  // namespace

JsrBracket gripenberg(const WeightedSystem& sys, const GripenbergOptions& opt) {
    return gripenberg_impl(sys, opt, nullptr);
}

CandidateSearch find_candidate_words(const WeightedSystem& sys, int max_len,
                                     long max_nodes, int keep) {
    CycleCollector collector;
    collector.keep = keep;
    GripenbergOptions opt;
    opt.eps = 1e-9;
    opt.max_nodes = max_nodes;
    opt.max_depth = max_len;
    JsrBracket bracket = gripenberg_impl(sys, opt, &collector);
    CandidateSearch out;
    out.budget_exhausted = !bracket.converged;
    out.value = bracket.lower;
    const double floor = bracket.lower * (1.0 - 1e-9) - 1e-15;
    for (const auto& e : collector.entries) {
        if (e.first >= floor) out.words.push_back(e.second);
        if (int(out.words.size()) >= keep) break;
    }
    // The bracket witness is always a valid candidate; make sure it leads.
    if (out.words.empty() ||
        !std::count(out.words.begin(), out.words.end(), bracket.witness)) {
        out.words.insert(out.words.begin(), bracket.witness);
        if (int(out.words.size()) > keep) out.words.resize(keep);
    }
    return out;
}

namespace {

// Orthonormal basis whose first column is v (Householder completion).
Mat basis_from_vector(const Vec& v) {
    const int d = int(v.size());
    Vec u = v;
    const double n = norm2(u);
    if (n == 0.0) throw NumericalError("basis_from_vector: zero vector");
    for (double& x : u) x /= n;
    // Householder H maps e1 to u; its columns form the basis.
    Vec w = u;
    w[0] -= 1.0;
    const double wn = norm2(w);
    Mat q = Mat::identity(d);
    if (wn > 1e-14) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) q(i, j) -= 2.0 * w[i] * w[j] / (wn * wn);
    }
    return q;
}

WeightedSystem conjugate_family(const WeightedSystem& sys, const Mat& q,
                                double t) {
    const int d = sys.dim();
    Mat dt(d, d);
    Mat dt_inv(d, d);
    double p = 1.0;
    for (int i = 0; i < d; ++i) {
        dt(i, i) = p;
        dt_inv(i, i) = 1.0 / p;
        p *= t;
    }
    const Mat s = dt * q.transpose();
    const Mat s_inv = q * dt_inv;
    WeightedSystem out = sys;
    for (Mat& m : out.matrices) m = s * m * s_inv;
    return out;
}

RadiusSide one_letter_side(const WeightedSystem& sys) {
    double lo = 0.0, hi = 0.0;
    for (size_t i = 0; i < sys.matrices.size(); ++i) {
        lo = std::max(lo, std::pow(spectral_radius(sys.matrices[i]),
                                   1.0 / sys.weights[i]));
        hi = std::max(hi, std::pow(operator_norm(sys.matrices[i]),
                                   1.0 / sys.weights[i]));
    }
    if (lo > 1.0 + 1e-13) return RadiusSide::above_one;
    if (hi < 1.0 - 1e-13) return RadiusSide::below_one;
    return RadiusSide::unknown;
}

RadiusSide branch_and_bound_side(const WeightedSystem& sys, long budget) {
    double lo = 0.0;
    for (size_t i = 0; i < sys.matrices.size(); ++i)
        lo = std::max(lo, std::pow(spectral_radius(sys.matrices[i]),
                                   1.0 / sys.weights[i]));
    // The prune threshold is lower + eps, so eps must shrink as the
    // incumbent rises toward 1: rerun with eps recomputed from the latest
    // bracket until the result is decisive or eps stops improving.
    double eps = std::max(std::fabs(1.0 - lo) / 2.0, 1e-12);
    for (int pass = 0; pass < 6; ++pass) {
        GripenbergOptions opt;
        opt.eps = eps;
        opt.max_nodes = budget;
        opt.max_depth = 48;
        const JsrBracket b = gripenberg(sys, opt);
        if (b.lower > 1.0 + 1e-13) return RadiusSide::above_one;
        if (b.upper < 1.0 - 1e-13) return RadiusSide::below_one;
        const double next = std::max(std::fabs(1.0 - b.lower) / 2.0, 1e-12);
        if (next >= 0.9 * eps) break;
        eps = next;
    }
    return RadiusSide::unknown;
}

}  // namespace

RadiusSide classify(const WeightedSystem& sys, long budget_nodes) {
    sys.validate();
    RadiusSide side = one_letter_side(sys);
    if (side != RadiusSide::unknown) return side;
    side = branch_and_bound_side(sys, budget_nodes);
    if (side != RadiusSide::unknown) return side;

    // Rescaled retries: conjugating every matrix by a fixed similarity
    // preserves all spectral values but changes the norms, which can make
    // the one-letter and branch-and-bound cuts decisive.
    int worst = 0;
    double worst_gap = -kInf;
    for (size_t i = 0; i < sys.matrices.size(); ++i) {
        const double gap =
            std::pow(operator_norm(sys.matrices[i]), 1.0 / sys.weights[i]) -
            std::pow(spectral_radius(sys.matrices[i]), 1.0 / sys.weights[i]);
        if (gap > worst_gap) {
            worst_gap = gap;
            worst = int(i);
        }
    }
    std::vector<Mat> bases{Mat::identity(sys.dim())};
    try {
        EigenResult er = leading_eigenpair(sys.matrices[worst]);
        if (er.is_real) bases.insert(bases.begin(), basis_from_vector(er.leading_vector));
    } catch (const NumericalError&) {
        // fall back to the identity basis only
    }
    const long rung_budget = std::max(budget_nodes / 4, 20000L);
    for (const Mat& q : bases) {
        for (double t : {1e2, 1e4, 1e6, 1e8, 1e10, 1e12}) {
            if (double(sys.dim() - 1) * std::log10(t) > 100.0)
                break;  // diagonal scaling would overflow downstream norms
            WeightedSystem conj = conjugate_family(sys, q, t);
            side = one_letter_side(conj);
            if (side != RadiusSide::unknown) return side;
            side = branch_and_bound_side(conj, rung_budget);
            if (side != RadiusSide::unknown) return side;
        }
    }
    return RadiusSide::unknown;
}

BisectionResult wjsr_bisection(const WeightedSystem& sys,
                               const BisectionOptions& opt) {
    sys.validate();
    double lo = 0.0, hi = 0.0;
    for (size_t i = 0; i < sys.matrices.size(); ++i) {
        lo = std::max(lo, std::pow(spectral_radius(sys.matrices[i]),
                                   1.0 / sys.weights[i]));
        hi = std::max(hi, std::pow(operator_norm(sys.matrices[i]),
                                   1.0 / sys.weights[i]));
    }
    BisectionResult res;
    res.lower = lo;
    res.upper = hi;
    if (hi == 0.0) {  // family of zero matrices
        res.converged = true;
        return res;
    }
    while (res.probes < opt.max_probes &&
           res.upper - res.lower > opt.tol * std::max(1.0, res.upper)) {
        const double mid = 0.5 * (res.lower + res.upper);
        if (mid <= res.lower || mid >= res.upper) break;  // fp resolution
        ++res.probes;
        const RadiusSide side = classify(dilate(sys, 1.0 / mid), opt.budget_nodes);
        if (side == RadiusSide::below_one)
            res.upper = mid;
        else if (side == RadiusSide::above_one)
            res.lower = mid;
        else
            return res;  // cannot split further, converged stays false
    }
    res.converged =
        res.upper - res.lower <= opt.tol * std::max(1.0, res.upper);
    return res;
}

}  // namespace wjsr
