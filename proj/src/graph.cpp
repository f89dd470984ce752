#include "wjsr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "ipa_detail.hpp"

namespace wjsr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using detail::complement_direction;
using detail::near_duplicate;
using detail::span_rank;

std::vector<std::vector<int>> outgoing_edges(const GraphSystem& gs) {
    std::vector<std::vector<int>> out(gs.vertex_count());
    for (size_t ei = 0; ei < gs.edges.size(); ++ei)
        out[gs.edges[ei].from].push_back(int(ei));
    return out;
}

// Vertices reachable from 0 following edges in the given direction.
int reachable_count(const GraphSystem& gs, bool reversed) {
    const int n = gs.vertex_count();
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    seen[0] = 1;
    q.push(0);
    int count = 1;
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (const GraphEdge& e : gs.edges) {
            const int a = reversed ? e.to : e.from;
            const int b = reversed ? e.from : e.to;
            if (a != v || seen[b]) continue;
            seen[b] = 1;
            q.push(b);
            ++count;
        }
    }
    return count;
}

}  // namespace

void GraphSystem::validate() const {
    const int n = vertex_count();
    if (n == 0) throw std::invalid_argument("graph: no vertices");
    for (int d : dims)
        if (d < 1) throw std::invalid_argument("graph: vertex dimension must be positive");
    if (edges.empty()) throw std::invalid_argument("graph: no edges");
    for (const GraphEdge& e : edges) {
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            throw std::invalid_argument("graph: edge endpoint out of range");
        if (e.op.rows() != dims[e.to] || e.op.cols() != dims[e.from])
            throw std::invalid_argument("graph: operator shape mismatch");
        for (int i = 0; i < e.op.rows(); ++i)
            for (int j = 0; j < e.op.cols(); ++j)
                if (!std::isfinite(e.op(i, j)))
                    throw std::invalid_argument("graph: nonfinite operator entry");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw std::invalid_argument("graph: edge weight must be positive");
    }
    if (!generators.empty()) {
        if (int(generators.size()) != n)
            throw std::invalid_argument("graph: one flow family per vertex expected");
        for (int i = 0; i < n; ++i)
            for (const Mat& b : generators[i]) {
                if (b.rows() != dims[i] || b.cols() != dims[i])
                    throw std::invalid_argument("graph: flow generator shape mismatch");
                for (int r = 0; r < b.rows(); ++r)
                    for (int c = 0; c < b.cols(); ++c)
                        if (!std::isfinite(b(r, c)))
                            throw std::invalid_argument("graph: nonfinite generator entry");
            }
    }
    if (reachable_count(*this, false) != n || reachable_count(*this, true) != n)
        throw std::invalid_argument("graph: not strongly connected");
}

int GraphPath::tail(const GraphSystem& gs) const {
    if (edges.empty()) throw std::invalid_argument("path: empty edge sequence");
    return gs.edges.at(edges.front()).from;
}

int GraphPath::head(const GraphSystem& gs) const {
    if (edges.empty()) throw std::invalid_argument("path: empty edge sequence");
    return gs.edges.at(edges.back()).to;
}

GraphPath path_of(const GraphSystem& gs, const std::vector<int>& edges) {
    if (edges.empty()) throw std::invalid_argument("path: empty edge sequence");
    GraphPath p;
    p.edges = edges;
    const GraphEdge* prev = nullptr;
    for (int ei : edges) {
        if (ei < 0 || ei >= int(gs.edges.size()))
            throw std::invalid_argument("path: edge index out of range");
        const GraphEdge& e = gs.edges[ei];
        if (prev && e.from != prev->to)
            throw std::invalid_argument("path: edges do not concatenate");
        p.op = prev ? e.op * p.op : e.op;
        p.total_weight += e.weight;
        prev = &e;
    }
    p.closed = gs.edges[edges.front()].from == gs.edges[edges.back()].to;
    return p;
}

std::vector<int> canonical_closed_path(const GraphSystem& gs,
                                       const std::vector<int>& edges) {
    const GraphPath whole = path_of(gs, edges);
    if (!whole.closed)
        throw std::invalid_argument("canonical_closed_path: path is not closed");
    std::vector<int> w = edges;
    // A power of a shorter cycle names the same cycle: keep one period.
    const int k = int(w.size());
    for (int per = 1; per <= k / 2; ++per) {
        if (k % per) continue;
        bool rep = true;
        for (int t = per; t < k && rep; ++t) rep = w[t] == w[t % per];
        if (rep) {
            w.resize(per);
            break;
        }
    }
    const int kk = int(w.size());
    int best = 0;
    for (int r = 1; r < kk; ++r) {
        const int vb = gs.edges[w[best]].from;
        const int vr = gs.edges[w[r]].from;
        if (vr > vb) continue;
        if (vr < vb) {
            best = r;
            continue;
        }
        for (int t = 0; t < kk; ++t) {
            const int a = w[(r + t) % kk];
            const int b = w[(best + t) % kk];
            if (a != b) {
                if (a < b) best = r;
                break;
            }
        }
    }
    std::vector<int> out(kk);
    for (int t = 0; t < kk; ++t) out[t] = w[(best + t) % kk];
    return out;
}

namespace {

// Depth-first sweep over composable edge sequences with prefix products.
struct PathSweep {
    const GraphSystem& gs;
    const std::vector<std::vector<int>>& out;
    int k = 0;
    long budget = 0;
    long used = 0;
    GraphRadiusSample best;
    std::vector<int> path;

    void walk(int head, const Mat& op, double weight, int depth) {
        if (depth == k) {
            const double v = std::pow(operator_norm(op), 1.0 / weight);
            if (best.path.empty() || v > best.value) {
                best.value = v;
                best.path = path;
            }
            return;
        }
        for (int ei : out[head]) {
            if (++used > budget)
                throw std::runtime_error("graph_rho_k_exact: path budget exceeded");
            const GraphEdge& e = gs.edges[ei];
            path.push_back(ei);
            walk(e.to, e.op * op, weight + e.weight, depth + 1);
            path.pop_back();
        }
    }
};

}  // namespace

GraphRadiusSample graph_rho_k_exact(const GraphSystem& gs, int k,
                                    long max_paths) {
    gs.validate();
    if (k < 1) throw std::invalid_argument("graph_rho_k_exact: k must be positive");
    const auto out = outgoing_edges(gs);
    PathSweep sweep{gs, out, k, max_paths, 0, {}, {}};
    for (size_t ei = 0; ei < gs.edges.size(); ++ei) {
        if (++sweep.used > max_paths)
            throw std::runtime_error("graph_rho_k_exact: path budget exceeded");
        const GraphEdge& e = gs.edges[ei];
        sweep.path.assign(1, int(ei));
        sweep.walk(e.to, e.op, e.weight, 1);
    }
    return sweep.best;
}

WeightedSystem lift(const GraphSystem& gs) {
    gs.validate();
    const int n = gs.vertex_count();
    std::vector<int> off(n + 1, 0);
    for (int i = 0; i < n; ++i) off[i + 1] = off[i] + gs.dims[i];
    const int total = off[n];
    WeightedSystem sys;
    for (size_t ei = 0; ei < gs.edges.size(); ++ei) {
        const GraphEdge& e = gs.edges[ei];
        Mat m(total, total);
        for (int r = 0; r < e.op.rows(); ++r)
            for (int c = 0; c < e.op.cols(); ++c)
                m(off[e.to] + r, off[e.from] + c) = e.op(r, c);
        sys.matrices.push_back(std::move(m));
        sys.weights.push_back(e.weight);
        sys.labels.push_back(e.label.empty() ? std::to_string(ei + 1) : e.label);
    }
    return sys;
}

GraphCandidate make_graph_candidate(const GraphSystem& gs,
                                    const std::vector<int>& edges) {
    GraphCandidate c;
    c.path = path_of(gs, canonical_closed_path(gs, edges));
    const double rho = spectral_radius(c.path.op);
    c.rho_c = std::pow(rho, 1.0 / c.path.total_weight);
    c.spectral_ok = false;
    if (rho > 0.0) {
        try {
            EigenResult er = leading_eigenpair(c.path.op);
            if (er.is_real && er.is_unique_simple) {
                c.v0 = er.leading_vector;
                const double n = norm2(c.v0);
                for (double& x : c.v0) x /= n;
                c.spectral_ok = true;
            }
        } catch (const NumericalError&) {
            // leave spectral_ok false: caller moves to the next candidate
        }
    }
    return c;
}

std::vector<GraphCandidate> find_graph_candidates(const GraphSystem& gs,
                                                  int max_len,
                                                  long max_nodes) {
    const WeightedSystem lifted = lift(gs);
    const CandidateSearch search = find_candidate_words(lifted, max_len, max_nodes);
    std::vector<GraphCandidate> out;
    std::vector<std::vector<int>> seen;
    for (const auto& word : search.words) {
        if (word.empty()) continue;
        // Lifted words are per-edge in product order; traversal reverses.
        std::vector<int> trav(word.rbegin(), word.rend());
        GraphPath p;
        try {
            p = path_of(gs, trav);
        } catch (const std::invalid_argument&) {
            continue;  // zero-value filler word, not a path
        }
        if (!p.closed) continue;
        const std::vector<int> canon = canonical_closed_path(gs, trav);
        if (std::find(seen.begin(), seen.end(), canon) != seen.end()) continue;
        seen.push_back(canon);
        out.push_back(make_graph_candidate(gs, canon));
    }
    return out;
}

namespace {

// Images of the candidate eigenvector along its own cycle, one seed per
// visited vertex. Under the rho_c scaling the cycle map fixes v0, so the
// seeds make the candidate norm-neutral.
std::vector<std::pair<int, Vec>> cycle_seeds(const GraphSystem& gs,
                                             const GraphCandidate& cand) {
    std::vector<std::pair<int, Vec>> seeds;
    Vec v = cand.v0;
    seeds.emplace_back(cand.path.tail(gs), v);
    for (int ei : cand.path.edges) {
        const GraphEdge& e = gs.edges[ei];
        v = mat_vec(std::pow(cand.rho_c, -e.weight) * e.op, v);
        seeds.emplace_back(e.to, v);
    }
    return seeds;
}

GraphIpaResult graph_ipa_seeded(const GraphSystem& gs,
                                const GraphCandidate& cand,
                                const std::vector<std::pair<int, Vec>>& extra,
                                const IpaOptions& opt) {
    gs.validate();
    GraphIpaResult res;
    res.candidate = cand;
    const int n = gs.vertex_count();
    res.multinorm.parts.resize(n);
    for (int i = 0; i < n; ++i) res.multinorm.parts[i].dim = gs.dims[i];
    if (!cand.spectral_ok || !(cand.rho_c > 0.0) || cand.path.edges.empty() ||
        int(cand.v0.size()) != gs.dims[cand.path.tail(gs)]) {
        res.status = IpaStatus::degenerate_leading_eigenvalue;
        return res;
    }

    std::vector<Mat> sop(gs.edges.size());
    for (size_t ei = 0; ei < gs.edges.size(); ++ei)
        sop[ei] = std::pow(cand.rho_c, -gs.edges[ei].weight) * gs.edges[ei].op;
    const auto out = outgoing_edges(gs);
    int total_dim = 0;
    for (int d : gs.dims) total_dim += d;

    std::vector<std::vector<Vec>> verts(n);
    std::vector<std::vector<int>> fresh(n);
    auto seed = [&](int vertex, const Vec& s) {
        if (int(s.size()) != gs.dims[vertex]) return;
        for (const Vec& v : verts[vertex])
            if (near_duplicate(s, v, opt.dup_tol)) return;
        verts[vertex].push_back(s);
        fresh[vertex].push_back(int(verts[vertex].size()) - 1);
    };
    for (const auto& [vertex, s] : cycle_seeds(gs, cand)) seed(vertex, s);
    for (const auto& [vertex, s] : extra) seed(vertex, s);

    int completions = 0;
    int rank_stall = 0;
    int prev_rank = 0;
    res.status = IpaStatus::budget_exceeded;

    for (int round = 1; round <= opt.max_rounds; ++round) {
        res.rounds = round;
        std::vector<SymPolytope> base(n);
        for (int i = 0; i < n; ++i) {
            base[i].dim = gs.dims[i];
            base[i].vertices = verts[i];
        }

        struct Image {
            Vec w;
            int target = 0;
            double base_norm = kInf;
        };
        std::vector<Image> images;
        for (int i = 0; i < n; ++i)
            for (int fi : fresh[i])
                for (int ei : out[i])
                    images.push_back(
                        {mat_vec(sop[ei], verts[i][fi]), gs.edges[ei].to, kInf});

        const int n_img = int(images.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
#endif
        for (int k = 0; k < n_img; ++k) {
            try {
                images[k].base_norm = polytope_norm(base[images[k].target], images[k].w);
            } catch (const NumericalError&) {
                images[k].base_norm = kInf;  // retested serially below
            }
        }

        double round_max = 0.0;
        for (const Image& im : images)
            round_max = std::max(round_max,
                                 std::isfinite(im.base_norm) ? im.base_norm : kInf);
        res.growth.push_back(round_max);

        // Serial pass in a fixed order keeps the vertex sets deterministic.
        std::vector<std::vector<int>> added(n);
        bool any_added = false;
        for (int k = 0; k < n_img; ++k) {
            const int t = images[k].target;
            const Vec& w = images[k].w;
            if (images[k].base_norm <= 1.0 - opt.eta) continue;
            bool dup = false;
            for (const Vec& v : verts[t])
                if (near_duplicate(w, v, opt.dup_tol)) {
                    dup = true;
                    break;
                }
            if (dup) continue;
            if (!added[t].empty()) {
                // Vertices added this round may already cover the image.
                SymPolytope cur;
                cur.dim = gs.dims[t];
                cur.vertices = verts[t];
                double nn;
                try {
                    nn = polytope_norm(cur, w);
                } catch (const NumericalError&) {
                    nn = kInf;
                }
                if (nn <= 1.0 - opt.eta) continue;
            }
            verts[t].push_back(w);
            added[t].push_back(int(verts[t].size()) - 1);
            any_added = true;
        }

        long total_verts = 0;
        for (int i = 0; i < n; ++i) total_verts += long(verts[i].size());
        if (total_verts > opt.max_vertices) {
            res.status = IpaStatus::budget_exceeded;
            break;
        }

        if (!any_added) {
            bool all_span = true;
            for (int i = 0; i < n; ++i) {
                SymPolytope p;
                p.dim = gs.dims[i];
                p.vertices = verts[i];
                if (!p.spanning()) all_span = false;
            }
            if (all_span) {
                res.status = IpaStatus::converged;
                break;
            }
            // Invariant so far only on subspaces: append an orthogonal
            // direction at each deficient vertex and keep iterating.
            // Needing more than the total dimension of these means the
            // system keeps collapsing the spans.
            for (int i = 0; i < n; ++i) {
                SymPolytope p;
                p.dim = gs.dims[i];
                p.vertices = verts[i];
                if (p.spanning()) continue;
                verts[i].push_back(complement_direction(verts[i], gs.dims[i]));
                added[i].push_back(int(verts[i].size()) - 1);
                any_added = true;
                ++completions;
            }
            if (completions > total_dim) {
                res.status = IpaStatus::reducible_detected;
                break;
            }
        } else {
            // Growth confined to proper subspaces for several rounds means
            // a common invariant subspace: stop instead of looping.
            int rank = 0;
            for (int i = 0; i < n; ++i) rank += span_rank(verts[i], gs.dims[i]);
            rank_stall = (rank < total_dim && rank == prev_rank) ? rank_stall + 1 : 0;
            prev_rank = rank;
            if (rank_stall >= 3) {
                res.status = IpaStatus::reducible_detected;
                break;
            }
        }
        fresh = added;
    }

    for (int i = 0; i < n; ++i) res.multinorm.parts[i].vertices = verts[i];
    if (res.status == IpaStatus::converged) {
        // Vertices that later additions covered are redundant; dropping
        // them changes the representation, not the polytopes.
        for (SymPolytope& p : res.multinorm.parts) p = reduce_vertices(p);
        res.eps_extremal = measure_multinorm_eps(gs, res.multinorm, cand.rho_c);
    }
    return res;
}

}  // namespace

GraphIpaResult graph_ipa(const GraphSystem& gs, const GraphCandidate& cand,
                         const IpaOptions& opt) {
    return graph_ipa_seeded(gs, cand, {}, opt);
}

GraphIpaResult graph_invariant_polytope_from(
    const GraphSystem& gs, const std::vector<GraphCandidate>& cands,
    const IpaOptions& opt) {
    GraphIpaResult best;
    best.status = IpaStatus::degenerate_leading_eigenvalue;
    best.multinorm.parts.resize(gs.vertex_count());
    for (int i = 0; i < gs.vertex_count(); ++i)
        best.multinorm.parts[i].dim = gs.dims[i];
    bool have = false;
    std::vector<char> consumed(cands.size(), 0);
    for (size_t i = 0; i < cands.size(); ++i) {
        const GraphCandidate& c = cands[i];
        if (!c.spectral_ok || consumed[i]) continue;
        // Value ties seed a single run together; mark them consumed so the
        // same seed set is not retried under another representative.
        std::vector<std::pair<int, Vec>> extra;
        for (size_t j = i + 1; j < cands.size(); ++j) {
            if (!cands[j].spectral_ok) continue;
            if (std::fabs(cands[j].rho_c - c.rho_c) <= 1e-10 * c.rho_c) {
                for (const auto& s : cycle_seeds(gs, cands[j])) extra.push_back(s);
                consumed[j] = 1;
            }
        }
        GraphIpaResult r = graph_ipa_seeded(gs, c, extra, opt);
        if (r.status == IpaStatus::converged) return r;
        if (!have) {
            best = r;
            have = true;
        }
    }
    if (!have && !cands.empty()) best.candidate = cands.front();
    return best;
}

GraphIpaResult graph_invariant_polytope(const GraphSystem& gs,
                                        const IpaOptions& opt) {
    return graph_invariant_polytope_from(gs, find_graph_candidates(gs), opt);
}

double measure_multinorm_eps(const GraphSystem& gs, const Multinorm& mn,
                             double rho) {
    gs.validate();
    if (int(mn.parts.size()) != gs.vertex_count())
        throw std::invalid_argument("multinorm: one polytope per vertex expected");
    double eps = -kInf;
    for (const GraphEdge& e : gs.edges) {
        const Mat scaled = std::pow(rho, -e.weight) * e.op;
        for (const Vec& v : mn.parts[e.from].vertices) {
            const double n = polytope_norm(mn.parts[e.to], mat_vec(scaled, v));
            if (!std::isfinite(n)) return kInf;
            eps = std::max(eps, std::log(std::max(n, 1e-300)) / e.weight);
        }
    }
    return eps;
}

bool verify_multinorm(const GraphSystem& gs, const Multinorm& mn, double rho,
                      double eps) {
    gs.validate();
    if (int(mn.parts.size()) != gs.vertex_count())
        throw std::invalid_argument("multinorm: one polytope per vertex expected");
    // A part that fails to span its space is a seminorm, not a norm, and
    // vacuously passing edge checks must not certify it.
    for (const SymPolytope& p : mn.parts)
        if (p.vertices.empty() || !p.spanning()) return false;
    for (const GraphEdge& e : gs.edges) {
        const double allowed =
            std::exp(e.weight * eps) * std::pow(rho, e.weight) + 1e-12;
        for (const Vec& v : mn.parts[e.from].vertices)
            if (!(polytope_norm(mn.parts[e.to], mat_vec(e.op, v)) <= allowed))
                return false;
    }
    if (!gs.generators.empty()) {
        const double cap = std::log(rho) + eps + 1e-12;
        for (int i = 0; i < gs.vertex_count(); ++i) {
            if (gs.generators[i].empty()) continue;
            if (!(mu_shift(mn.parts[i], gs.generators[i]).mu <= cap)) return false;
        }
    }
    return true;
}

}  // namespace wjsr
