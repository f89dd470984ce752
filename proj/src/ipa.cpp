#include "wjsr/ipa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ipa_detail.hpp"

namespace wjsr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using detail::complement_direction;
using detail::near_duplicate;
using detail::span_rank;

}  // namespace

Candidate make_candidate(const WeightedSystem& sys,
                         const std::vector<int>& word) {
    Candidate c;
    c.product = product_of(sys, canonical_cycle(word));
    const double rho = spectral_radius(c.product.matrix);
    c.rho_c = std::pow(rho, 1.0 / c.product.total_weight);
    c.spectral_ok = false;
    if (rho > 0.0) {
        try {
            EigenResult er = leading_eigenpair(c.product.matrix);
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

std::vector<Candidate> find_candidates(const WeightedSystem& sys, int max_len,
                                       long max_nodes) {
    CandidateSearch search = find_candidate_words(sys, max_len, max_nodes);
    std::vector<Candidate> out;
    for (const auto& w : search.words) {
        if (w.empty()) continue;
        out.push_back(make_candidate(sys, w));
    }
    return out;
}

namespace {

IpaResult run_ipa_seeded(const WeightedSystem& sys, const Candidate& cand,
                         const std::vector<Vec>& extra_seeds,
                         const IpaOptions& opt) {
    sys.validate();
    IpaResult res;
    res.candidate = cand;
    const int d = sys.dim();
    res.polytope.dim = d;
    if (!cand.spectral_ok || !(cand.rho_c > 0.0) || int(cand.v0.size()) != d) {
        res.status = IpaStatus::degenerate_leading_eigenvalue;
        return res;
    }
    const WeightedSystem scaled = dilate(sys, 1.0 / cand.rho_c);
    const int m = int(scaled.matrices.size());

    std::vector<Vec> verts{cand.v0};
    for (const Vec& s : extra_seeds) {
        if (int(s.size()) != d) continue;
        bool dup = false;
        for (const Vec& v : verts)
            if (near_duplicate(s, v, opt.dup_tol)) {
                dup = true;
                break;
            }
        if (!dup) verts.push_back(s);
    }
    std::vector<int> fresh(verts.size());
    for (size_t i = 0; i < verts.size(); ++i) fresh[i] = int(i);
    int completions = 0;
    int rank_stall = 0;
    int prev_rank = 0;
    res.status = IpaStatus::budget_exceeded;

    for (int round = 1; round <= opt.max_rounds; ++round) {
        res.rounds = round;
        SymPolytope base;
        base.dim = d;
        base.vertices = verts;

        struct Image {
            Vec w;
            double base_norm = kInf;
        };
        std::vector<Image> images(fresh.size() * m);
        for (size_t fi = 0; fi < fresh.size(); ++fi)
            for (int g = 0; g < m; ++g)
                images[fi * m + g].w = mat_vec(scaled.matrices[g], verts[fresh[fi]]);

        const int n_img = int(images.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
#endif
        for (int k = 0; k < n_img; ++k) {
            try {
                images[k].base_norm = polytope_norm(base, images[k].w);
            } catch (const NumericalError&) {
                images[k].base_norm = kInf;  // retested serially below
            }
        }

        double round_max = 0.0;
        for (const Image& im : images)
            round_max = std::max(round_max,
                                 std::isfinite(im.base_norm) ? im.base_norm : kInf);
        res.growth.push_back(round_max);

        // Serial pass in a fixed order keeps the vertex set deterministic.
        std::vector<int> added;
        for (int k = 0; k < n_img; ++k) {
            const Vec& w = images[k].w;
            if (images[k].base_norm <= 1.0 - opt.eta) continue;
            bool dup = false;
            for (const Vec& v : verts)
                if (near_duplicate(w, v, opt.dup_tol)) {
                    dup = true;
                    break;
                }
            if (dup) continue;
            if (!added.empty()) {
                // Vertices added this round may already cover the image.
                SymPolytope cur;
                cur.dim = d;
                cur.vertices = verts;
                double n;
                try {
                    n = polytope_norm(cur, w);
                } catch (const NumericalError&) {
                    n = kInf;
                }
                if (n <= 1.0 - opt.eta) continue;
            }
            verts.push_back(w);
            added.push_back(int(verts.size()) - 1);
        }

        if (int(verts.size()) > opt.max_vertices) {
            res.status = IpaStatus::budget_exceeded;
            break;
        }

        if (added.empty()) {
            SymPolytope p;
            p.dim = d;
            p.vertices = verts;
            if (p.spanning()) {
                res.status = IpaStatus::converged;
                break;
            }
            // Invariant so far only on a subspace: append an orthogonal
            // direction and keep iterating. Needing more than d of these
            // means the family keeps collapsing the span.
            if (++completions > d) {
                res.status = IpaStatus::reducible_detected;
                break;
            }
            verts.push_back(complement_direction(verts, d));
            added.push_back(int(verts.size()) - 1);
        } else {
            // Growth confined to a proper subspace for several rounds means
            // a common invariant subspace: stop instead of looping.
            const int rank = span_rank(verts, d);
            rank_stall = (rank < d && rank == prev_rank) ? rank_stall + 1 : 0;
            prev_rank = rank;
            if (rank_stall >= 3) {
                res.status = IpaStatus::reducible_detected;
                break;
            }
        }
        fresh = added;
    }

    res.polytope.dim = d;
    res.polytope.vertices = verts;
    if (res.status == IpaStatus::converged) {
        // Vertices that later additions covered are redundant; dropping
        // them changes the representation, not the polytope.
        res.polytope = reduce_vertices(res.polytope);
    }
    // Invariance is scale-free, but the seed's rotation along the extremal
    // cycle is not: cyclically shifted seeds generate homothetic copies.
    // Normalizing the scale makes the certificate independent of mode order.
    double vmax = 0.0;
    for (const Vec& v : res.polytope.vertices) vmax = std::max(vmax, norm2(v));
    if (vmax > 0.0)
        for (Vec& v : res.polytope.vertices)
            for (double& x : v) x /= vmax;
    if (res.status == IpaStatus::converged)
        res.eps_extremal = measure_eps_extremal(scaled, res.polytope);
    return res;
}

}  // namespace

IpaResult run_ipa(const WeightedSystem& sys, const Candidate& cand,
                  const IpaOptions& opt) {
    return run_ipa_seeded(sys, cand, {}, opt);
}

IpaResult invariant_polytope_from(const WeightedSystem& sys,
                                  const std::vector<Candidate>& cands,
                                  const IpaOptions& opt) {
    IpaResult best;
    best.status = IpaStatus::degenerate_leading_eigenvalue;
    best.polytope.dim = sys.dim();
    bool have = false;
    std::vector<char> consumed(cands.size(), 0);
    for (size_t i = 0; i < cands.size(); ++i) {
        const Candidate& c = cands[i];
        if (!c.spectral_ok || consumed[i]) continue;
        // Value ties seed a single run together; mark them consumed so the
        // same seed set is not retried under another representative.
        std::vector<Vec> extra;
        for (size_t j = i + 1; j < cands.size(); ++j) {
            if (!cands[j].spectral_ok) continue;
            if (std::fabs(cands[j].rho_c - c.rho_c) <= 1e-10 * c.rho_c) {
                extra.push_back(cands[j].v0);
                consumed[j] = 1;
            }
        }
        IpaResult r = run_ipa_seeded(sys, c, extra, opt);
        if (r.status == IpaStatus::converged) return r;
        if (!have) {
            best = r;
            have = true;
        }
    }
    if (!have && !cands.empty()) best.candidate = cands.front();
    return best;
}

IpaResult invariant_polytope(const WeightedSystem& sys, const IpaOptions& opt) {
    return invariant_polytope_from(sys, find_candidates(sys), opt);
}

double measure_eps_extremal(const WeightedSystem& scaled, const SymPolytope& p) {
    scaled.validate();
    double eps = -kInf;
    for (size_t i = 0; i < scaled.matrices.size(); ++i) {
        for (const Vec& v : p.vertices) {
            const double n = polytope_norm(p, mat_vec(scaled.matrices[i], v));
            if (!std::isfinite(n)) return kInf;
            const double e = std::log(std::max(n, 1e-300)) / scaled.weights[i];
            eps = std::max(eps, e);
        }
    }
    return eps;
}

bool verify_invariant(const WeightedSystem& scaled, const SymPolytope& p,
                      double eps) {
    scaled.validate();
    for (size_t i = 0; i < scaled.matrices.size(); ++i) {
        const double allowed = std::exp(scaled.weights[i] * eps) + 1e-12;
        for (const Vec& v : p.vertices) {
            const double n = polytope_norm(p, mat_vec(scaled.matrices[i], v));
            if (!(n <= allowed)) return false;
        }
    }
    return true;
}

}  // namespace wjsr
