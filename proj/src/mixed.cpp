#include "wjsr/mixed.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wjsr/polytope.hpp"

namespace wjsr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int MixedSystem::dim() const {
    if (!jumps.empty()) return jumps.front().rows();
    if (!generators.empty()) return generators.front().rows();
    return 0;
}

void MixedSystem::validate() const {
    if (jumps.empty() && generators.empty())
        throw std::invalid_argument("MixedSystem: no modes");
    if (jumps.size() != jump_weights.size())
        throw std::invalid_argument("MixedSystem: one weight per jump required");
    const int d = dim();
    if (d <= 0) throw std::invalid_argument("MixedSystem: empty dimension");
    for (const Mat& a : jumps)
        if (a.rows() != d || a.cols() != d)
            throw std::invalid_argument("MixedSystem: jump dimension mismatch");
    for (const Mat& b : generators)
        if (b.rows() != d || b.cols() != d)
            throw std::invalid_argument(
                "MixedSystem: generator dimension mismatch");
    for (double w : jump_weights)
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument(
                "MixedSystem: jump weights must be positive and finite");
}

Discretized discretize(const MixedSystem& ms, double tau) {
    ms.validate();
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("discretize: tau must be positive");
    Discretized out;
    out.tau = tau;
    for (size_t i = 0; i < ms.jumps.size(); ++i) {
        out.system.matrices.push_back(ms.jumps[i]);
        out.system.weights.push_back(ms.jump_weights[i]);
        out.system.labels.push_back("A" + std::to_string(i + 1));
        out.jump_of.push_back(int(i));
        out.flow_of.push_back(-1);
    }
    for (size_t j = 0; j < ms.generators.size(); ++j) {
        out.system.matrices.push_back(expm(ms.generators[j], tau));
        out.system.weights.push_back(tau);
        out.system.labels.push_back("B" + std::to_string(j + 1));
        out.jump_of.push_back(-1);
        out.flow_of.push_back(int(j));
    }
    return out;
}

double beta_of(const WeightedProduct& product) {
    if (!product.matrix.square() || product.matrix.rows() == 0)
        throw std::invalid_argument("beta_of: product matrix must be square");
    if (!(product.total_weight > 0.0))
        throw std::invalid_argument("beta_of: nonpositive total weight");
    const double rho = spectral_radius(product.matrix);
    if (rho == 0.0) return -kInf;  // nilpotent: no growth information
    return std::log(rho) / product.total_weight;
}

MixedSystem shift(const MixedSystem& ms, double t) {
    ms.validate();
    MixedSystem out = ms;
    for (size_t i = 0; i < out.jumps.size(); ++i)
        out.jumps[i] *= std::exp(t * out.jump_weights[i]);
    for (Mat& b : out.generators)
        for (int k = 0; k < b.rows(); ++k) b(k, k) += t;
    return out;
}

BoundsReport lyapunov_bounds(const MixedSystem& ms, double tau,
                             const LyapunovOptions& opt) {
    Discretized dz = discretize(ms, tau);

    BoundsReport rep;
    rep.tau = tau;
    rep.beta = -kInf;
    rep.mu = kInf;

    std::vector<Candidate> cands =
        find_candidates(dz.system, opt.max_len, opt.max_nodes);
    if (cands.empty() || !(cands.front().rho_c > 0.0)) {
        // Every enumerated closed product is nilpotent: no spectral lower
        // bound exists and no polytope seed is available.
        rep.status = IpaStatus::degenerate_leading_eigenvalue;
        if (!cands.empty()) rep.witness = cands.front().product.word;
        return rep;
    }

    rep.beta = std::log(cands.front().rho_c);
    rep.rho = cands.front().rho_c;
    rep.witness = cands.front().product.word;

    IpaResult ipa = invariant_polytope_from(dz.system, cands, opt.ipa);
    rep.status = ipa.status;
    rep.rounds = ipa.rounds;
    rep.polytope = ipa.polytope;

    if (ipa.polytope.vertices.empty() || !ipa.polytope.spanning() ||
        !(ipa.candidate.rho_c > 0.0))
        return rep;  // no usable certificate; beta stands alone

    // The certificate may rest on a different (smaller) cycle than the best
    // one when the best has a complex leading eigenvalue; the measured
    // slack then absorbs the difference.
    const double log_rho_used = std::log(ipa.candidate.rho_c);
    const WeightedSystem scaled = dilate(dz.system, 1.0 / ipa.candidate.rho_c);
    const double eps = (ipa.status == IpaStatus::converged)
                           ? ipa.eps_extremal
                           : measure_eps_extremal(scaled, ipa.polytope);
    rep.eps_extremal = eps;

    double mu_flow = -kInf;
    if (!ms.generators.empty()) {
        const ShiftResult s = mu_shift(ipa.polytope, ms.generators, opt.delta);
        mu_flow = s.mu;
    }
    rep.mu_flow = mu_flow;
    if (!std::isfinite(eps) || mu_flow == kInf) return rep;

    // Jumps expand the polytope norm at rate at most log_rho_used + eps per
    // time unit, flows at rate at most mu_flow.
    rep.mu = std::max(mu_flow, log_rho_used + eps);
    rep.mu_valid = true;
    return rep;
}

std::vector<TrajectorySample> simulate(const MixedSystem& ms,
                                       const SwitchingLaw& law, const Vec& x0,
                                       double sample_dt) {
    ms.validate();
    if (!(sample_dt > 0.0))
        throw std::invalid_argument("simulate: sample_dt must be positive");
    if (int(x0.size()) != ms.dim())
        throw std::invalid_argument("simulate: state dimension mismatch");
    for (const SwitchEvent& ev : law.events) {
        if (ev.kind == SwitchEvent::Kind::jump) {
            if (ev.mode < 0 || ev.mode >= int(ms.jumps.size()))
                throw std::invalid_argument("simulate: jump mode out of range");
        } else {
            if (ev.mode < 0 || ev.mode >= int(ms.generators.size()))
                throw std::invalid_argument("simulate: flow mode out of range");
            if (!(ev.duration >= 0.0) || !std::isfinite(ev.duration))
                throw std::invalid_argument("simulate: bad flow duration");
        }
    }

    std::vector<TrajectorySample> out;
    double t = 0.0;
    Vec x = x0;
    out.push_back({t, x, true});

    for (const SwitchEvent& ev : law.events) {
        if (ev.kind == SwitchEvent::Kind::flow) {
            if (ev.duration == 0.0) continue;
            const Mat& b = ms.generators[ev.mode];
            const Mat step = expm(b, sample_dt);
            const Vec x_start = x;
            const double t_start = t;
            int k = 0;
            while ((k + 1) * sample_dt < ev.duration - 1e-12 * sample_dt) {
                ++k;
                x = mat_vec(step, x);
                out.push_back({t_start + k * sample_dt, x, true});
            }
            // Land exactly on the segment end to avoid step drift.
            x = mat_vec(expm(b, ev.duration), x_start);
            t = t_start + ev.duration;
            out.push_back({t, x, true});
        } else {
            const double alpha = ms.jump_weights[ev.mode];
            const Vec x_pre = x;
            const Vec x_post = mat_vec(ms.jumps[ev.mode], x_pre);
            // Dark interval: the trajectory is undefined; interpolate for
            // plotting and mark the samples inactive.
            int k = 1;
            while (k * sample_dt < alpha - 1e-12 * sample_dt) {
                const double s = k * sample_dt / alpha;
                Vec xi(x_pre.size());
                for (size_t q = 0; q < xi.size(); ++q)
                    xi[q] = (1.0 - s) * x_pre[q] + s * x_post[q];
                out.push_back({t + k * sample_dt, xi, false});
                ++k;
            }
            t += alpha;
            x = x_post;
            out.push_back({t, x, true});
        }
    }
    return out;
}

}  // namespace wjsr
