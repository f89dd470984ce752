#include "wjsr/dwell.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wjsr/ipa.hpp"
#include "wjsr/polytope.hpp"

namespace wjsr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long long checked_ll(__int128 v, const char* what) {
    if (v > std::numeric_limits<long long>::max() ||
        v < std::numeric_limits<long long>::min())
        throw std::overflow_error(std::string(what) + ": rational overflow");
    return (long long)(v);
}

Rational make_rational_128(__int128 num, __int128 den, const char* what) {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b) {
        const __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a == 0) a = 1;  // num == 0
    Rational r;
    r.num = checked_ll(num / a, what);
    r.den = checked_ll(den / a, what);
    return r;
}

}  // namespace

Rational make_rational(long long num, long long den) {
    return make_rational_128(num, den, "make_rational");
}

Rational parse_rational(const std::string& text) {
    const auto bad = [&] {
        return std::invalid_argument("parse_rational: cannot parse '" + text + "'");
    };
    std::string s;
    for (char c : text)
        if (!std::isspace((unsigned char)c)) s += c;
    if (s.empty()) throw bad();
    const auto parse_int = [&](const std::string& t) -> long long {
        if (t.empty()) throw bad();
        size_t pos = 0;
        long long v;
        try {
            v = std::stoll(t, &pos);
        } catch (const std::exception&) {
            throw bad();
        }
        if (pos != t.size()) throw bad();
        return v;
    };
    const size_t slash = s.find('/');
    if (slash != std::string::npos) {
        if (s.find('/', slash + 1) != std::string::npos || s.find('.') != std::string::npos)
            throw bad();
        return make_rational(parse_int(s.substr(0, slash)),
                             parse_int(s.substr(slash + 1)));
    }
    const size_t dot = s.find('.');
    if (dot == std::string::npos) return make_rational(parse_int(s), 1);
    std::string head = s.substr(0, dot);
    const std::string frac = s.substr(dot + 1);
    if (frac.empty() || frac.size() > 18) throw bad();
    for (char c : frac)
        if (!std::isdigit((unsigned char)c)) throw bad();
    bool negative = false;
    if (!head.empty() && (head[0] == '+' || head[0] == '-')) {
        negative = head[0] == '-';
        head = head.substr(1);
    }
    const long long whole = head.empty() ? 0 : parse_int(head);
    if (whole < 0) throw bad();
    __int128 den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    __int128 num = __int128(whole) * den + parse_int(frac);
    if (negative) num = -num;
    return make_rational_128(num, den, "parse_rational");
}

Rational rat_add(Rational a, Rational b) {
    return make_rational_128(__int128(a.num) * b.den + __int128(b.num) * a.den,
                             __int128(a.den) * b.den, "rat_add");
}

Rational rat_sub(Rational a, Rational b) {
    return make_rational_128(__int128(a.num) * b.den - __int128(b.num) * a.den,
                             __int128(a.den) * b.den, "rat_sub");
}

Rational rat_mul(Rational a, Rational b) {
    return make_rational_128(__int128(a.num) * b.num, __int128(a.den) * b.den,
                             "rat_mul");
}

Rational rat_gcd(Rational a, Rational b) {
    // gcd(p/q, r/s) = gcd(p s, r q) / (q s): the largest rational dividing
    // both exactly.
    __int128 x = __int128(a.num < 0 ? -a.num : a.num) * b.den;
    __int128 y = __int128(b.num < 0 ? -b.num : b.num) * a.den;
    while (y) {
        const __int128 t = x % y;
        x = y;
        y = t;
    }
    if (x == 0) return make_rational(0, 1);
    return make_rational_128(x, __int128(a.den) * b.den, "rat_gcd");
}

int rat_cmp(Rational a, Rational b) {
    const __int128 lhs = __int128(a.num) * b.den;
    const __int128 rhs = __int128(b.num) * a.den;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

std::string to_string(Rational r) {
    if (r.den == 1) return std::to_string(r.num);
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

int DwellSystem::dim() const {
    return generators.empty() ? 0 : generators.front().rows();
}

void DwellSystem::validate() const {
    if (generators.empty())
        throw std::invalid_argument("dwell system: no generators");
    const int d = generators.front().rows();
    for (const Mat& b : generators) {
        if (b.rows() != d || b.cols() != d)
            throw std::invalid_argument("dwell system: generators must be square, same size");
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (!std::isfinite(b(i, j)))
                    throw std::invalid_argument("dwell system: nonfinite entry");
    }
    if (dwell.size() != generators.size())
        throw std::invalid_argument("dwell system: dwell time count mismatch");
    for (const Rational& r : dwell)
        if (r.num <= 0 || r.den <= 0)
            throw std::invalid_argument("dwell system: dwell times must be positive");
}

Vec DwellSystem::dwell_values() const {
    Vec v(dwell.size());
    for (size_t i = 0; i < dwell.size(); ++i) v[i] = dwell[i].value();
    return v;
}

GraphSystem build_dwell_graph(const DwellSystem& ds, double tau) {
    ds.validate();
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("build_dwell_graph: tau must be positive");
    const int m = ds.mode_count();
    GraphSystem gs;
    gs.dims.assign(m, ds.dim());
    gs.generators.resize(m);
    for (int k = 0; k < m; ++k) {
        gs.generators[k] = {ds.generators[k]};
        gs.edges.push_back(
            {k, k, expm(ds.generators[k], tau), tau, "B~" + std::to_string(k + 1)});
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            gs.edges.push_back({i, j, expm(ds.generators[j], ds.dwell[j].value()),
                                ds.dwell[j].value(), "A" + std::to_string(j + 1)});
        }
    return gs;
}

bool dwell_unconstrained_at(const DwellSystem& ds, Rational tau) {
    ds.validate();
    for (const Rational& r : ds.dwell)
        if (rat_cmp(tau, r) < 0) return false;
    return true;
}

Rational SignalSpec::period() const {
    Rational p = make_rational(0, 1);
    for (const SignalRun& r : runs) p = rat_add(p, r.duration);
    return p;
}

namespace {

char mode_char(int m) { return m < 9 ? char('1' + m) : char('a' + m - 9); }

// Merge circularly, check the dwell constraint exactly, choose the cell and
// the lexicographically least rotation of the cell word.
SignalSpec finalize_signal(const std::vector<SignalRun>& raw,
                           const DwellSystem& ds) {
    if (raw.empty()) throw std::invalid_argument("signal: no runs");
    std::vector<SignalRun> merged;
    for (const SignalRun& r : raw) {
        if (r.mode < 0 || r.mode >= ds.mode_count())
            throw std::invalid_argument("signal: mode out of range");
        if (!merged.empty() && merged.back().mode == r.mode)
            merged.back().duration = rat_add(merged.back().duration, r.duration);
        else
            merged.push_back(r);
    }
    if (merged.size() > 1 && merged.front().mode == merged.back().mode) {
        merged.front().duration =
            rat_add(merged.front().duration, merged.back().duration);
        merged.pop_back();
    }
    for (const SignalRun& r : merged)
        if (rat_cmp(r.duration, ds.dwell[r.mode]) < 0)
            throw std::logic_error("signal: dwell constraint violated");

    SignalSpec s;
    s.cell = merged.front().duration;
    for (size_t i = 1; i < merged.size(); ++i)
        s.cell = rat_gcd(s.cell, merged[i].duration);
    const auto cells_of = [&](Rational d) {
        return (d.num * s.cell.den) / (d.den * s.cell.num);
    };

    // The least rotation of a circular word starts at a run boundary.
    const int nruns = int(merged.size());
    std::string best_word;
    int best_rot = 0;
    for (int r = 0; r < nruns; ++r) {
        std::string w;
        for (int t = 0; t < nruns; ++t) {
            const SignalRun& run = merged[(r + t) % nruns];
            w.append(size_t(cells_of(run.duration)), mode_char(run.mode));
        }
        if (r == 0 || w < best_word) {
            best_word = w;
            best_rot = r;
        }
    }
    s.word = best_word;
    for (int t = 0; t < nruns; ++t) s.runs.push_back(merged[(best_rot + t) % nruns]);
    return s;
}

}  // namespace

SignalSpec extract_signal(const GraphSystem& gs, const GraphPath& path,
                          const DwellSystem& ds, Rational tau) {
    if (!path.closed)
        throw std::invalid_argument("extract_signal: path is not closed");
    std::vector<SignalRun> runs;
    for (int ei : path.edges) {
        const GraphEdge& e = gs.edges.at(ei);
        // A self-loop is a discretized flow step; a cross edge is the
        // mandatory dwell block of the mode it enters.
        runs.push_back({e.to, e.from == e.to ? tau : ds.dwell.at(e.to)});
    }
    return finalize_signal(runs, ds);
}

SignalSpec extract_signal_unconstrained(const std::vector<int>& word,
                                        const DwellSystem& ds, Rational tau) {
    if (word.empty()) throw std::invalid_argument("extract_signal: empty word");
    std::vector<SignalRun> runs;
    // The word lists factors in product order; the rightmost acts first.
    for (auto it = word.rbegin(); it != word.rend(); ++it)
        runs.push_back({*it, tau});
    return finalize_signal(runs, ds);
}

SwitchingLaw signal_to_law(const SignalSpec& signal, int periods) {
    if (periods < 1)
        throw std::invalid_argument("signal_to_law: need at least one period");
    SwitchingLaw law;
    for (int p = 0; p < periods; ++p)
        for (const SignalRun& r : signal.runs)
            law.events.push_back(
                {SwitchEvent::Kind::flow, r.mode, r.duration.value()});
    return law;
}

namespace {

// Product-order rendering with powers, e.g. "A1 A2 B~1^5".
std::string witness_text_of(const std::vector<std::string>& traversal_labels) {
    std::vector<std::string> prod(traversal_labels.rbegin(),
                                  traversal_labels.rend());
    std::string out;
    for (size_t i = 0; i < prod.size();) {
        size_t j = i;
        while (j < prod.size() && prod[j] == prod[i]) ++j;
        if (!out.empty()) out += ' ';
        out += prod[i];
        if (j - i > 1) out += "^" + std::to_string(j - i);
        i = j;
    }
    return out;
}

void fill_unconstrained(DwellReport& rep, const DwellSystem& ds, Rational tau,
                        const DwellOptions& opt) {
    rep.constrained = false;
    WeightedSystem sys;
    for (int k = 0; k < ds.mode_count(); ++k) {
        sys.matrices.push_back(expm(ds.generators[k], tau.value()));
        sys.weights.push_back(tau.value());
        sys.labels.push_back("B~" + std::to_string(k + 1));
    }
    const std::vector<Candidate> cands =
        find_candidates(sys, opt.max_len, opt.max_nodes);
    if (cands.empty() || !(cands.front().rho_c > 0.0)) {
        rep.error = "no closed product with positive spectral radius";
        return;
    }
    rep.beta = std::log(cands.front().rho_c);
    rep.rho = cands.front().rho_c;
    rep.witness = cands.front().product.word;
    std::vector<std::string> labels;
    // Word in product order; reverse into traversal order for rendering.
    for (auto it = rep.witness.rbegin(); it != rep.witness.rend(); ++it)
        labels.push_back(sys.label(*it));
    rep.witness_text = witness_text_of(labels);
    rep.signal = extract_signal_unconstrained(rep.witness, ds, tau);

    const IpaResult ipa = invariant_polytope_from(sys, cands, opt.ipa);
    rep.status = ipa.status;
    rep.rounds = ipa.rounds;
    rep.polytope = ipa.polytope;
    if (ipa.polytope.vertices.empty() || !ipa.polytope.spanning()) return;
    const double rho_used = ipa.candidate.rho_c;
    const double eps =
        ipa.status == IpaStatus::converged
            ? ipa.eps_extremal
            : measure_eps_extremal(dilate(sys, 1.0 / rho_used), ipa.polytope);
    rep.eps_extremal = eps;
    rep.mu_flow = mu_shift(ipa.polytope, ds.generators, opt.delta).mu;
    rep.mu = std::max(rep.mu_flow, std::log(rho_used) + eps);
    rep.mu_valid = std::isfinite(rep.mu);
}

void fill_constrained(DwellReport& rep, const DwellSystem& ds, Rational tau,
                      const DwellOptions& opt) {
    rep.constrained = true;
    const GraphSystem gs = build_dwell_graph(ds, tau.value());
    const std::vector<GraphCandidate> cands =
        find_graph_candidates(gs, opt.max_len, opt.max_nodes);
    if (cands.empty() || !(cands.front().rho_c > 0.0)) {
        rep.error = "no closed path with positive spectral radius";
        return;
    }
    rep.beta = std::log(cands.front().rho_c);
    rep.rho = cands.front().rho_c;
    rep.witness = cands.front().path.edges;
    std::vector<std::string> labels;
    for (int ei : rep.witness) labels.push_back(gs.edges[ei].label);
    rep.witness_text = witness_text_of(labels);
    rep.signal = extract_signal(gs, cands.front().path, ds, tau);

    const GraphIpaResult ipa = graph_invariant_polytope_from(gs, cands, opt.ipa);
    rep.status = ipa.status;
    rep.rounds = ipa.rounds;
    rep.multinorm = ipa.multinorm;
    if (!ipa.candidate.spectral_ok) return;
    for (const SymPolytope& p : ipa.multinorm.parts)
        if (p.vertices.empty() || !p.spanning()) return;
    const double rho_used = ipa.candidate.rho_c;
    const double eps = ipa.status == IpaStatus::converged
                           ? ipa.eps_extremal
                           : measure_multinorm_eps(gs, ipa.multinorm, rho_used);
    rep.eps_extremal = eps;
    double flow = -kInf;
    for (int k = 0; k < gs.vertex_count(); ++k)
        flow = std::max(
            flow, mu_shift(ipa.multinorm.parts[k], gs.generators[k], opt.delta).mu);
    rep.mu_flow = flow;
    rep.mu = std::max(rep.mu_flow, std::log(rho_used) + eps);
    rep.mu_valid = std::isfinite(rep.mu);
}

}  // namespace

std::vector<DwellReport> dwell_bounds(const DwellSystem& ds,
                                      const std::vector<Rational>& taus,
                                      const DwellOptions& opt) {
    ds.validate();
    if (taus.empty())
        throw std::invalid_argument("dwell_bounds: empty tau schedule");
    std::vector<DwellReport> out;
    for (const Rational& tau : taus) {
        DwellReport rep;
        rep.tau = tau;
        try {
            if (tau.num <= 0)
                throw std::invalid_argument("dwell_bounds: tau must be positive");
            if (dwell_unconstrained_at(ds, tau))
                fill_unconstrained(rep, ds, tau, opt);
            else
                fill_constrained(rep, ds, tau, opt);
        } catch (const std::exception& ex) {
            rep.error = ex.what();
            rep.mu_valid = false;
        }
        out.push_back(std::move(rep));
    }
    return out;
}

std::vector<Rational> default_tau_schedule(const DwellSystem& ds) {
    ds.validate();
    Rational least = ds.dwell.front();
    for (const Rational& r : ds.dwell)
        if (rat_cmp(r, least) < 0) least = r;
    return {least, rat_mul(least, make_rational(1, 2)),
            rat_mul(least, make_rational(1, 5)),
            rat_mul(least, make_rational(1, 10))};
}

}  // namespace wjsr
