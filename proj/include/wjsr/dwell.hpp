#pragma once

#include <string>
#include <vector>

#include "wjsr/graph.hpp"
#include "wjsr/matrix.hpp"
#include "wjsr/mixed.hpp"

namespace wjsr {

// Exact arithmetic for dwell times and discretization steps, so that the
// dwell constraint on extracted signals can be checked without rounding.
struct Rational {
    long long num = 0;
    long long den = 1;  // always > 0, gcd(|num|, den) == 1

    double value() const { return double(num) / double(den); }
};

Rational make_rational(long long num, long long den);
Rational parse_rational(const std::string& text);  // "3", "2/5", "0.4"
Rational rat_add(Rational a, Rational b);
Rational rat_sub(Rational a, Rational b);
Rational rat_mul(Rational a, Rational b);
Rational rat_gcd(Rational a, Rational b);  // positive generator of sums
int rat_cmp(Rational a, Rational b);       // sign of a - b
std::string to_string(Rational r);

// Continuous-time switching system whose switching signals must stay in
// mode k for at least dwell_k time units per visit.
struct DwellSystem {
    std::vector<Mat> generators;     // B_1..B_m
    std::vector<Rational> dwell;     // guaranteed dwell times, > 0

    int dim() const;
    int mode_count() const { return int(generators.size()); }
    void validate() const;
    Vec dwell_values() const;
};

// Graph encoding of the dwell constraint for discretization step tau:
// one vertex per mode; entering mode j (edge i -> j, i != j) applies the
// mandatory block e^{dwell_j B_j} and costs dwell_j; staying applies the
// step e^{tau B_j} on a self-loop of weight tau. Every closed path spells
// an admissible periodic signal and vice versa.
GraphSystem build_dwell_graph(const DwellSystem& ds, double tau);

// tau no smaller than every dwell time: each run of n >= 1 steps already
// lasts at least the dwell, so the constraint is vacuous and the family
// reduces to the unconstrained steps {e^{tau B_k}} with weight tau.
bool dwell_unconstrained_at(const DwellSystem& ds, Rational tau);

// Periodic switching signal as merged (mode, duration) runs, plus the
// uniform cell representation "1112"-style used for reporting.
struct SignalRun {
    int mode = 0;        // 0-based
    Rational duration;
};
struct SignalSpec {
    std::vector<SignalRun> runs;  // consecutive modes differ; lex-least rotation
    Rational cell;                // common divisor of all durations
    std::string word;             // one digit/letter per cell, e.g. "1111122"
    Rational period() const;
};

// Decode a closed path of the dwell graph into its periodic signal and
// check the dwell constraint exactly.
SignalSpec extract_signal(const GraphSystem& gs, const GraphPath& path,
                          const DwellSystem& ds, Rational tau);

// Signal from a word over the unconstrained step family (all runs are
// multiples of tau).
SignalSpec extract_signal_unconstrained(const std::vector<int>& word,
                                        const DwellSystem& ds, Rational tau);

// Switching law spanning `periods` repetitions of the signal, for the
// simulator (flows only; dwell systems have no jump matrices).
SwitchingLaw signal_to_law(const SignalSpec& signal, int periods);

struct DwellReport {
    Rational tau;
    double beta = 0.0;           // lower bound on the Lyapunov exponent
    double rho = 0.0;            // e^beta
    double mu = 0.0;             // upper bound, valid only if mu_valid
    bool mu_valid = false;
    double mu_flow = 0.0;        // largest per-vertex flow shift
    double eps_extremal = 0.0;
    bool constrained = true;     // false when tau made the graph unnecessary
    std::vector<int> witness;    // edge sequence (constrained) or mode word
    std::string witness_text;    // e.g. "B1^5 A1 A2"
    SignalSpec signal;
    IpaStatus status = IpaStatus::budget_exceeded;
    int rounds = 0;
    Multinorm multinorm;         // constrained case: one polytope per mode
    SymPolytope polytope;        // unconstrained case
    std::string error;           // nonempty when this step failed outright
};

struct DwellOptions {
    int max_len = 64;
    long max_nodes = 2'000'000;
    double delta = 1e-4;
    IpaOptions ipa;
};

// One report per discretization step. Failures are isolated per step.
std::vector<DwellReport> dwell_bounds(const DwellSystem& ds,
                                      const std::vector<Rational>& taus,
                                      const DwellOptions& opt = {});

// Default refinement schedule {1, 1/2, 1/5, 1/10} scaled by the least
// dwell time.
std::vector<Rational> default_tau_schedule(const DwellSystem& ds);

}  // namespace wjsr
