#pragma once

#include "wjsr/matrix.hpp"

namespace wjsr {

// min c.x  s.t.  a_eq x = b_eq,  a_le x <= b_le,  lower <= x <= upper.
// Bounds may be +-infinity. Empty constraint blocks are allowed.
struct LpProblem {
    int num_vars = 0;
    Vec c;
    Mat a_eq;  // (may be 0 x num_vars)
    Vec b_eq;
    Mat a_le;
    Vec b_le;
    Vec lower;  // defaulted to -inf if empty
    Vec upper;  // defaulted to +inf if empty
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Vec x;
    double objective = 0.0;
    int iterations = 0;
};

struct LpOptions {
    double feastol = 1e-9;
    double opttol = 1e-9;
    long max_iterations = 100000;  // exceeded => NumericalError
    // Dantzig pricing switches to Bland's rule after this many pivots
    // without finishing (anti-cycling safeguard).
    long dantzig_limit = -1;  // default: 4 * (rows + cols)
};

// Deterministic dense simplex (two-phase, bounded variables). Identical
// inputs produce bit-identical solutions.
LpSolution lp_solve(const LpProblem& p, const LpOptions& opt = {});

}  // namespace wjsr
