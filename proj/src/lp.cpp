#include "wjsr/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace wjsr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite(double v) { return std::isfinite(v); }

// Internal tableau state for the bounded-variable revised simplex.
// Columns 0..n_struct-1 are the user's variables, then one slack per
// inequality row, then one artificial per row (phase 1 only).
struct Work {
    int rows = 0;
    int cols = 0;           // structural + slack + artificial
    int num_artificial = 0;
    Mat a{0, 0};            // rows x cols
    Vec b;
    Vec lo, hi;             // per-column bounds
    Vec cost;               // current-phase cost
    std::vector<int> basis;          // size rows, column index per row
    std::vector<char> in_basis;      // size cols
    Vec x;                  // size cols, current values
    long iterations = 0;
};

Vec basic_values(const Work& w, const Lu& fac) {
    // b - N x_N, then solve B xB = rhs.
    Vec rhs = w.b;
    for (int j = 0; j < w.cols; ++j) {
        if (w.in_basis[j] || w.x[j] == 0.0) continue;
        for (int i = 0; i < w.rows; ++i) rhs[i] -= w.a(i, j) * w.x[j];
    }
    return lu_solve(fac, rhs);
}

Mat basis_matrix(const Work& w) {
    Mat bm(w.rows, w.rows);
    for (int i = 0; i < w.rows; ++i)
        for (int k = 0; k < w.rows; ++k) bm(i, k) = w.a(i, w.basis[k]);
    return bm;
}

// One simplex phase over the current cost vector. Returns false if the
// problem is unbounded in this phase.
bool run_phase(Work& w, const LpOptions& opt, long dantzig_limit) {
    const double drop = 1e-11;  // pivot magnitudes below this count as zero
    while (true) {
        if (w.iterations >= opt.max_iterations)
            throw NumericalError("lp_solve: iteration limit exceeded");
        Mat bm = basis_matrix(w);
        Lu fac = lu_factor(bm);
        if (fac.singular) throw NumericalError("lp_solve: singular basis");
        Vec xb = basic_values(w, fac);
        for (int i = 0; i < w.rows; ++i) w.x[w.basis[i]] = xb[i];

        // Simplex multipliers: solve B^T y = c_B.
        Mat bt = bm.transpose();
        Lu fact = lu_factor(bt);
        Vec cb(w.rows);
        for (int i = 0; i < w.rows; ++i) cb[i] = w.cost[w.basis[i]];
        Vec y = lu_solve(fact, cb);

        // Pricing: find an entering column.
        const bool bland = w.iterations >= dantzig_limit;
        int enter = -1;
        double enter_dir = 0.0;
        double best = opt.opttol;
        for (int j = 0; j < w.cols; ++j) {
            if (w.in_basis[j]) continue;
            if (w.lo[j] == w.hi[j]) continue;  // fixed, cannot move
            double d = w.cost[j];
            for (int i = 0; i < w.rows; ++i) d -= y[i] * w.a(i, j);
            const bool at_lo = finite(w.lo[j]) && w.x[j] <= w.lo[j] + 1e-12 * (1.0 + std::fabs(w.lo[j]));
            const bool at_hi = finite(w.hi[j]) && w.x[j] >= w.hi[j] - 1e-12 * (1.0 + std::fabs(w.hi[j]));
            const bool is_free = !finite(w.lo[j]) && !finite(w.hi[j]);
            double dir = 0.0;
            double viol = 0.0;
            if ((at_lo || is_free) && d < -opt.opttol) {
                dir = 1.0;
                viol = -d;
            } else if ((at_hi || is_free) && d > opt.opttol) {
                dir = -1.0;
                viol = d;
            }
            if (dir == 0.0) continue;
            if (bland) { enter = j; enter_dir = dir; break; }
            if (viol > best) {
                best = viol;
                enter = j;
                enter_dir = dir;
            }
        }
        if (enter < 0) return true;  // optimal for this phase

        // Direction through the basis: solve B d = A_enter.
        Vec col(w.rows);
        for (int i = 0; i < w.rows; ++i) col[i] = w.a(i, enter);
        Vec d = lu_solve(fac, col);

        // Ratio test. Entering variable moves by t*enter_dir >= 0.
        double t_max = kInf;
        int leave = -1;       // row index of the leaving basic variable
        double leave_pivot = 0.0;
        if (finite(w.lo[enter]) && finite(w.hi[enter]))
            t_max = w.hi[enter] - w.lo[enter];  // bound flip distance
        for (int i = 0; i < w.rows; ++i) {
            const double step = enter_dir * d[i];  // xB_i changes by -step*t
            if (std::fabs(step) <= drop) continue;
            const int bj = w.basis[i];
            double limit = kInf;
            if (step > 0.0 && finite(w.lo[bj]))
                limit = (w.x[bj] - w.lo[bj]) / step;
            else if (step < 0.0 && finite(w.hi[bj]))
                limit = (w.x[bj] - w.hi[bj]) / step;
            if (limit < 0.0) limit = 0.0;  // tiny infeasibility: degenerate step
            const bool better =
                limit < t_max - 1e-12 ||
                (limit < t_max + 1e-12 &&
                 (leave < 0 ||
                  (bland ? bj < w.basis[leave]
                         : std::fabs(d[i]) > std::fabs(leave_pivot))));
            if (better) {
                t_max = std::min(t_max, limit);
                leave = i;
                leave_pivot = d[i];
            }
        }
        if (!finite(t_max)) return false;  // unbounded ray

        ++w.iterations;
        if (leave < 0) {
            // Bound flip: entering variable jumps to its opposite bound.
            w.x[enter] = enter_dir > 0.0 ? w.hi[enter] : w.lo[enter];
            continue;
        }
        // Pivot: entering replaces basis[leave].
        const int out = w.basis[leave];
        w.x[enter] = w.x[enter] + enter_dir * t_max;
        w.in_basis[out] = 0;
        w.in_basis[enter] = 1;
        // Leaving variable lands on the bound that blocked the step.
        const double step = enter_dir * leave_pivot;
        w.x[out] = step > 0.0 ? w.lo[out] : w.hi[out];
        w.basis[leave] = enter;
    }
}

}  // namespace

LpSolution lp_solve(const LpProblem& p, const LpOptions& opt) {
    const int n = p.num_vars;
    if (n < 0) throw std::invalid_argument("lp_solve: negative num_vars");
    const int m_eq = p.a_eq.rows();
    const int m_le = p.a_le.rows();
    if ((m_eq > 0 && p.a_eq.cols() != n) || (m_le > 0 && p.a_le.cols() != n))
        throw std::invalid_argument("lp_solve: constraint width mismatch");
    if (int(p.b_eq.size()) != m_eq || int(p.b_le.size()) != m_le)
        throw std::invalid_argument("lp_solve: rhs length mismatch");
    if (int(p.c.size()) != n)
        throw std::invalid_argument("lp_solve: cost length mismatch");
    Vec lo = p.lower.empty() ? Vec(n, -kInf) : p.lower;
    Vec hi = p.upper.empty() ? Vec(n, kInf) : p.upper;
    if (int(lo.size()) != n || int(hi.size()) != n)
        throw std::invalid_argument("lp_solve: bound length mismatch");
    for (double v : p.c)
        if (!finite(v)) throw std::invalid_argument("lp_solve: nonfinite cost");
    for (double v : p.b_eq)
        if (!finite(v)) throw std::invalid_argument("lp_solve: nonfinite rhs");
    for (double v : p.b_le)
        if (!finite(v)) throw std::invalid_argument("lp_solve: nonfinite rhs");

    LpSolution sol;
    for (int j = 0; j < n; ++j) {
        if (lo[j] > hi[j] + opt.feastol) {
            sol.status = LpStatus::infeasible;
            return sol;
        }
        if (lo[j] > hi[j]) hi[j] = lo[j];  // collapse tiny crossings
    }

    const int rows = m_eq + m_le;
    Work w;
    w.rows = rows;
    w.num_artificial = rows;
    w.cols = n + m_le + rows;
    w.a = Mat(rows, w.cols);
    w.b = Vec(rows, 0.0);
    for (int i = 0; i < m_eq; ++i) {
        for (int j = 0; j < n; ++j) w.a(i, j) = p.a_eq(i, j);
        w.b[i] = p.b_eq[i];
    }
    for (int i = 0; i < m_le; ++i) {
        for (int j = 0; j < n; ++j) w.a(m_eq + i, j) = p.a_le(i, j);
        w.a(m_eq + i, n + i) = 1.0;  // slack
        w.b[m_eq + i] = p.b_le[i];
    }
    w.lo = Vec(w.cols, 0.0);
    w.hi = Vec(w.cols, kInf);
    for (int j = 0; j < n; ++j) {
        w.lo[j] = lo[j];
        w.hi[j] = hi[j];
    }
    // Slacks: [0, inf). Artificials: [0, inf) for now.

    // Start nonbasic structurals at a finite bound (0 for free variables).
    w.x = Vec(w.cols, 0.0);
    for (int j = 0; j < n; ++j) {
        if (finite(w.lo[j]))
            w.x[j] = w.lo[j];
        else if (finite(w.hi[j]))
            w.x[j] = w.hi[j];
        else
            w.x[j] = 0.0;
    }
    for (int i = 0; i < m_le; ++i) {
        // Start slacks at lower bound 0; artificial absorbs the residual.
        w.x[n + i] = 0.0;
    }

    // Initial basis: prefer the slack when it can absorb the residual,
    // otherwise an artificial with sign chosen so it starts >= 0.
    w.in_basis.assign(w.cols, 0);
    w.basis.resize(rows);
    for (int i = 0; i < rows; ++i) {
        double resid = w.b[i];
        for (int j = 0; j < n; ++j) resid -= w.a(i, j) * w.x[j];
        const int aj = n + m_le + i;
        const bool is_le = i >= m_eq;
        if (is_le && resid >= 0.0) {
            const int sj = n + (i - m_eq);
            w.x[sj] = resid;
            w.basis[i] = sj;
            w.in_basis[sj] = 1;
            w.a(i, aj) = 1.0;  // artificial column present but nonbasic at 0
        } else {
            w.a(i, aj) = resid >= 0.0 ? 1.0 : -1.0;
            w.x[aj] = std::fabs(resid);
            w.basis[i] = aj;
            w.in_basis[aj] = 1;
        }
    }

    const long dantzig_limit =
        opt.dantzig_limit >= 0 ? opt.dantzig_limit : 4L * (rows + w.cols);

    // Phase 1: minimize the sum of artificials.
    w.cost = Vec(w.cols, 0.0);
    for (int i = 0; i < rows; ++i) w.cost[n + m_le + i] = 1.0;
    if (!run_phase(w, opt, dantzig_limit))
        throw NumericalError("lp_solve: phase 1 reported unbounded");
    double art_sum = 0.0;
    for (int i = 0; i < rows; ++i) art_sum += std::fabs(w.x[n + m_le + i]);
    double bscale = 1.0;
    for (double v : w.b) bscale = std::max(bscale, std::fabs(v));
    if (art_sum > opt.feastol * bscale * 10.0) {
        sol.status = LpStatus::infeasible;
        sol.iterations = int(w.iterations);
        return sol;
    }
    // Freeze artificials at zero so they cannot re-enter.
    for (int i = 0; i < rows; ++i) {
        const int aj = n + m_le + i;
        w.lo[aj] = 0.0;
        w.hi[aj] = 0.0;
        if (!w.in_basis[aj]) w.x[aj] = 0.0;
    }

    // Phase 2: original objective.
    w.cost = Vec(w.cols, 0.0);
    for (int j = 0; j < n; ++j) w.cost[j] = p.c[j];
    if (!run_phase(w, opt, dantzig_limit)) {
        sol.status = LpStatus::unbounded;
        sol.iterations = int(w.iterations);
        return sol;
    }

    sol.status = LpStatus::optimal;
    sol.x = Vec(w.x.begin(), w.x.begin() + n);
    sol.objective = 0.0;
    for (int j = 0; j < n; ++j) sol.objective += p.c[j] * sol.x[j];
    sol.iterations = int(w.iterations);
    return sol;
}

}  // namespace wjsr
