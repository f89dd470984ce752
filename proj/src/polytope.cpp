#include "wjsr/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wjsr/lp.hpp"

namespace wjsr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_polytope(const SymPolytope& p) {
    if (p.dim <= 0) throw std::invalid_argument("polytope: dim must be positive");
    if (p.vertices.empty())
        throw std::invalid_argument("polytope: no vertices");
    for (const Vec& v : p.vertices) {
        if (int(v.size()) != p.dim)
            throw std::invalid_argument("polytope: vertex dimension mismatch");
        for (double t : v)
            if (!std::isfinite(t))
                throw std::invalid_argument("polytope: nonfinite vertex");
    }
}

// min sum |t_i| s.t. sum t_i v_i = x, with t_i = pos_i - neg_i.
// Extra free column (scaled x itself) may be appended by the caller.
LpProblem expansion_problem(const SymPolytope& p, const Vec& x) {
    const int s = int(p.vertices.size());
    const int d = p.dim;
    LpProblem lp;
    lp.num_vars = 2 * s;
    lp.c = Vec(2 * s, 1.0);
    lp.a_eq = Mat(d, 2 * s);
    lp.b_eq = x;
    for (int j = 0; j < s; ++j)
        for (int i = 0; i < d; ++i) {
            lp.a_eq(i, j) = p.vertices[j][i];
            lp.a_eq(i, s + j) = -p.vertices[j][i];
        }
    lp.lower = Vec(2 * s, 0.0);
    lp.upper = Vec(2 * s, kInf);
    return lp;
}

}  // namespace

bool SymPolytope::spanning() const {
    check_polytope(*this);
    const int s = int(vertices.size());
    if (s < dim) return false;
    // Rank via column-pivoted elimination on the d x s vertex matrix.
    Mat m(dim, s);
    for (int j = 0; j < s; ++j)
        for (int i = 0; i < dim; ++i) m(i, j) = vertices[j][i];
    double scale = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < s; ++j) scale = std::max(scale, std::fabs(m(i, j)));
    if (scale == 0.0) return false;
    int rank = 0;
    for (int col = 0; col < s && rank < dim; ++col) {
        int piv = rank;
        for (int i = rank; i < dim; ++i)
            if (std::fabs(m(i, col)) > std::fabs(m(piv, col))) piv = i;
        if (std::fabs(m(piv, col)) <= 1e-12 * scale) continue;
        for (int j = 0; j < s; ++j) std::swap(m(rank, j), m(piv, j));
        for (int i = rank + 1; i < dim; ++i) {
            const double f = m(i, col) / m(rank, col);
            for (int j = col; j < s; ++j) m(i, j) -= f * m(rank, j);
        }
        ++rank;
    }
    return rank == dim;
}

double polytope_norm(const SymPolytope& p, const Vec& x) {
    check_polytope(p);
    if (int(x.size()) != p.dim)
        throw std::invalid_argument("polytope_norm: dimension mismatch");
    LpSolution sol = lp_solve(expansion_problem(p, x));
    if (sol.status == LpStatus::infeasible) return kInf;
    if (sol.status != LpStatus::optimal)
        throw NumericalError("polytope_norm: solver failed");
    return sol.objective;
}

bool is_interior(const SymPolytope& p, const Vec& x, double eta) {
    const double n = polytope_norm(p, x);
    return n <= 1.0 - eta;
}

SymPolytope reduce_vertices(const SymPolytope& p, double eta) {
    check_polytope(p);
    const int s = int(p.vertices.size());
    std::vector<char> alive(s, 1);
    // Pass 1: exact duplicates up to sign (keep the earliest).
    for (int i = 0; i < s; ++i) {
        if (!alive[i]) continue;
        const double si = norm_inf(p.vertices[i]);
        if (si == 0.0) {
            alive[i] = 0;  // origin is never a vertex of a nontrivial ball
            continue;
        }
        for (int j = i + 1; j < s; ++j) {
            if (!alive[j]) continue;
            double dplus = 0.0, dminus = 0.0;
            for (int k = 0; k < p.dim; ++k) {
                dplus = std::max(dplus, std::fabs(p.vertices[j][k] - p.vertices[i][k]));
                dminus = std::max(dminus, std::fabs(p.vertices[j][k] + p.vertices[i][k]));
            }
            if (std::min(dplus, dminus) <= 1e-9 * std::max(1.0, si)) alive[j] = 0;
        }
    }
    // Pass 2: drop vertices expressible by the others.
    for (int i = 0; i < s; ++i) {
        if (!alive[i]) continue;
        SymPolytope rest;
        rest.dim = p.dim;
        for (int j = 0; j < s; ++j)
            if (alive[j] && j != i) rest.vertices.push_back(p.vertices[j]);
        if (rest.vertices.empty()) continue;
        const double n = polytope_norm(rest, p.vertices[i]);
        if (n <= 1.0 + eta) alive[i] = 0;
    }
    SymPolytope out;
    out.dim = p.dim;
    for (int i = 0; i < s; ++i)
        if (alive[i]) out.vertices.push_back(p.vertices[i]);
    if (out.vertices.empty()) out.vertices.push_back(p.vertices.front());
    return out;
}

namespace {

// max over vertices/generators of min { mu : v + delta (B - mu I) v in P }.
ShiftResult mu_shift_at(const SymPolytope& p, const std::vector<Mat>& gens,
                        double delta) {
    ShiftResult best;
    best.mu = -kInf;
    const int s = int(p.vertices.size());
    for (int g = 0; g < int(gens.size()); ++g) {
        const Mat& b = gens[g];
        if (b.rows() != p.dim || b.cols() != p.dim)
            throw std::invalid_argument("mu_shift: generator dimension mismatch");
        for (int vi = 0; vi < s; ++vi) {
            const Vec& v = p.vertices[vi];
            Vec target = v;
            const Vec bv = mat_vec(b, v);
            for (int k = 0; k < p.dim; ++k) target[k] += delta * bv[k];
            // Variables: expansion coefficients plus free mu; the equality
            // block absorbs delta*mu*v on the left-hand side.
            LpProblem lp = expansion_problem(p, target);
            const int base = lp.num_vars;
            lp.num_vars += 1;
            lp.c.push_back(0.0);
            lp.lower.push_back(-kInf);
            lp.upper.push_back(kInf);
            Mat a_eq(p.dim, lp.num_vars);
            for (int i = 0; i < p.dim; ++i) {
                for (int j = 0; j < base; ++j) a_eq(i, j) = lp.a_eq(i, j);
                a_eq(i, base) = delta * v[i];
            }
            lp.a_eq = a_eq;
            // sum (pos + neg) <= 1 keeps the step inside the unit ball.
            lp.a_le = Mat(1, lp.num_vars);
            for (int j = 0; j < base; ++j) lp.a_le(0, j) = 1.0;
            lp.b_le = Vec(1, 1.0);
            // Objective: minimize mu only.
            for (int j = 0; j < base; ++j) lp.c[j] = 0.0;
            lp.c[base] = 1.0;
            LpSolution sol = lp_solve(lp);
            double mu;
            if (sol.status == LpStatus::infeasible)
                mu = kInf;  // flow leaves the span: no finite shift works
            else if (sol.status != LpStatus::optimal)
                throw NumericalError("mu_shift: solver failed");
            else
                mu = sol.objective;
            if (mu > best.mu) {
                best.mu = mu;
                best.argmax_vertex = vi;
                best.argmax_matrix = g;
            }
        }
    }
    return best;
}

}  // namespace

ShiftResult mu_shift(const SymPolytope& p, const std::vector<Mat>& gens,
                     double delta) {
    check_polytope(p);
    if (gens.empty()) throw std::invalid_argument("mu_shift: no generators");
    if (!(delta > 0.0)) throw std::invalid_argument("mu_shift: delta must be positive");
    ShiftResult full = mu_shift_at(p, gens, delta);
    ShiftResult half = mu_shift_at(p, gens, delta / 2.0);
    if (!std::isfinite(full.mu) || !std::isfinite(half.mu)) {
        half.mu = kInf;
        return half;
    }
    // First-order bias cancels: mu(delta) = mu* + C delta + O(delta^2).
    ShiftResult out = half;
    out.mu = 2.0 * half.mu - full.mu;
    return out;
}

std::string polytope_to_json(const SymPolytope& p) {
    check_polytope(p);
    nlohmann::json j;
    j["dim"] = p.dim;
    j["vertices"] = nlohmann::json::array();
    for (const Vec& v : p.vertices) j["vertices"].push_back(v);
    return j.dump(2);
}

SymPolytope polytope_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("polytope_from_json: ") + e.what());
    }
    SymPolytope p;
    if (!j.contains("dim") || !j.contains("vertices"))
        throw std::invalid_argument("polytope_from_json: missing dim/vertices");
    p.dim = j.at("dim").get<int>();
    for (const auto& row : j.at("vertices"))
        p.vertices.push_back(row.get<Vec>());
    check_polytope(p);
    return p;
}

std::string polytope_to_svg(const SymPolytope& p, int size) {
    check_polytope(p);
    if (p.dim != 2)
        throw std::invalid_argument("polytope_to_svg: only 2-D polytopes");
    std::vector<Vec> pts;
    for (const Vec& v : p.vertices) {
        pts.push_back(v);
        pts.push_back(Vec{-v[0], -v[1]});
    }
    // Convex hull, monotone chain.
    std::vector<Vec> sorted = pts;
    std::sort(sorted.begin(), sorted.end(), [](const Vec& a, const Vec& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    sorted.erase(std::unique(sorted.begin(), sorted.end(),
                             [](const Vec& a, const Vec& b) {
                                 return a[0] == b[0] && a[1] == b[1];
                             }),
                 sorted.end());
    auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Vec> hull;
    if (sorted.size() >= 3) {
        for (const Vec& q : sorted) {
            while (hull.size() >= 2 &&
                   cross(hull[hull.size() - 2], hull.back(), q) <= 0.0)
                hull.pop_back();
            hull.push_back(q);
        }
        const size_t lower = hull.size() + 1;
        for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
            while (hull.size() >= lower &&
                   cross(hull[hull.size() - 2], hull.back(), *it) <= 0.0)
                hull.pop_back();
            hull.push_back(*it);
        }
        hull.pop_back();
    } else {
        hull = sorted;
    }
    double extent = 1e-12;
    for (const Vec& q : pts)
        extent = std::max({extent, std::fabs(q[0]), std::fabs(q[1])});
    const double pad = 0.1 * size;
    const double scale = (size - 2.0 * pad) / (2.0 * extent);
    auto sx = [&](double x) { return size / 2.0 + scale * x; };
    auto sy = [&](double y) { return size / 2.0 - scale * y; };
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
        << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << " "
        << size << "\">\n";
    svg << "  <line x1=\"0\" y1=\"" << size / 2.0 << "\" x2=\"" << size
        << "\" y2=\"" << size / 2.0 << "\" stroke=\"#ccc\"/>\n";
    svg << "  <line x1=\"" << size / 2.0 << "\" y1=\"0\" x2=\"" << size / 2.0
        << "\" y2=\"" << size << "\" stroke=\"#ccc\"/>\n";
    if (!hull.empty()) {
        svg << "  <polygon points=\"";
        for (size_t i = 0; i < hull.size(); ++i) {
            if (i) svg << " ";
            svg << sx(hull[i][0]) << "," << sy(hull[i][1]);
        }
        svg << "\" fill=\"#4477aa22\" stroke=\"#4477aa\" stroke-width=\"1.5\"/>\n";
    }
    for (size_t i = 0; i < p.vertices.size(); ++i) {
        for (int sign : {+1, -1}) {
            const double x = sign * p.vertices[i][0];
            const double y = sign * p.vertices[i][1];
            svg << "  <circle cx=\"" << sx(x) << "\" cy=\"" << sy(y)
                << "\" r=\"3\" fill=\"#aa3333\"/>\n";
            svg << "  <text x=\"" << sx(x) + 5 << "\" y=\"" << sy(y) - 5
                << "\" font-size=\"11\" fill=\"#444\">"
                << (sign > 0 ? "v" : "-v") << i << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace wjsr
