#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wjsr/matrix.hpp"

// Shared internals of the invariant-polytope constructions (single family
// and graph multinorm variants).
namespace wjsr {
namespace detail {

// Equal to an existing vertex up to sign, relative to its magnitude. The
// polytope is symmetric, so -v adds nothing v does not.
inline bool near_duplicate(const Vec& w, const Vec& v, double tol) {
    double dplus = 0.0, dminus = 0.0;
    for (size_t k = 0; k < w.size(); ++k) {
        dplus = std::max(dplus, std::fabs(w[k] - v[k]));
        dminus = std::max(dminus, std::fabs(w[k] + v[k]));
    }
    const double scale = std::max(1.0, norm_inf(v));
    return std::min(dplus, dminus) <= tol * scale;
}

// Dimension of the linear span of the vertices (modified Gram-Schmidt).
inline int span_rank(const std::vector<Vec>& verts, int d) {
    std::vector<Vec> basis;
    for (const Vec& v : verts) {
        Vec u = v;
        for (const Vec& b : basis) {
            const double c = dot(u, b);
            for (int k = 0; k < d; ++k) u[k] -= c * b[k];
        }
        const double n = norm2(u);
        if (n > 1e-10 * std::max(1.0, norm2(v))) {
            for (double& x : u) x /= n;
            basis.push_back(u);
        }
        if (int(basis.size()) == d) break;
    }
    return int(basis.size());
}

// A unit vector orthogonal to the span of the vertices, picking the least
// coordinate direction with a nonzero residual. Used to upgrade a
// seminorm-only vertex set to a spanning one.
inline Vec complement_direction(const std::vector<Vec>& verts, int d) {
    std::vector<Vec> basis;
    for (const Vec& v : verts) {
        Vec u = v;
        for (const Vec& b : basis) {
            const double c = dot(u, b);
            for (int k = 0; k < d; ++k) u[k] -= c * b[k];
        }
        const double n = norm2(u);
        if (n > 1e-10 * std::max(1.0, norm2(v))) {
            for (double& x : u) x /= n;
            basis.push_back(u);
        }
        if (int(basis.size()) == d) break;
    }
    for (int j = 0; j < d; ++j) {
        Vec u(d, 0.0);
        u[j] = 1.0;
        for (const Vec& b : basis) {
            const double c = dot(u, b);
            for (int k = 0; k < d; ++k) u[k] -= c * b[k];
        }
        const double n = norm2(u);
        if (n > 1e-8) {
            for (double& x : u) x /= n;
            return u;
        }
    }
    throw NumericalError("complement_direction: span already full");
}

}  // namespace detail
}  // namespace wjsr
