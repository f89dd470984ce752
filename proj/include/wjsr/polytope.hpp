#pragma once

#include <string>
#include <vector>

#include "wjsr/matrix.hpp"

namespace wjsr {

// Symmetric polytope P = absco{v_1, ..., v_s}: the convex hull of the
// vertices and their negatives. Spanning iff the vertices span R^dim.
struct SymPolytope {
    int dim = 0;
    std::vector<Vec> vertices;

    bool spanning() const;  // rank of the vertex matrix == dim
};

// Minkowski norm |x|_P = min { sum_i |t_i| : x = sum_i t_i v_i }.
// Returns +infinity when x is outside the span of the vertices
// (P is then only a seminorm ball on the span).
double polytope_norm(const SymPolytope& p, const Vec& x);

// |x|_P <= 1 - eta, i.e. x lies strictly inside the unit ball of P.
bool is_interior(const SymPolytope& p, const Vec& x, double eta = 1e-10);

// Drops duplicates (up to sign) and vertices inside the hull of the rest.
SymPolytope reduce_vertices(const SymPolytope& p, double eta = 1e-12);

// Smallest shift mu for which every field x' = (B - mu I) x points into P
// at each vertex, for every generator B. Computed from the forward step
// v + delta (B - mu I) v elementof P per vertex (a small LP) and refined by
// Richardson extrapolation in delta. +infinity if some step leaves the
// span of a non-spanning polytope.
struct ShiftResult {
    double mu = 0.0;
    int argmax_vertex = -1;  // vertex index attaining the bound
    int argmax_matrix = -1;  // generator index attaining the bound
};
ShiftResult mu_shift(const SymPolytope& p, const std::vector<Mat>& gens,
                     double delta = 1e-4);

// Serialization: {"dim": d, "vertices": [[..], ..]}.
std::string polytope_to_json(const SymPolytope& p);
SymPolytope polytope_from_json(const std::string& text);

// 2-D only: outline of the unit ball (convex hull of +-vertices) as a
// standalone SVG document. Every vertex pair is marked with a dot.
std::string polytope_to_svg(const SymPolytope& p, int size = 480);

}  // namespace wjsr
