#pragma once

#include "gradfem/simplex.hpp"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace gradfem {

/// Volume rule on the reference simplex: barycentric nodes and weights that
/// sum to one (multiply by the simplex measure).
struct QuadratureRule {
    int dim = 2;
    int degree = 0;
    std::vector<std::array<double, 4>> nodes;
    std::vector<double> weights;
};

/// Symmetric degree-3 rules with interior nodes: 4 points in 2D, 5 in 3D.
const QuadratureRule& degree3_rule(int dim);

/// Gauss-Legendre nodes and weights on [0,1] exact for polynomials of the given degree.
struct LineRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
LineRule gauss_legendre(int degree);

/// Integral of f over s with the rule applied once.
double integrate(const Simplex& s, const QuadratureRule& rule,
                 const std::function<double(const Point&, const std::array<double, 4>&)>& f);

/// Splits s into 2^dim children by edge midpoints (red refinement). Children
/// that keep a vertex of s come first, in vertex order.
std::vector<Simplex> red_refine(const Simplex& s);

}  // namespace gradfem
