#pragma once

#include "gradfem/assembly.hpp"
#include "gradfem/geometry.hpp"
#include "gradfem/mesh.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gradfem {

/// Closed-form solution with its analytic gradient. Both throw
/// singular-evaluation on the singular set.
struct ExactSolution {
    std::function<double(const Point&)> value;
    std::function<Point(const Point&)> gradient;
};

/// -log(r) / (2 pi) on the unit disk, point source at the origin.
double exact_point_2d(const Point& x);
Point exact_point_2d_gradient(const Point& x);

/// (1/r - 1) / (4 pi) on the unit ball, point source at the origin.
double exact_point_3d(const Point& x);
Point exact_point_3d_gradient(const Point& x);

/// Potential of the unit-density segment from (0,0,-1) to (0,0,1), shifted to
/// vanish on the ellipsoid x^2/3 + y^2/3 + z^2/4 = 1.
double exact_segment_3d(const Point& x);
Point exact_segment_3d_gradient(const Point& x);

ExactSolution point_2d_solution();
ExactSolution point_3d_solution();
/// Solution for line density `density` (the potential scales linearly).
ExactSolution segment_3d_solution(double density = 1.0);

enum class NormKind { L2Weighted, H1SemiWeighted };

struct WeightedNormSpec {
    NormKind kind = NormKind::L2Weighted;
    double exponent = 0.0;  // beta for ||v r^beta||, sigma for ||grad v r^sigma||
    SingularSource source = PointDelta{};
    int base_order = 3;
    int depth = 3;  // red-refinement levels on elements touching the singular set

    void validate(int dim) const;
};

/// Weighted error between the exact solution and the P1 field with nodal
/// values `uh` (one per mesh vertex).
double weighted_error(const Mesh& mesh, const Vector& uh, const ExactSolution& exact,
                      const WeightedNormSpec& spec);

/// Nodal values of the truncated interpolant: zero on every vertex of an
/// element whose vertex patch meets the singular set, exact values elsewhere.
Vector truncated_interpolant(const Mesh& mesh, const ExactSolution& exact, const SingularSource& src);

struct StudyRecord {
    int level = 0;
    double h = 0.0;
    std::size_t vertices = 0;
    std::size_t elements = 0;
    std::map<std::string, double> errors;
    double seconds = 0.0;
};

struct EocFit {
    double order = 0.0;
    double residual = 0.0;  // RMS of the least-squares fit in log space
};

struct EocReport {
    bool defined = false;  // needs two or more records
    std::map<std::string, EocFit> by_h;
    std::map<std::string, EocFit> by_n;
};

/// by_h: slope of -log(err) against -log(h). by_n: dim times the slope of
/// -log(err) against log(N).
EocReport estimate_eoc(const std::vector<StudyRecord>& records, int dim);

/// Least-squares slope of y against x with the RMS residual.
EocFit fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gradfem
