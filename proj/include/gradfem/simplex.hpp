#pragma once

#include "gradfem/geometry.hpp"

#include <array>
#include <optional>
#include <span>
#include <utility>

namespace gradfem {

/// Vertices of a triangle (dim 2, first three used) or tetrahedron (dim 3).
struct Simplex {
    int dim = 2;
    std::array<Point, 4> v{};

    [[nodiscard]] int num_vertices() const noexcept { return dim + 1; }
    [[nodiscard]] Point barycenter() const noexcept;
};

/// Signed measure: positive for counter-clockwise triangles / right-handed tets.
double signed_volume(const Simplex& s) noexcept;
double diameter(const Simplex& s) noexcept;

/// Barycentric coordinates of x with respect to s.
std::array<double, 4> barycentric(const Simplex& s, const Point& x) noexcept;

/// Constant gradients of the barycentric (P1 nodal) functions.
std::array<Point, 4> barycentric_gradients(const Simplex& s) noexcept;

double point_segment_distance(const Point& x, const Point& a, const Point& b) noexcept;
double segment_segment_distance(const Point& p0, const Point& p1, const Point& q0,
                                const Point& q1) noexcept;
double point_simplex_distance(const Point& x, const Simplex& s) noexcept;

/// Portion [t0, t1] (parameters in [0,1]) of the segment a + t(b-a) inside s,
/// with facets inflated by `tol` in barycentric units.
std::optional<std::pair<double, double>> clip_segment(const Simplex& s, const Point& a,
                                                      const Point& b, double tol = 0.0) noexcept;

double segment_simplex_distance(const Point& a, const Point& b, const Simplex& s) noexcept;

/// Distance from the simplex to the singular set.
double simplex_source_distance(const Simplex& s, const SingularSource& src) noexcept;

}  // namespace gradfem
