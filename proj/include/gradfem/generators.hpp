#pragma once

#include "gradfem/geometry.hpp"
#include "gradfem/mesh.hpp"

#include <cstddef>

namespace gradfem {

/// Upper bound on generated vertex counts; generators fail with
/// resource-limit before allocating beyond it.
void set_vertex_budget(std::size_t max_vertices);
[[nodiscard]] std::size_t vertex_budget();

/// Size constants of the constructed families. Defaults give vertex counts
/// within a factor of two of the reference studies.
struct MeshConstants {
    double disk = 1.6;        // 2D constructed rings
    double ball = 0.8;        // 3D constructed shells
    double segment = 1.25;    // segment cross-section and axial planes
    double cap_axial = 0.6;   // axial compression of the endpoint caps
    double isotropic = 2.0;   // size bound factor of the bisection-refined meshes
    double far = 2.0;         // diameter bound factor outside the segment neighborhood
};
[[nodiscard]] const MeshConstants& mesh_constants();
void set_mesh_constants(const MeshConstants& c);

/// Quasi-uniform mesh of step h. UnitDisk: concentric rings of step h with
/// round(2*pi*i) points on ring i. UnitBall: octahedral shells. Ellipsoid: the
/// mu = 1 member of the segment family.
Mesh uniform_mesh(const Domain& dom, double h);

/// Moves every vertex q != center to center + (q-center) |q-center|^{(1-mu)/mu}.
/// Throws GradingError naming the first inverted element.
Mesh grade_by_rescaling(const Mesh& mesh, double mu, const Point& center);

/// Unit disk with ring radii r_1 = c h^{1/mu}, r_{i+1} = r_i + c h r_i^{1-mu}.
Mesh graded_disk_by_construction(double h, double mu);

/// Unit ball with octahedral shells at the same radius recurrence.
Mesh graded_ball_by_construction(double h, double mu);
/// Unit ball with uniform shells mapped by R -> R^{1/mu}.
Mesh rescaled_ball(double h, double mu);

/// Tensor-product mesh around an axis-aligned centered segment: graded
/// cylinder core, graded caps at the endpoints, layered outer zone up to the
/// boundary of `dom` (Ellipsoid in 3D, a CustomDomain ellipse in 2D).
Mesh anisotropic_segment_mesh(const Domain& dom, const SegmentMeasure& src, double h, double mu,
                              double tau);

/// Isotropically graded mesh: the mu = 1 segment mesh refined by longest-edge
/// bisection until h_T <= c h max(r_T, h^{1/mu})^{1-mu}.
Mesh isotropic_segment_mesh(const Domain& dom, const SegmentMeasure& src, double h, double mu);

/// Conforming longest-edge bisection until `target(simplex)` holds for every
/// element. Midpoints of boundary edges are projected onto `dom`.
Mesh refine_until(const Mesh& mesh, const Domain& dom,
                  const std::function<bool(const Simplex&)>& fine_enough,
                  std::size_t max_elements = 50'000'000);

}  // namespace gradfem
