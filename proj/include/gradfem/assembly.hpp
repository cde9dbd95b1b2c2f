#pragma once

#include "gradfem/geometry.hpp"
#include "gradfem/mesh.hpp"

#include <Eigen/Sparse>

#include <array>
#include <string>
#include <vector>

namespace gradfem {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Reduced Dirichlet system over the non-boundary vertices.
struct SparseSystem {
    SparseMatrix matrix;
    Vector rhs;
    std::vector<Index> free_vertices;  // system index -> mesh vertex
    std::vector<Index> system_index;   // mesh vertex -> system index, -1 on the boundary

    [[nodiscard]] std::size_t size() const noexcept { return free_vertices.size(); }
    /// Full nodal vector with zeros on boundary vertices.
    [[nodiscard]] Vector expand(const Vector& u) const;
};

/// Element stiffness vol * G G^T with G the barycentric gradients.
std::array<std::array<double, 4>, 4> local_stiffness(const Simplex& s);

/// Full P1 stiffness matrix over all vertices.
SparseMatrix assemble_stiffness(const Mesh& mesh);

/// Element containing x (lowest index among all containing elements).
/// Throws point-location-failure when x is outside the mesh.
std::size_t locate_point(const Mesh& mesh, const Point& x);

/// b_i = phi_i(x0).
Vector assemble_rhs_point(const Mesh& mesh, const Point& x0);

/// b_i = integral over the segment of phi_i times the density, with Gauss
/// rules exact to `quad_order` on every sub-interval cut by element facets.
Vector assemble_rhs_segment(const Mesh& mesh, const SegmentMeasure& src, int quad_order = 3);

/// Dispatches on the source type.
Vector assemble_rhs(const Mesh& mesh, const SingularSource& src, int quad_order = 3);

/// Removes boundary rows and columns (homogeneous data).
SparseSystem apply_dirichlet(const SparseMatrix& a, const Vector& b, const Mesh& mesh);

/// Matrix Market coordinate export of the reduced matrix and a companion
/// array file `<path>.rhs` for the right-hand side.
void write_matrix_market(const std::string& path, const SparseSystem& sys);

}  // namespace gradfem
