#pragma once

#include "gradfem/mesh.hpp"

#include <array>
#include <functional>
#include <vector>

namespace gradfem::detail {

/// Incremental simplex list; orientation is normalized on insertion.
class MeshBuilder {
public:
    explicit MeshBuilder(int dim) : dim_(dim) {}

    Index add_vertex(const Point& p, bool boundary = false);
    void set_boundary(Index v, bool b = true) { boundary_[static_cast<std::size_t>(v)] = b ? 1 : 0; }
    void move_vertex(Index v, const Point& p) { verts_[static_cast<std::size_t>(v)] = p; }
    [[nodiscard]] const Point& vertex(Index v) const { return verts_[static_cast<std::size_t>(v)]; }
    [[nodiscard]] std::size_t num_vertices() const { return verts_.size(); }
    [[nodiscard]] std::size_t num_elements() const { return elems_.size(); }
    [[nodiscard]] const std::vector<Element>& elements() const { return elems_; }
    [[nodiscard]] int dim() const { return dim_; }

    void add_triangle(Index a, Index b, Index c);
    void add_tet(Index a, Index b, Index c, Index d);
    /// Quadrilateral a-b-c-d (cyclic), split along the diagonal through its lowest index.
    void add_quad(Index a, Index b, Index c, Index d);
    /// Triangular prism with bottom (0,1,2) and top (3,4,5), vertex 3+i above i,
    /// split into three tets so that every quad face uses the diagonal through
    /// its lowest index. Neighboring prisms therefore always conform.
    void add_prism(const std::array<Index, 6>& v);

    /// Vertex indices of the facets that belong to exactly one element.
    [[nodiscard]] std::vector<std::array<Index, 3>> boundary_facets() const;

    Mesh finish() &&;

private:
    void push(Element el);

    int dim_;
    std::vector<Point> verts_;
    std::vector<std::uint8_t> boundary_;
    std::vector<Element> elems_;
};

/// Integer point of an L1 shell {|a|+|b|(+|c|) = k}.
using Lattice = std::array<int, 3>;

/// Facets of the L1 shell of radius k: segments when ldim == 2, triangles when
/// ldim == 3. With `half` only the part with last coordinate >= 0 is returned.
std::vector<std::array<Lattice, 3>> shell_facets(int ldim, int k, bool half);

/// Unit direction assigned to a shell lattice point. Points on a coordinate
/// plane get equal-angle spacing, so a 3D shell restricted to c = 0 coincides
/// with the 2D shell of the same k.
Point lattice_direction(int ldim, const Lattice& p, int k);

using LatticeResolver = std::function<Index(int shell, const Lattice& p)>;

/// Fills the region between nested L1 shells. Shell s has lattice radius ks[s];
/// consecutive radii must be equal or doubled. The innermost shell is coned to
/// `center`.
void build_shell_layers(MeshBuilder& mb, int ldim, bool half, const std::vector<int>& ks,
                        Index center, const LatticeResolver& resolve);

/// Doubling schedule: ks[0] = base, doubled whenever the arc spacing at the next
/// shell exceeds sqrt(2) times the local layer thickness.
std::vector<int> shell_schedule(const std::vector<double>& radii, int base = 1);

/// Schedule k_s = base 2^j_s following per-shell targets `need`, over odd bases
/// 1..7. The finer base choice keeps vertex counts smooth in h.
std::vector<int> smooth_shell_schedule(const std::vector<double>& need);

/// Radii r_1 = c h^{1/mu}, r_{i+1} = r_i + c h r_i^{1-mu}, the last one snapped to `outer`.
std::vector<double> graded_radii(double h, double mu, double c, double outer = 1.0);

/// Throws resource-limit when `estimate` exceeds the configured vertex budget.
void check_budget(double estimate, const char* what);

}  // namespace gradfem::detail
