#pragma once

#include "gradfem/geometry.hpp"
#include "gradfem/simplex.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gradfem {

using Index = std::int32_t;
using Element = std::array<Index, 4>;  // dim+1 entries used; trailing entry -1 in 2D

/// Cached per-element quantities relative to a singular source.
struct ElementMetadata {
    double r = 0.0;           // distance from T to the singular set
    double r_e = 0.0;         // distance from T to the segment endpoints (= r for points)
    double diameter = 0.0;    // h_T
    double transverse = 0.0;  // extent orthogonal to the segment axis
    double axial = 0.0;       // extent along the segment axis
};

/// Conforming simplicial mesh. Immutable once built.
class Mesh {
public:
    Mesh() = default;
    Mesh(int dim, std::vector<Point> vertices, std::vector<Element> elements,
         std::vector<std::uint8_t> boundary);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t num_vertices() const noexcept { return vertices_.size(); }
    [[nodiscard]] std::size_t num_elements() const noexcept { return elements_.size(); }
    [[nodiscard]] const std::vector<Point>& vertices() const noexcept { return vertices_; }
    [[nodiscard]] const std::vector<Element>& elements() const noexcept { return elements_; }
    [[nodiscard]] const std::vector<std::uint8_t>& boundary() const noexcept { return boundary_; }
    [[nodiscard]] const Point& vertex(Index i) const { return vertices_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const Element& element(std::size_t e) const { return elements_[e]; }
    [[nodiscard]] bool is_boundary(Index i) const { return boundary_[static_cast<std::size_t>(i)] != 0; }
    [[nodiscard]] Simplex simplex(std::size_t e) const;
    [[nodiscard]] std::span<const Index> element_span(std::size_t e) const
    {
        return {elements_[e].data(), static_cast<std::size_t>(dim_ + 1)};
    }

    using MetadataPtr = std::shared_ptr<const std::vector<ElementMetadata>>;

    /// Metadata relative to `src`, computed on first use and cached.
    [[nodiscard]] MetadataPtr metadata(const SingularSource& src) const;
    [[nodiscard]] bool has_metadata_for(const SingularSource& src) const;

private:
    int dim_ = 2;
    std::vector<Point> vertices_;
    std::vector<Element> elements_;
    std::vector<std::uint8_t> boundary_;
    struct MetadataCache {
        std::mutex mutex;
        std::optional<SingularSource> source;
        MetadataPtr data;
    };
    std::shared_ptr<MetadataCache> cache_ = std::make_shared<MetadataCache>();
};

std::vector<ElementMetadata> compute_metadata(const Mesh& mesh, const SingularSource& src);

// --- validation ----------------------------------------------------------

struct ValidationReport {
    bool indices_ok = true;
    bool orientation_ok = true;
    bool conformity_ok = true;
    bool boundary_ok = true;
    bool duplicates_ok = true;
    std::size_t inverted_elements = 0;
    std::size_t overshared_facets = 0;  // facets shared by more than two elements
    std::size_t open_facets = 0;        // single-element facets with an interior vertex
    std::size_t boundary_mismatches = 0;
    std::size_t duplicate_vertices = 0;
    double min_volume = 0.0;
    std::vector<std::string> messages;

    [[nodiscard]] bool passed() const noexcept
    {
        return indices_ok && orientation_ok && conformity_ok && boundary_ok && duplicates_ok;
    }
};

/// Checks orientation, facet conformity, boundary flags and duplicate vertices.
/// When `dom` is given the boundary-flagged vertices are checked against it.
ValidationReport validate_mesh(const Mesh& mesh, const Domain* dom = nullptr);

// --- grading audit -------------------------------------------------------

enum class GradingStrategy { Uniform, RescaledIsotropic, ConstructedIsotropic, AnisotropicTensor };

const char* to_string(GradingStrategy s);
GradingStrategy parse_strategy(const std::string& name);

struct GradingSpec {
    double mu = 1.0;
    double h = 0.1;
    GradingStrategy strategy = GradingStrategy::Uniform;
    double tau = 0.8;

    void validate() const;
};

/// Effective endpoint-cone constant: values at or below 1 are read as the
/// reciprocal, so that {r_e < tau r} is never empty.
double effective_tau(double tau);

struct GradingAudit {
    std::vector<double> min_ratio;  // per element, over directions
    std::vector<double> max_ratio;
    double global_min = 0.0;
    double global_max = 0.0;
    std::size_t violations = 0;  // elements outside [1/factor, factor]
    double factor = 4.0;

    [[nodiscard]] bool passed() const noexcept { return violations == 0; }
    [[nodiscard]] double spread() const noexcept { return global_max / global_min; }
};

/// Prescribed isotropic size for an element at distance r from the singular set.
double prescribed_size(double h, double mu, double r);

GradingAudit grading_audit(const Mesh& mesh, const GradingSpec& spec, const SingularSource& src,
                           double factor = 4.0);

// --- I/O -----------------------------------------------------------------

void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);
void write_mesh_file(const std::string& path, const Mesh& mesh);
Mesh read_mesh_file(const std::string& path);

/// Legacy VTK ASCII unstructured grid; optional named point fields.
struct PointField {
    std::string name;
    std::span<const double> values;
};
void write_vtk(std::ostream& out, const Mesh& mesh, std::span<const PointField> fields = {});
void write_vtk_file(const std::string& path, const Mesh& mesh,
                    std::span<const PointField> fields = {});

}  // namespace gradfem
