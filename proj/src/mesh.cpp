#include "gradfem/mesh.hpp"

#include "gradfem/error.hpp"
#include "gradfem/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

namespace gradfem {

Mesh::Mesh(int dim, std::vector<Point> vertices, std::vector<Element> elements,
           std::vector<std::uint8_t> boundary)
    : dim_(dim), vertices_(std::move(vertices)), elements_(std::move(elements)),
      boundary_(std::move(boundary))
{
    GRADFEM_CHECK(dim_ == 2 || dim_ == 3, InvalidArgument, "mesh dimension must be 2 or 3");
    GRADFEM_CHECK(boundary_.size() == vertices_.size(), InvalidArgument,
                  "boundary flag count differs from vertex count");
    for (auto& el : elements_)
        if (dim_ == 2) el[3] = -1;
}

Simplex Mesh::simplex(std::size_t e) const
{
    Simplex s;
    s.dim = dim_;
    for (int i = 0; i <= dim_; ++i)
        s.v[static_cast<std::size_t>(i)] = vertex(elements_[e][static_cast<std::size_t>(i)]);
    return s;
}

Mesh::MetadataPtr Mesh::metadata(const SingularSource& src) const
{
    std::lock_guard<std::mutex> lock(cache_->mutex);
    if (!cache_->source || !same_source(*cache_->source, src)) {
        cache_->data = std::make_shared<const std::vector<ElementMetadata>>(compute_metadata(*this, src));
        cache_->source = src;
    }
    return cache_->data;
}

bool Mesh::has_metadata_for(const SingularSource& src) const
{
    std::lock_guard<std::mutex> lock(cache_->mutex);
    return cache_->source && same_source(*cache_->source, src);
}

std::vector<ElementMetadata> compute_metadata(const Mesh& mesh, const SingularSource& src)
{
    GRADFEM_CHECK(mesh.dim() == source_dim(src), InvalidArgument,
                  "mesh and source dimensions differ");
    std::vector<ElementMetadata> meta(mesh.num_elements());
    const auto* seg = std::get_if<SegmentMeasure>(&src);
    Point axis;
    if (seg) axis = (seg->b - seg->a) * (1.0 / seg->length());
    parallel_for(mesh.num_elements(), [&](std::size_t e) {
        const Simplex s = mesh.simplex(e);
        ElementMetadata m;
        m.r = simplex_source_distance(s, src);
        m.diameter = diameter(s);
        if (seg) {
            m.r_e = std::min(point_simplex_distance(seg->a, s), point_simplex_distance(seg->b, s));
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (int i = 0; i <= s.dim; ++i) {
                const double t = dot(s.v[static_cast<std::size_t>(i)], axis);
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
            m.axial = hi - lo;
            double tr = 0.0;
            for (int i = 0; i <= s.dim; ++i)
                for (int j = i + 1; j <= s.dim; ++j) {
                    const Point d = s.v[static_cast<std::size_t>(i)] - s.v[static_cast<std::size_t>(j)];
                    tr = std::max(tr, norm(d - axis * dot(d, axis)));
                }
            m.transverse = tr;
        } else {
            m.r_e = m.r;
            m.axial = m.transverse = m.diameter;
        }
        meta[e] = m;
    });
    return meta;
}

// ---------------------------------------------------------------------------

namespace {

using FacetKey = std::array<Index, 3>;

struct FacetHash {
    std::size_t operator()(const FacetKey& k) const noexcept
    {
        std::size_t h = static_cast<std::size_t>(k[0]) * 0x9E3779B97F4A7C15ULL;
        h ^= static_cast<std::size_t>(k[1]) + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2);
        h ^= static_cast<std::size_t>(k[2]) + 0x85EBCA77C2B2AE63ULL + (h << 6) + (h >> 2);
        return h;
    }
};

FacetKey facet_key(const Element& el, int dim, int skip)
{
    FacetKey k{-1, -1, -1};
    int n = 0;
    for (int i = 0; i <= dim; ++i)
        if (i != skip) k[static_cast<std::size_t>(n++)] = el[static_cast<std::size_t>(i)];
    std::sort(k.begin(), k.begin() + n);
    return k;
}

std::size_t count_duplicates(const std::vector<Point>& pts, double tol)
{
    // Bucket by a grid coarser than tol and compare against the neighboring cells.
    const double cell = 1e-9;
    using Key = std::array<long long, 3>;
    std::vector<std::pair<Key, Index>> keyed(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Key k{};
        for (int d = 0; d < 3; ++d)
            k[static_cast<std::size_t>(d)] = static_cast<long long>(std::floor(pts[i][d] / cell));
        keyed[i] = {k, static_cast<Index>(i)};
    }
    std::sort(keyed.begin(), keyed.end());
    std::size_t dups = 0;
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        const Key& k = keyed[i].first;
        bool found = false;
        for (long long dx = -1; dx <= 1 && !found; ++dx)
            for (long long dy = -1; dy <= 1 && !found; ++dy)
                for (long long dz = -1; dz <= 1 && !found; ++dz) {
                    const Key q{k[0] + dx, k[1] + dy, k[2] + dz};
                    auto it = std::lower_bound(keyed.begin(), keyed.end(), std::make_pair(q, Index{-1}));
                    for (; it != keyed.end() && it->first == q; ++it) {
                        if (it->second == keyed[i].second) continue;
                        if (distance(pts[static_cast<std::size_t>(it->second)],
                                     pts[static_cast<std::size_t>(keyed[i].second)]) <= tol) {
                            found = true;
                            break;
                        }
                    }
                }
        if (found) ++dups;
    }
    return dups;
}

}  // namespace

ValidationReport validate_mesh(const Mesh& mesh, const Domain* dom)
{
    ValidationReport rep;
    const int dim = mesh.dim();
    const auto nv = static_cast<Index>(mesh.num_vertices());
    rep.min_volume = std::numeric_limits<double>::infinity();

    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto el = mesh.element_span(e);
        bool ok = true;
        for (std::size_t i = 0; i < el.size(); ++i) {
            ok = ok && el[i] >= 0 && el[i] < nv;
            for (std::size_t j = 0; j < i; ++j) ok = ok && el[i] != el[j];
        }
        if (!ok) {
            rep.indices_ok = false;
            rep.messages.push_back("element " + std::to_string(e) + " has invalid vertex indices");
        }
    }
    if (!rep.indices_ok) return rep;

    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const double vol = signed_volume(mesh.simplex(e));
        rep.min_volume = std::min(rep.min_volume, vol);
        if (!(vol > 0.0)) {
            if (rep.inverted_elements < 5)
                rep.messages.push_back("element " + std::to_string(e) + " has non-positive volume " +
                                       std::to_string(vol));
            ++rep.inverted_elements;
        }
    }
    rep.orientation_ok = rep.inverted_elements == 0;

    std::unordered_map<FacetKey, int, FacetHash> facets;
    facets.reserve(mesh.num_elements() * static_cast<std::size_t>(dim + 1));
    for (std::size_t e = 0; e < mesh.num_elements(); ++e)
        for (int f = 0; f <= dim; ++f) ++facets[facet_key(mesh.element(e), dim, f)];

    // Boundary facets of a conforming mesh of a domain form a closed manifold:
    // every boundary ridge (vertex in 2D, edge in 3D) lies on exactly two of them.
    std::unordered_map<FacetKey, int, FacetHash> ridges;
    std::vector<std::uint8_t> on_boundary_facet(mesh.num_vertices(), 0);
    for (const auto& [key, count] : facets) {
        if (count > 2) ++rep.overshared_facets;
        if (count != 1) continue;
        bool interior_vertex = false;
        for (int i = 0; i < dim; ++i) {
            const Index v = key[static_cast<std::size_t>(i)];
            on_boundary_facet[static_cast<std::size_t>(v)] = 1;
            if (!mesh.is_boundary(v)) interior_vertex = true;
        }
        if (interior_vertex) ++rep.open_facets;
        if (dim == 2) {
            ++ridges[{key[0], -1, -1}];
            ++ridges[{key[1], -1, -1}];
        } else {
            ++ridges[{key[0], key[1], -1}];
            ++ridges[{key[0], key[2], -1}];
            ++ridges[{key[1], key[2], -1}];
        }
    }
    std::size_t bad_ridges = 0;
    for (const auto& [key, count] : ridges)
        if (count != 2) ++bad_ridges;
    rep.conformity_ok = rep.overshared_facets == 0 && rep.open_facets == 0 && bad_ridges == 0;
    if (rep.overshared_facets)
        rep.messages.push_back(std::to_string(rep.overshared_facets) + " facets shared by more than two elements");
    if (rep.open_facets)
        rep.messages.push_back(std::to_string(rep.open_facets) + " unmatched facets with interior vertices");
    if (bad_ridges)
        rep.messages.push_back(std::to_string(bad_ridges) + " non-manifold boundary ridges (hanging nodes)");

    for (Index v = 0; v < nv; ++v) {
        if (!mesh.is_boundary(v)) continue;
        bool bad = !on_boundary_facet[static_cast<std::size_t>(v)];
        if (dom && boundary_residual(mesh.vertex(v), *dom) > 1e-10) bad = true;
        if (bad) ++rep.boundary_mismatches;
    }
    rep.boundary_ok = rep.boundary_mismatches == 0;
    if (!rep.boundary_ok)
        rep.messages.push_back(std::to_string(rep.boundary_mismatches) + " inconsistent boundary flags");

    rep.duplicate_vertices = count_duplicates(mesh.vertices(), 1e-12);
    rep.duplicates_ok = rep.duplicate_vertices == 0;
    if (!rep.duplicates_ok)
        rep.messages.push_back(std::to_string(rep.duplicate_vertices) + " duplicate vertices");
    return rep;
}

// ---------------------------------------------------------------------------

const char* to_string(GradingStrategy s)
{
    switch (s) {
    case GradingStrategy::Uniform: return "uniform";
    case GradingStrategy::RescaledIsotropic: return "rescaled";
    case GradingStrategy::ConstructedIsotropic: return "constructed";
    case GradingStrategy::AnisotropicTensor: return "anisotropic";
    }
    return "unknown";
}

GradingStrategy parse_strategy(const std::string& name)
{
    if (name == "uniform") return GradingStrategy::Uniform;
    if (name == "rescaled") return GradingStrategy::RescaledIsotropic;
    if (name == "constructed" || name == "isotropic") return GradingStrategy::ConstructedIsotropic;
    if (name == "anisotropic") return GradingStrategy::AnisotropicTensor;
    fail(ErrorKind::InvalidArgument, "unknown grading strategy '" + name + "'");
}

void GradingSpec::validate() const
{
    GRADFEM_CHECK(mu > 0.0 && mu <= 1.0, InvalidArgument, "grading parameter mu must lie in (0,1]");
    GRADFEM_CHECK(h > 0.0, InvalidArgument, "mesh step h must be positive");
    GRADFEM_CHECK(tau > 0.0, InvalidArgument, "tau must be positive");
}

double effective_tau(double tau)
{
    return tau > 1.0 ? tau : 1.0 / tau;
}

double prescribed_size(double h, double mu, double r)
{
    if (r > 1.0) return h;
    const double floor_r = std::pow(h, 1.0 / mu);
    return h * std::pow(std::max(r, floor_r), 1.0 - mu);
}

GradingAudit grading_audit(const Mesh& mesh, const GradingSpec& spec, const SingularSource& src,
                           double factor)
{
    spec.validate();
    const auto meta = mesh.metadata(src);
    GradingAudit audit;
    audit.factor = factor;
    audit.min_ratio.resize(mesh.num_elements());
    audit.max_ratio.resize(mesh.num_elements());
    const auto* seg = std::get_if<SegmentMeasure>(&src);
    const double tau = effective_tau(spec.tau);
    // Rescaling R -> R^{1/mu} stretches radial spacing by its derivative, (1/mu) r^{1-mu}.
    const double scale = spec.strategy == GradingStrategy::RescaledIsotropic ? 1.0 / spec.mu : 1.0;
    audit.global_min = std::numeric_limits<double>::infinity();
    audit.global_max = 0.0;

    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& m = (*meta)[e];
        double lo = 0.0;
        double hi = 0.0;
        if (spec.strategy == GradingStrategy::Uniform) {
            lo = hi = m.diameter / spec.h;
        } else {
            bool tensor = false;
            if (seg && spec.strategy == GradingStrategy::AnisotropicTensor) {
                const Point c = mesh.simplex(e).barycenter();
                const double t = dot(c - seg->a, seg->b - seg->a) / (seg->length() * seg->length());
                const double rc = dist_to_source(c, src);
                const double rec = dist_to_endpoints(c, src);
                tensor = t > 0.0 && t < 1.0 && rc < 1.0 && !(rec < tau * rc);
            }
            if (tensor) {
                const double tr = m.transverse / prescribed_size(spec.h, spec.mu, m.r);
                const double ax = m.axial / prescribed_size(spec.h, spec.mu, m.r_e);
                lo = std::min(tr, ax);
                hi = std::max(tr, ax);
            } else {
                lo = hi = m.diameter / (scale * prescribed_size(spec.h, spec.mu, m.r));
            }
        }
        audit.min_ratio[e] = lo;
        audit.max_ratio[e] = hi;
        audit.global_min = std::min(audit.global_min, lo);
        audit.global_max = std::max(audit.global_max, hi);
        if (lo < 1.0 / factor || hi > factor) ++audit.violations;
    }
    return audit;
}

}  // namespace gradfem
