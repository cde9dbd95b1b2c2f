#include "gradfem/error.hpp"
#include "gradfem/generators.hpp"
#include "mesh_builder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace gradfem {

namespace {

Mesh refine_outer_zone(Mesh mesh, const Domain& dom, double half, double h);

// Half-length of a segment centered at the origin along the last axis.
double axis_half_length(const SegmentMeasure& src, int dim)
{
    GRADFEM_CHECK(src.a.dim() == dim, InvalidArgument, "segment dimension differs from domain");
    const double tol = 1e-12;
    for (int i = 0; i + 1 < dim; ++i)
        GRADFEM_CHECK(std::abs(src.a[i]) < tol && std::abs(src.b[i]) < tol, InvalidArgument,
                      "segment must lie on the last coordinate axis");
    GRADFEM_CHECK(std::abs(src.a[dim - 1] + src.b[dim - 1]) < tol, InvalidArgument,
                  "segment must be centered at the origin");
    const double half = 0.5 * src.length();
    GRADFEM_CHECK(half > 0.0, InvalidArgument, "segment has zero length");
    return half;
}

// Plane positions from -half to half, graded toward both ends.
std::vector<double> axial_planes(double h, double mu, double c, double half)
{
    const auto d = detail::graded_radii(h, mu, c, half);
    std::vector<double> z{-half};
    for (std::size_t i = 0; i + 1 < d.size(); ++i) z.push_back(-half + d[i]);
    z.push_back(0.0);
    for (std::size_t i = d.size() - 1; i-- > 0;) z.push_back(half - d[i]);
    z.push_back(half);
    return z;
}

// Extrudes the boundary of the inner zone along rays from the origin up to the
// domain boundary, in layers of thickness about `step`.
void add_outer_zone(detail::MeshBuilder& mb, const Domain& dom, double step)
{
    const auto facets = mb.boundary_facets();
    const int dim = mb.dim();
    std::map<Index, std::size_t> slot;
    for (const auto& f : facets)
        for (int i = 0; i < dim; ++i) slot.emplace(f[static_cast<std::size_t>(i)], 0);
    std::vector<Index> surface;
    std::vector<double> thickness;
    std::vector<Point> target;
    for (auto& [v, idx] : slot) {
        idx = surface.size();
        const Point p = mb.vertex(v);
        const Point q = boundary_project(p, dom);
        GRADFEM_CHECK(norm(q) > 1.02 * norm(p), ConstructionFailure,
                      "segment neighborhood is not strictly inside the domain");
        surface.push_back(v);
        thickness.push_back(distance(p, q));
        target.push_back(q);
    }
    std::vector<double> sorted = thickness;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
    const int layers = std::max(1, static_cast<int>(std::lround(sorted[sorted.size() / 2] / step)));

    std::vector<std::vector<Index>> at(static_cast<std::size_t>(layers + 1));
    at[0] = surface;
    for (int l = 1; l <= layers; ++l) {
        auto& row = at[static_cast<std::size_t>(l)];
        row.resize(surface.size());
        for (std::size_t i = 0; i < surface.size(); ++i) {
            const Point p = mb.vertex(surface[i]);
            const Point x = l == layers ? target[i] : p + (target[i] - p) * (static_cast<double>(l) / layers);
            row[i] = mb.add_vertex(x, l == layers);
        }
    }
    for (const auto& f : facets)
        for (int l = 0; l < layers; ++l) {
            const auto& lo = at[static_cast<std::size_t>(l)];
            const auto& hi = at[static_cast<std::size_t>(l + 1)];
            const std::size_t a = slot[f[0]];
            const std::size_t b = slot[f[1]];
            if (dim == 2) {
                mb.add_quad(lo[a], lo[b], hi[b], hi[a]);
            } else {
                const std::size_t c = slot[f[2]];
                mb.add_prism({lo[a], lo[b], lo[c], hi[a], hi[b], hi[c]});
            }
        }
}

Mesh segment_mesh_3d(const Domain& dom, double half, double h, double mu)
{
    const auto& k = mesh_constants();
    const auto rho = detail::graded_radii(h, mu, k.segment);
    const auto ks = detail::shell_schedule(rho);
    const auto z = axial_planes(h, mu, k.segment, half);

    // Cross-section: graded disk of L1 shells.
    detail::MeshBuilder section(2);
    const Index sc = section.add_vertex(Point(0.0, 0.0));
    std::map<std::array<int, 3>, Index> key2d;
    auto resolve2d = [&](int s, const detail::Lattice& p) {
        const std::array<int, 3> key{s, p[0], p[1]};
        auto it = key2d.find(key);
        if (it != key2d.end()) return it->second;
        const Point d = detail::lattice_direction(2, p, ks[static_cast<std::size_t>(s)]);
        const Index v = section.add_vertex(d * rho[static_cast<std::size_t>(s)]);
        key2d.emplace(key, v);
        return v;
    };
    detail::build_shell_layers(section, 2, false, ks, sc, resolve2d);
    const auto n2 = static_cast<Index>(section.num_vertices());
    const double est = static_cast<double>(n2) * static_cast<double>(z.size()) * 1.6;
    detail::check_budget(est, "anisotropic segment mesh");

    detail::MeshBuilder mb(3);
    for (double zj : z)
        for (Index i = 0; i < n2; ++i) {
            const Point& p = section.vertex(i);
            mb.add_vertex(Point(p[0], p[1], zj));
        }
    for (std::size_t j = 0; j + 1 < z.size(); ++j) {
        const Index lo = static_cast<Index>(j) * n2;
        const Index hi = lo + n2;
        for (const auto& t : section.elements())
            mb.add_prism({lo + t[0], lo + t[1], lo + t[2], hi + t[0], hi + t[1], hi + t[2]});
    }

    // Endpoint caps: half shells sharing the end-plane vertices on their equator.
    for (int side : {1, -1}) {
        const Index plane = side > 0 ? static_cast<Index>(z.size() - 1) * n2 : 0;
        const double zc = side * half;
        std::map<std::array<int, 4>, Index> reg;
        auto resolve = [&](int s, const detail::Lattice& p) {
            if (p[2] == 0) return plane + key2d.at({s, p[0], p[1]});
            const std::array<int, 4> key{s, p[0], p[1], p[2]};
            auto it = reg.find(key);
            if (it != reg.end()) return it->second;
            const Point d = detail::lattice_direction(3, p, ks[static_cast<std::size_t>(s)]) *
                            rho[static_cast<std::size_t>(s)];
            const Index v = mb.add_vertex(Point(d[0], d[1], zc + side * k.cap_axial * d[2]));
            reg.emplace(key, v);
            return v;
        };
        detail::build_shell_layers(mb, 3, true, ks, plane + sc, resolve);
    }
    add_outer_zone(mb, dom, k.segment * h);
    return refine_outer_zone(std::move(mb).finish(), dom, half, h);
}

Mesh segment_mesh_2d(const Domain& dom, double half, double h, double mu)
{
    const auto& k = mesh_constants();
    const auto rho = detail::graded_radii(h, mu, k.segment);
    const auto ks = detail::shell_schedule(rho);
    const auto y = axial_planes(h, mu, k.segment, half);
    const auto m = static_cast<Index>(rho.size());
    const Index row = 2 * m + 1;  // x = -rho_m .. 0 .. rho_m
    detail::check_budget(static_cast<double>(row) * static_cast<double>(y.size()) * 1.6,
                         "anisotropic segment mesh");

    detail::MeshBuilder mb(2);
    for (double yj : y)
        for (Index ix = 0; ix < row; ++ix) {
            const Index off = ix - m;
            const double x = off == 0 ? 0.0 : std::copysign(rho[static_cast<std::size_t>(std::abs(off) - 1)], off);
            mb.add_vertex(Point(x, yj));
        }
    for (std::size_t j = 0; j + 1 < y.size(); ++j) {
        const Index lo = static_cast<Index>(j) * row;
        const Index hi = lo + row;
        for (Index ix = 0; ix + 1 < row; ++ix) mb.add_quad(lo + ix, lo + ix + 1, hi + ix + 1, hi + ix);
    }
    for (int side : {1, -1}) {
        const Index line = side > 0 ? static_cast<Index>(y.size() - 1) * row : 0;
        const double yc = side * half;
        std::map<std::array<int, 3>, Index> reg;
        auto resolve = [&](int s, const detail::Lattice& p) {
            if (p[1] == 0) return line + m + (p[0] > 0 ? s + 1 : -(s + 1));
            const std::array<int, 3> key{s, p[0], p[1]};
            auto it = reg.find(key);
            if (it != reg.end()) return it->second;
            const Point d = detail::lattice_direction(2, p, ks[static_cast<std::size_t>(s)]) *
                            rho[static_cast<std::size_t>(s)];
            const Index v = mb.add_vertex(Point(d[0], yc + side * k.cap_axial * d[1]));
            reg.emplace(key, v);
            return v;
        };
        detail::build_shell_layers(mb, 2, true, ks, line + m, resolve);
    }
    add_outer_zone(mb, dom, k.segment * h);
    return refine_outer_zone(std::move(mb).finish(), dom, half, h);
}

// Refines the layered outer zone until its elements are quasi-uniform of size
// about h. Closure may bisect a few inner elements along the interface.
Mesh refine_outer_zone(Mesh mesh, const Domain& dom, double half, double h)
{
    const auto& k = mesh_constants();
    const int ax = mesh.dim() - 1;
    auto inner = [&](const Point& x) {
        double rho2 = 0.0;
        for (int i = 0; i < ax; ++i) rho2 += x[i] * x[i];
        const double over = std::max(0.0, std::abs(x[ax]) - half) / k.cap_axial;
        return rho2 + over * over < 1.0;
    };
    return refine_until(mesh, dom, [&](const Simplex& t) {
        return inner(t.barycenter()) || diameter(t) <= k.far * h;
    });
}

void check_segment_args(const Domain& dom, double h, double mu)
{
    GRADFEM_CHECK(std::isfinite(h) && h > 0.0 && h < 1.0, InvalidArgument,
                  "segment meshes need 0 < h < 1");
    GRADFEM_CHECK(mu > 0.0 && mu <= 1.0, InvalidArgument, "grading parameter mu must lie in (0,1]");
    const int dim = domain_dim(dom);
    GRADFEM_CHECK(dim == 3 ? !std::holds_alternative<UnitBall>(dom) : true, InvalidArgument,
                  "the unit ball does not contain the unit neighborhood of the segment");
}

}  // namespace

Mesh anisotropic_segment_mesh(const Domain& dom, const SegmentMeasure& src, double h, double mu,
                              double tau)
{
    check_segment_args(dom, h, mu);
    GRADFEM_CHECK(tau > 0.0, InvalidArgument, "tau must be positive");
    const int dim = domain_dim(dom);
    const double half = axis_half_length(src, dim);
    return dim == 3 ? segment_mesh_3d(dom, half, h, mu) : segment_mesh_2d(dom, half, h, mu);
}

Mesh isotropic_segment_mesh(const Domain& dom, const SegmentMeasure& src, double h, double mu)
{
    check_segment_args(dom, h, mu);
    const int dim = domain_dim(dom);
    const double half = axis_half_length(src, dim);
    Mesh base = dim == 3 ? segment_mesh_3d(dom, half, h, 1.0) : segment_mesh_2d(dom, half, h, 1.0);
    if (mu == 1.0) return base;
    const double c = mesh_constants().isotropic;
    const double floor_r = std::pow(h, 1.0 / mu);
    const SingularSource s = src;
    const double est = static_cast<double>(base.num_vertices()) * 4.0 / (3.0 * mu - (dim == 3 ? 1.0 : 0.0) + 0.05);
    detail::check_budget(est, "isotropic segment mesh");
    return refine_until(base, dom, [&](const Simplex& t) {
        const double r = simplex_source_distance(t, s);
        const double target = r > 1.0 ? c * h : c * h * std::pow(std::max(r, floor_r), 1.0 - mu);
        return diameter(t) <= target;
    });
}

}  // namespace gradfem
