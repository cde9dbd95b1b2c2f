#include "gradfem/error.hpp"
#include "gradfem/generators.hpp"
#include "mesh_builder.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

namespace gradfem {

namespace {

std::atomic<std::size_t> g_budget{8'000'000};
MeshConstants g_constants;

struct Ring {
    Index start = 0;
    int count = 0;
};

// Triangulates the strip between two rings of equally spaced points that both
// start at angle 0, always closing the triangle with the shorter new edge.
void march_strip(detail::MeshBuilder& mb, const Ring& in, const Ring& out)
{
    auto at_in = [&](int j) { return in.start + j % in.count; };
    auto at_out = [&](int j) { return out.start + j % out.count; };
    int i = 0;
    int j = 0;
    while (i < in.count || j < out.count) {
        bool inner = false;
        if (j >= out.count) {
            inner = true;
        } else if (i < in.count) {
            const double d_inner = distance(mb.vertex(at_in(i + 1)), mb.vertex(at_out(j)));
            const double d_outer = distance(mb.vertex(at_out(j + 1)), mb.vertex(at_in(i)));
            inner = d_inner < d_outer;
        }
        if (inner) {
            mb.add_triangle(at_in(i), at_in(i + 1), at_out(j));
            ++i;
        } else {
            mb.add_triangle(at_in(i), at_out(j + 1), at_out(j));
            ++j;
        }
    }
}

Mesh ring_disk(const std::vector<double>& radii, const std::vector<int>& counts)
{
    detail::MeshBuilder mb(2);
    const Index center = mb.add_vertex(Point(0.0, 0.0));
    std::vector<Ring> rings;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        Ring r{static_cast<Index>(mb.num_vertices()), counts[i]};
        const bool outer = i + 1 == radii.size();
        for (int j = 0; j < counts[i]; ++j) {
            const double a = 2.0 * std::numbers::pi * j / counts[i];
            Point p = outer ? Point(std::cos(a), std::sin(a))
                            : Point(radii[i] * std::cos(a), radii[i] * std::sin(a));
            mb.add_vertex(p, outer);
        }
        rings.push_back(r);
    }
    for (int j = 0; j < rings[0].count; ++j)
        mb.add_triangle(center, rings[0].start + j, rings[0].start + (j + 1) % rings[0].count);
    for (std::size_t i = 0; i + 1 < rings.size(); ++i) march_strip(mb, rings[i], rings[i + 1]);
    return std::move(mb).finish();
}

using ShellKey = std::array<int, 4>;

// Shells at `radii`; `size(r)` is the intended spacing at radius r, and each
// shell gets about (pi/2) r / size(r) lattice steps per octant edge.
Mesh shell_ball(const std::vector<double>& radii, const std::function<double(double)>& size)
{
    std::vector<double> need;
    for (double r : radii) need.push_back(std::numbers::pi / 2.0 * r / size(r));
    const auto ks = detail::smooth_shell_schedule(need);
    detail::MeshBuilder mb(3);
    const Index center = mb.add_vertex(Point(0.0, 0.0, 0.0));
    std::map<ShellKey, Index> registry;
    const int last = static_cast<int>(radii.size()) - 1;
    auto resolve = [&](int s, const detail::Lattice& p) {
        const ShellKey key{s, p[0], p[1], p[2]};
        auto it = registry.find(key);
        if (it != registry.end()) return it->second;
        const Point dir = detail::lattice_direction(3, p, ks[static_cast<std::size_t>(s)]);
        const Index v = mb.add_vertex(dir * radii[static_cast<std::size_t>(s)], s == last);
        registry.emplace(key, v);
        return v;
    };
    detail::build_shell_layers(mb, 3, false, ks, center, resolve);
    return std::move(mb).finish();
}

std::vector<double> uniform_radii(double h)
{
    const int k = std::max(1, static_cast<int>(std::lround(1.0 / h)));
    std::vector<double> radii;
    for (int i = 1; i <= k; ++i) radii.push_back(static_cast<double>(i) / k);
    return radii;
}

void check_step(double h, double mu)
{
    GRADFEM_CHECK(std::isfinite(h) && h > 0.0, InvalidArgument, "mesh step h must be positive");
    GRADFEM_CHECK(mu > 0.0 && mu <= 1.0, InvalidArgument, "grading parameter mu must lie in (0,1]");
}

}  // namespace

void set_vertex_budget(std::size_t max_vertices)
{
    g_budget = max_vertices;
}

std::size_t vertex_budget()
{
    return g_budget;
}

const MeshConstants& mesh_constants()
{
    return g_constants;
}

void set_mesh_constants(const MeshConstants& c)
{
    g_constants = c;
}

Mesh uniform_mesh(const Domain& dom, double h)
{
    check_step(h, 1.0);
    if (std::holds_alternative<UnitDisk>(dom)) {
        GRADFEM_CHECK(h < 2.0, InvalidArgument, "h must be below the disk diameter");
        const auto radii = uniform_radii(h);
        detail::check_budget(std::numbers::pi * radii.size() * radii.size(), "uniform disk");
        std::vector<int> counts;
        for (std::size_t i = 1; i <= radii.size(); ++i)
            counts.push_back(static_cast<int>(std::lround(2.0 * std::numbers::pi * static_cast<double>(i))));
        return ring_disk(radii, counts);
    }
    if (std::holds_alternative<UnitBall>(dom)) {
        GRADFEM_CHECK(h < 2.0, InvalidArgument, "h must be below the ball diameter");
        detail::check_budget(2.0 * 4.0 * std::numbers::pi / (3.0 * h * h * h), "uniform ball");
        const auto radii = uniform_radii(h);
        const double step = 1.0 / static_cast<double>(radii.size());
        return shell_ball(radii, [step](double) { return step; });
    }
    if (std::holds_alternative<Ellipsoid>(dom))
        return anisotropic_segment_mesh(dom, axis_segment(3, 1.0, 1.0), h, 1.0, 0.8);
    if (const auto* c = std::get_if<CustomDomain>(&dom); c && c->dim == 2)
        return anisotropic_segment_mesh(dom, axis_segment(2, 1.0, 1.0), h, 1.0, 0.8);
    fail(ErrorKind::InvalidArgument, "uniform_mesh: unsupported domain");
}

Mesh grade_by_rescaling(const Mesh& mesh, double mu, const Point& center)
{
    check_step(1.0, mu);
    GRADFEM_CHECK(center.dim() == mesh.dim(), InvalidArgument, "center dimension differs from mesh");
    const double expo = (1.0 - mu) / mu;
    std::vector<Point> verts = mesh.vertices();
    if (expo != 0.0) {
        for (auto& q : verts) {
            const Point d = q - center;
            const double r = norm(d);
            if (r > 0.0) q = center + d * std::pow(r, expo);
        }
    }
    Mesh out(mesh.dim(), std::move(verts), mesh.elements(), mesh.boundary());
    for (std::size_t e = 0; e < out.num_elements(); ++e)
        if (!(signed_volume(out.simplex(e)) > 0.0))
            throw GradingError("rescaled element " + std::to_string(e) + " is inverted",
                               static_cast<long>(e));
    return out;
}

Mesh graded_disk_by_construction(double h, double mu)
{
    check_step(h, mu);
    const double c = g_constants.disk;
    detail::check_budget(std::numbers::pi / (mu * c * c * h * h) * 1.5, "constructed disk");
    const auto radii = detail::graded_radii(h, mu, c);
    std::vector<int> counts;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double spacing = c * h * std::pow(radii[i], 1.0 - mu);
        counts.push_back(std::max(6, static_cast<int>(std::lround(2.0 * std::numbers::pi * radii[i] / spacing))));
    }
    return ring_disk(radii, counts);
}

Mesh graded_ball_by_construction(double h, double mu)
{
    check_step(h, mu);
    const double c = g_constants.ball;
    detail::check_budget(2.0 * 4.0 * std::numbers::pi / (3.0 * mu * c * c * c * h * h * h),
                         "constructed ball");
    return shell_ball(detail::graded_radii(h, mu, c),
                      [=](double r) { return c * h * std::pow(r, 1.0 - mu); });
}

Mesh rescaled_ball(double h, double mu)
{
    check_step(h, mu);
    return grade_by_rescaling(uniform_mesh(UnitBall{}, h), mu, Point(0.0, 0.0, 0.0));
}

}  // namespace gradfem
