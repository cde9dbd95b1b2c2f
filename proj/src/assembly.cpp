#include "gradfem/assembly.hpp"

#include "gradfem/error.hpp"
#include "gradfem/parallel.hpp"
#include "gradfem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace gradfem {

Vector SparseSystem::expand(const Vector& u) const
{
    Vector full = Vector::Zero(static_cast<Eigen::Index>(system_index.size()));
    for (std::size_t i = 0; i < free_vertices.size(); ++i)
        full[free_vertices[i]] = u[static_cast<Eigen::Index>(i)];
    return full;
}

std::array<std::array<double, 4>, 4> local_stiffness(const Simplex& s)
{
    const double vol = signed_volume(s);
    const double hT = diameter(s);
    GRADFEM_CHECK(std::abs(vol) > 1e-14 * std::pow(hT, s.dim), AssemblyFailure,
                  "degenerate element in stiffness assembly");
    const auto g = barycentric_gradients(s);
    std::array<std::array<double, 4>, 4> k{};
    for (int i = 0; i <= s.dim; ++i)
        for (int j = 0; j <= s.dim; ++j)
            k[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                std::abs(vol) * dot(g[static_cast<std::size_t>(i)], g[static_cast<std::size_t>(j)]);
    return k;
}

SparseMatrix assemble_stiffness(const Mesh& mesh)
{
    const std::size_t ne = mesh.num_elements();
    std::vector<std::array<std::array<double, 4>, 4>> local(ne);
    parallel_for(ne, [&](std::size_t e) { local[e] = local_stiffness(mesh.simplex(e)); });
    const int nloc = mesh.dim() + 1;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(ne * static_cast<std::size_t>(nloc * nloc));
    for (std::size_t e = 0; e < ne; ++e) {
        const auto& el = mesh.element(e);
        for (int i = 0; i < nloc; ++i)
            for (int j = 0; j < nloc; ++j)
                trip.emplace_back(el[static_cast<std::size_t>(i)], el[static_cast<std::size_t>(j)],
                                  local[e][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
    const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
    SparseMatrix a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

namespace {

constexpr double kLocateTol = 1e-12;

double min_barycentric(const Mesh& mesh, std::size_t e, const Point& x, int* arg = nullptr)
{
    const auto lam = barycentric(mesh.simplex(e), x);
    int k = 0;
    for (int i = 1; i <= mesh.dim(); ++i)
        if (lam[static_cast<std::size_t>(i)] < lam[static_cast<std::size_t>(k)]) k = i;
    if (arg) *arg = k;
    return lam[static_cast<std::size_t>(k)];
}

struct VertexStar {
    std::vector<std::size_t> offset;
    std::vector<std::size_t> elems;

    explicit VertexStar(const Mesh& mesh) : offset(mesh.num_vertices() + 1, 0)
    {
        for (std::size_t e = 0; e < mesh.num_elements(); ++e)
            for (Index v : mesh.element_span(e)) ++offset[static_cast<std::size_t>(v) + 1];
        for (std::size_t i = 1; i < offset.size(); ++i) offset[i] += offset[i - 1];
        elems.resize(offset.back());
        std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
        for (std::size_t e = 0; e < mesh.num_elements(); ++e)
            for (Index v : mesh.element_span(e)) elems[fill[static_cast<std::size_t>(v)]++] = e;
    }

    [[nodiscard]] std::span<const std::size_t> of(Index v) const
    {
        return {elems.data() + offset[static_cast<std::size_t>(v)],
                offset[static_cast<std::size_t>(v) + 1] - offset[static_cast<std::size_t>(v)]};
    }
};

}  // namespace

std::size_t locate_point(const Mesh& mesh, const Point& x)
{
    GRADFEM_CHECK(x.dim() == mesh.dim(), InvalidArgument, "point and mesh dimensions differ");
    GRADFEM_CHECK(x.finite(), InvalidArgument, "point is not finite");
    GRADFEM_CHECK(mesh.num_elements() > 0, PointLocationFailure, "mesh has no elements");
    Index nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        const double d = distance(mesh.vertex(static_cast<Index>(i)), x);
        if (d < best) {
            best = d;
            nearest = static_cast<Index>(i);
        }
    }
    const VertexStar star(mesh);
    std::size_t found = std::numeric_limits<std::size_t>::max();
    if (!star.of(nearest).empty()) {
        std::size_t cur = star.of(nearest)[0];
        std::vector<std::uint8_t> seen(mesh.num_elements(), 0);
        while (!seen[cur]) {
            seen[cur] = 1;
            int k = 0;
            if (min_barycentric(mesh, cur, x, &k) >= -kLocateTol) {
                found = cur;
                break;
            }
            // Step across the facet opposite vertex k.
            const auto& el = mesh.element(cur);
            const Index pivot = el[static_cast<std::size_t>((k + 1) % (mesh.dim() + 1))];
            std::size_t next = cur;
            for (std::size_t cand : star.of(pivot)) {
                if (cand == cur) continue;
                int shared = 0;
                for (int i = 0; i <= mesh.dim(); ++i) {
                    if (i == k) continue;
                    const auto span = mesh.element_span(cand);
                    if (std::find(span.begin(), span.end(), el[static_cast<std::size_t>(i)]) != span.end()) ++shared;
                }
                if (shared == mesh.dim()) {
                    next = cand;
                    break;
                }
            }
            if (next == cur) break;
            cur = next;
        }
    }
    if (found == std::numeric_limits<std::size_t>::max()) {
        for (std::size_t e = 0; e < mesh.num_elements(); ++e)
            if (min_barycentric(mesh, e, x) >= -kLocateTol) {
                found = e;
                break;
            }
    }
    if (found == std::numeric_limits<std::size_t>::max())
        fail(ErrorKind::PointLocationFailure, "point lies outside the mesh");
    // Facet or vertex ties: every containing element shares a vertex with `found`.
    std::size_t lowest = found;
    for (Index v : mesh.element_span(found))
        for (std::size_t cand : star.of(v))
            if (cand < lowest && min_barycentric(mesh, cand, x) >= -kLocateTol) lowest = cand;
    return lowest;
}

Vector assemble_rhs_point(const Mesh& mesh, const Point& x0)
{
    const std::size_t e = locate_point(mesh, x0);
    auto lam = barycentric(mesh.simplex(e), x0);
    // Clamp roundoff outside [0,1] and renormalize so the entries sum to one.
    double sum = 0.0;
    for (int i = 0; i <= mesh.dim(); ++i) {
        auto& l = lam[static_cast<std::size_t>(i)];
        l = std::clamp(l, 0.0, 1.0);
        sum += l;
    }
    Vector b = Vector::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    const auto& el = mesh.element(e);
    for (int i = 0; i <= mesh.dim(); ++i)
        b[el[static_cast<std::size_t>(i)]] += lam[static_cast<std::size_t>(i)] / sum;
    return b;
}

Vector assemble_rhs_segment(const Mesh& mesh, const SegmentMeasure& src, int quad_order)
{
    GRADFEM_CHECK(src.a.dim() == mesh.dim(), InvalidArgument, "segment and mesh dimensions differ");
    GRADFEM_CHECK(quad_order >= 0, InvalidArgument, "quadrature order must be nonnegative");
    const double len = src.length();
    Point lo = src.a;
    Point hi = src.a;
    for (int d = 0; d < mesh.dim(); ++d) {
        lo[d] = std::min(src.a[d], src.b[d]);
        hi[d] = std::max(src.a[d], src.b[d]);
    }
    struct Piece {
        double t0;
        double t1;
        std::size_t elem;
    };
    std::vector<std::vector<Piece>> per(mesh.num_elements());
    parallel_for(mesh.num_elements(), [&](std::size_t e) {
        const Simplex s = mesh.simplex(e);
        const double hT = diameter(s);
        for (int d = 0; d < mesh.dim(); ++d) {
            double smin = s.v[0][d];
            double smax = s.v[0][d];
            for (int i = 1; i <= mesh.dim(); ++i) {
                smin = std::min(smin, s.v[static_cast<std::size_t>(i)][d]);
                smax = std::max(smax, s.v[static_cast<std::size_t>(i)][d]);
            }
            if (smax < lo[d] - 1e-12 * hT || smin > hi[d] + 1e-12 * hT) return;
        }
        if (auto c = clip_segment(s, src.a, src.b, 1e-12))
            if (c->second - c->first > 1e-14) per[e].push_back({c->first, c->second, e});
    });
    std::vector<Piece> pieces;
    for (auto& p : per) pieces.insert(pieces.end(), p.begin(), p.end());

    // Elementary intervals between merged breakpoints.
    std::vector<double> cuts{0.0, 1.0};
    for (const auto& p : pieces) {
        cuts.push_back(std::clamp(p.t0, 0.0, 1.0));
        cuts.push_back(std::clamp(p.t1, 0.0, 1.0));
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> merged;
    for (double c : cuts)
        if (merged.empty() || c - merged.back() > 1e-12) merged.push_back(c);
    merged.back() = 1.0;

    const LineRule rule = gauss_legendre(quad_order);
    Vector b = Vector::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
        const double t0 = merged[k];
        const double t1 = merged[k + 1];
        const double tm = 0.5 * (t0 + t1);
        std::size_t owner = std::numeric_limits<std::size_t>::max();
        for (const auto& p : pieces)
            if (p.t0 <= tm && tm <= p.t1 && p.elem < owner) owner = p.elem;
        if (owner == std::numeric_limits<std::size_t>::max()) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "segment leaves the mesh on parameter interval [%.6g, %.6g]", t0, t1);
            fail(ErrorKind::ClippingFailure, buf);
        }
        const Simplex s = mesh.simplex(owner);
        const auto& el = mesh.element(owner);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double t = t0 + (t1 - t0) * rule.nodes[q];
            const Point x = src.a + (src.b - src.a) * t;
            const double w = rule.weights[q] * (t1 - t0) * len * src.density_at(t * len);
            if (w == 0.0) continue;
            const auto lam = barycentric(s, x);
            for (int i = 0; i <= mesh.dim(); ++i)
                b[el[static_cast<std::size_t>(i)]] += w * lam[static_cast<std::size_t>(i)];
        }
    }
    return b;
}

Vector assemble_rhs(const Mesh& mesh, const SingularSource& src, int quad_order)
{
    if (const auto* p = std::get_if<PointDelta>(&src)) return assemble_rhs_point(mesh, p->location);
    return assemble_rhs_segment(mesh, std::get<SegmentMeasure>(src), quad_order);
}

SparseSystem apply_dirichlet(const SparseMatrix& a, const Vector& b, const Mesh& mesh)
{
    const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
    GRADFEM_CHECK(a.rows() == n && a.cols() == n && b.size() == n, InvalidArgument,
                  "system size differs from the mesh vertex count");
    SparseSystem sys;
    sys.system_index.assign(mesh.num_vertices(), -1);
    for (Index v = 0; v < static_cast<Index>(n); ++v)
        if (!mesh.is_boundary(v)) {
            sys.system_index[static_cast<std::size_t>(v)] = static_cast<Index>(sys.free_vertices.size());
            sys.free_vertices.push_back(v);
        }
    GRADFEM_CHECK(!sys.free_vertices.empty(), EmptySystem, "every vertex lies on the boundary");
    const auto m = static_cast<Eigen::Index>(sys.free_vertices.size());
    std::vector<Eigen::Triplet<double>> trip;
    sys.rhs.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Index v = sys.free_vertices[static_cast<std::size_t>(i)];
        sys.rhs[i] = b[v];
        for (SparseMatrix::InnerIterator it(a, v); it; ++it) {
            const Index j = sys.system_index[static_cast<std::size_t>(it.col())];
            if (j >= 0) trip.emplace_back(i, j, it.value());
        }
    }
    sys.matrix.resize(m, m);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    return sys;
}

void write_matrix_market(const std::string& path, const SparseSystem& sys)
{
    std::ofstream out(path);
    GRADFEM_CHECK(out.good(), Io, "cannot open '" + path + "' for writing");
    char buf[64];
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << sys.matrix.rows() << ' ' << sys.matrix.cols() << ' ' << sys.matrix.nonZeros() << '\n';
    for (Eigen::Index i = 0; i < sys.matrix.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(sys.matrix, i); it; ++it) {
            std::snprintf(buf, sizeof buf, "%.17g", it.value());
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
        }
    std::ofstream rhs(path + ".rhs");
    GRADFEM_CHECK(rhs.good(), Io, "cannot open '" + path + ".rhs' for writing");
    rhs << "%%MatrixMarket matrix array real general\n" << sys.rhs.size() << " 1\n";
    for (Eigen::Index i = 0; i < sys.rhs.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", sys.rhs[i]);
        rhs << buf << '\n';
    }
}

}  // namespace gradfem
