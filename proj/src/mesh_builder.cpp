#include "mesh_builder.hpp"

#include "gradfem/error.hpp"
#include "gradfem/generators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>

namespace gradfem::detail {

Index MeshBuilder::add_vertex(const Point& p, bool boundary)
{
    verts_.push_back(p);
    boundary_.push_back(boundary ? 1 : 0);
    return static_cast<Index>(verts_.size() - 1);
}

void MeshBuilder::push(Element el)
{
    Simplex s;
    s.dim = dim_;
    for (int i = 0; i <= dim_; ++i) s.v[static_cast<std::size_t>(i)] = vertex(el[static_cast<std::size_t>(i)]);
    const double vol = signed_volume(s);
    const double d = diameter(s);
    if (!(std::abs(vol) > 1e-14 * std::pow(d, dim_)))
        fail(ErrorKind::ConstructionFailure,
             "degenerate element generated (volume " + std::to_string(vol) + ")");
    if (vol < 0.0) std::swap(el[1], el[2]);
    elems_.push_back(el);
}

void MeshBuilder::add_triangle(Index a, Index b, Index c)
{
    push({a, b, c, -1});
}

void MeshBuilder::add_tet(Index a, Index b, Index c, Index d)
{
    push({a, b, c, d});
}

void MeshBuilder::add_quad(Index a, Index b, Index c, Index d)
{
    const Index m = std::min({a, b, c, d});
    if (m == a || m == c) {
        add_triangle(a, b, c);
        add_triangle(a, c, d);
    } else {
        add_triangle(b, c, d);
        add_triangle(b, d, a);
    }
}

void MeshBuilder::add_prism(const std::array<Index, 6>& v)
{
    // Relabelings of the prism that bring each vertex to position 0.
    static constexpr int perm[6][6] = {{0, 1, 2, 3, 4, 5}, {1, 2, 0, 4, 5, 3}, {2, 0, 1, 5, 3, 4},
                                       {3, 5, 4, 0, 2, 1}, {4, 3, 5, 1, 0, 2}, {5, 4, 3, 2, 1, 0}};
    const auto low = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
    std::array<Index, 6> w{};
    for (std::size_t i = 0; i < 6; ++i) w[i] = v[static_cast<std::size_t>(perm[low][i])];
    add_tet(w[0], w[4], w[5], w[3]);
    if (std::min(w[1], w[5]) < std::min(w[2], w[4])) {
        add_tet(w[0], w[1], w[2], w[5]);
        add_tet(w[0], w[1], w[5], w[4]);
    } else {
        add_tet(w[0], w[1], w[2], w[4]);
        add_tet(w[0], w[4], w[2], w[5]);
    }
}

std::vector<std::array<Index, 3>> MeshBuilder::boundary_facets() const
{
    std::map<std::array<Index, 3>, std::pair<int, std::array<Index, 3>>> count;
    for (const auto& el : elems_)
        for (int skip = 0; skip <= dim_; ++skip) {
            std::array<Index, 3> f{-1, -1, -1};
            int n = 0;
            for (int i = 0; i <= dim_; ++i)
                if (i != skip) f[static_cast<std::size_t>(n++)] = el[static_cast<std::size_t>(i)];
            auto key = f;
            std::sort(key.begin(), key.begin() + n);
            auto& slot = count[key];
            ++slot.first;
            slot.second = f;
        }
    std::vector<std::array<Index, 3>> out;
    for (const auto& [key, val] : count)
        if (val.first == 1) out.push_back(val.second);
    return out;
}

Mesh MeshBuilder::finish() &&
{
    return Mesh(dim_, std::move(verts_), std::move(elems_), std::move(boundary_));
}

// ---------------------------------------------------------------------------

std::vector<std::array<Lattice, 3>> shell_facets(int ldim, int k, bool half)
{
    std::vector<std::array<Lattice, 3>> out;
    if (ldim == 2) {
        for (int sy : {1, -1}) {
            if (half && sy < 0) continue;
            for (int sx : {1, -1})
                for (int j = 0; j < k; ++j)
                    out.push_back({Lattice{sx * (k - j), sy * j, 0},
                                   Lattice{sx * (k - j - 1), sy * (j + 1), 0}, Lattice{}});
        }
        return out;
    }
    for (int sz : {1, -1}) {
        if (half && sz < 0) continue;
        for (int sy : {1, -1})
            for (int sx : {1, -1}) {
                auto at = [&](int i, int j) { return Lattice{sx * i, sy * j, sz * (k - i - j)}; };
                for (int i = 0; i < k; ++i)
                    for (int j = 0; i + j < k; ++j) {
                        out.push_back({at(i, j), at(i + 1, j), at(i, j + 1)});
                        if (i + j <= k - 2) out.push_back({at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
                    }
            }
    }
    return out;
}

Point lattice_direction(int ldim, const Lattice& p, int k)
{
    const double q = std::numbers::pi / (2.0 * k);
    auto comp = [&](int a) { return std::copysign(std::sin(q * std::abs(a)), a); };
    if (ldim == 2) return {comp(p[0]), comp(p[1])};
    Point d(comp(p[0]), comp(p[1]), comp(p[2]));
    return d * (1.0 / norm(d));
}

namespace {

Lattice add(const Lattice& a, const Lattice& b)
{
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

Lattice twice(const Lattice& a)
{
    return {2 * a[0], 2 * a[1], 2 * a[2]};
}

}  // namespace

void build_shell_layers(MeshBuilder& mb, int ldim, bool half, const std::vector<int>& ks,
                        Index center, const LatticeResolver& resolve)
{
    GRADFEM_CHECK(!ks.empty(), ConstructionFailure, "no shells to build");
    for (const auto& f : shell_facets(ldim, ks[0], half)) {
        if (ldim == 2)
            mb.add_triangle(center, resolve(0, f[0]), resolve(0, f[1]));
        else
            mb.add_tet(center, resolve(0, f[0]), resolve(0, f[1]), resolve(0, f[2]));
    }
    for (std::size_t s = 0; s + 1 < ks.size(); ++s) {
        const int in = static_cast<int>(s);
        const int out = in + 1;
        const int k = ks[s];
        GRADFEM_CHECK(ks[s + 1] == k || ks[s + 1] == 2 * k, ConstructionFailure,
                      "shell lattice radius must stay or double");
        const bool dbl = ks[s + 1] == 2 * k;
        for (const auto& f : shell_facets(ldim, k, half)) {
            if (ldim == 2) {
                const Index p = resolve(in, f[0]);
                const Index q = resolve(in, f[1]);
                if (!dbl) {
                    mb.add_quad(p, q, resolve(out, f[1]), resolve(out, f[0]));
                } else {
                    const Index pp = resolve(out, twice(f[0]));
                    const Index qq = resolve(out, twice(f[1]));
                    const Index m = resolve(out, add(f[0], f[1]));
                    mb.add_triangle(p, pp, m);
                    mb.add_triangle(p, m, q);
                    mb.add_triangle(q, m, qq);
                }
                continue;
            }
            const Index a = resolve(in, f[0]);
            const Index b = resolve(in, f[1]);
            const Index c = resolve(in, f[2]);
            if (!dbl) {
                mb.add_prism({a, b, c, resolve(out, f[0]), resolve(out, f[1]), resolve(out, f[2])});
                continue;
            }
            const Index A = resolve(out, twice(f[0]));
            const Index B = resolve(out, twice(f[1]));
            const Index C = resolve(out, twice(f[2]));
            const Index mab = resolve(out, add(f[0], f[1]));
            const Index mbc = resolve(out, add(f[1], f[2]));
            const Index mca = resolve(out, add(f[2], f[0]));
            mb.add_tet(a, A, mab, mca);
            mb.add_tet(b, B, mbc, mab);
            mb.add_tet(c, C, mca, mbc);
            // Inner octahedron, split along its shortest diagonal.
            const std::array<std::array<Index, 6>, 3> axes{{{a, mbc, b, c, mca, mab},
                                                            {b, mca, c, a, mab, mbc},
                                                            {c, mab, a, b, mbc, mca}}};
            std::size_t best = 0;
            double best_len = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                const double len = distance(mb.vertex(axes[i][0]), mb.vertex(axes[i][1]));
                if (i == 0 || len < best_len) {
                    best = i;
                    best_len = len;
                }
            }
            const auto& o = axes[best];
            for (std::size_t i = 0; i < 4; ++i) mb.add_tet(o[0], o[1], o[2 + i], o[2 + (i + 1) % 4]);
        }
    }
}

std::vector<int> shell_schedule(const std::vector<double>& radii, int base)
{
    std::vector<int> ks(radii.size(), base);
    for (std::size_t s = 1; s < radii.size(); ++s) {
        const int k = ks[s - 1];
        const double gap = radii[s] - radii[s - 1];
        ks[s] = (std::numbers::pi / 2.0) * radii[s] / k > std::sqrt(2.0) * gap ? 2 * k : k;
    }
    return ks;
}

std::vector<int> smooth_shell_schedule(const std::vector<double>& need)
{
    // Each shell takes base 2^j nearest (in log) to its target, kept monotone with
    // at most one doubling per layer. The base whose outermost k lands nearest its
    // target wins, so the count tracks h without power-of-two jumps.
    std::vector<int> best;
    double best_miss = 0.0;
    for (int base = 1; base <= 7; base += 2) {
        std::vector<int> ks(need.size(), base);
        for (std::size_t s = 0; s < need.size(); ++s) {
            int k = base;
            while (k * std::sqrt(2.0) < need[s]) k *= 2;
            ks[s] = s == 0 ? k : std::clamp(k, ks[s - 1], 2 * ks[s - 1]);
        }
        const double miss = std::abs(std::log(ks.back() / need.back()));
        if (best.empty() || miss < best_miss - 1e-12) {
            best = std::move(ks);
            best_miss = miss;
        }
    }
    return best;
}

std::vector<double> graded_radii(double h, double mu, double c, double outer)
{
    GRADFEM_CHECK(h > 0.0 && mu > 0.0 && mu <= 1.0 && c > 0.0, InvalidArgument,
                  "graded radii need h > 0 and mu in (0,1]");
    double r = c * std::pow(h, 1.0 / mu);
    GRADFEM_CHECK(r < outer, InvalidArgument, "h too large: first graded radius reaches the outer radius");
    std::vector<double> radii;
    constexpr std::size_t cap = 10'000'000;
    while (true) {
        radii.push_back(r);
        const double step = c * h * std::pow(r, 1.0 - mu);
        const double next = r + step;
        if (next >= outer - 0.5 * step) {
            radii.push_back(outer);
            break;
        }
        r = next;
        GRADFEM_CHECK(radii.size() < cap, InvalidArgument, "radius recurrence did not reach the outer radius");
    }
    return radii;
}

void check_budget(double estimate, const char* what)
{
    if (estimate > static_cast<double>(vertex_budget()))
        fail(ErrorKind::ResourceLimit, std::string(what) + ": estimated " +
                                           std::to_string(static_cast<long long>(estimate)) +
                                           " vertices exceeds the budget of " +
                                           std::to_string(vertex_budget()));
}

}  // namespace gradfem::detail
