#include "gradfem/error.hpp"
#include "gradfem/generators.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

namespace gradfem {

namespace {

using EdgeKey = std::uint64_t;

EdgeKey edge_key(Index a, Index b)
{
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

Index key_lo(EdgeKey k) { return static_cast<Index>(k >> 32); }
Index key_hi(EdgeKey k) { return static_cast<Index>(k & 0xffffffffULL); }

class Bisector {
public:
    Bisector(const Mesh& mesh, const Domain& dom)
        : dim_(mesh.dim()), dom_(dom), verts_(mesh.vertices()), flags_(mesh.boundary()),
          elems_(mesh.elements())
    {
    }

    // One round: bisect every element failing `ok`, then restore conformity.
    bool round(const std::function<bool(const Simplex&)>& ok, std::size_t max_elements)
    {
        rebuild_boundary();
        std::unordered_set<EdgeKey> marked;
        for (const auto& el : elems_)
            if (!ok(simplex(el))) marked.insert(longest_edge(el));
        if (marked.empty()) return false;
        bool changed = true;
        while (changed) {
            changed = false;
            const std::size_t n = elems_.size();
            for (std::size_t e = 0; e < n; ++e) {
                const Element el = elems_[e];
                bool has_marked = false;
                for (int i = 0; i <= dim_ && !has_marked; ++i)
                    for (int j = i + 1; j <= dim_; ++j)
                        if (marked.count(edge_key(el[static_cast<std::size_t>(i)], el[static_cast<std::size_t>(j)]))) {
                            has_marked = true;
                            break;
                        }
                if (!has_marked) continue;
                const EdgeKey le = longest_edge(el);
                changed = true;
                if (!marked.count(le)) {
                    marked.insert(le);
                    continue;
                }
                const Index a = key_lo(le);
                const Index b = key_hi(le);
                const Index m = midpoint(a, b);
                Element c1 = el;
                Element c2 = el;
                for (int i = 0; i <= dim_; ++i) {
                    if (el[static_cast<std::size_t>(i)] == b) c1[static_cast<std::size_t>(i)] = m;
                    if (el[static_cast<std::size_t>(i)] == a) c2[static_cast<std::size_t>(i)] = m;
                }
                elems_[e] = c1;
                elems_.push_back(c2);
            }
            GRADFEM_CHECK(elems_.size() <= max_elements, ResourceLimit,
                          "bisection refinement exceeded " + std::to_string(max_elements) + " elements");
        }
        return true;
    }

    Mesh finish() &&
    {
        return Mesh(dim_, std::move(verts_), std::move(elems_), std::move(flags_));
    }

private:
    // Boundary edges are recomputed from facet incidence at the start of each round.
    void rebuild_boundary()
    {
        opposite_.clear();
        midpoints_.clear();
        std::unordered_map<std::array<Index, 3>, std::pair<int, Index>, FacetHash> facets;
        for (const auto& el : elems_)
            for (int skip = 0; skip <= dim_; ++skip) {
                std::array<Index, 3> f{-1, -1, -1};
                int n = 0;
                for (int i = 0; i <= dim_; ++i)
                    if (i != skip) f[static_cast<std::size_t>(n++)] = el[static_cast<std::size_t>(i)];
                std::sort(f.begin(), f.begin() + n);
                auto& slot = facets[f];
                ++slot.first;
            }
        for (const auto& [f, val] : facets) {
            if (val.first != 1) continue;
            if (dim_ == 2) {
                opposite_[edge_key(f[0], f[1])];
            } else {
                opposite_[edge_key(f[0], f[1])].push_back(f[2]);
                opposite_[edge_key(f[0], f[2])].push_back(f[1]);
                opposite_[edge_key(f[1], f[2])].push_back(f[0]);
            }
        }
    }

    struct FacetHash {
        std::size_t operator()(const std::array<Index, 3>& k) const noexcept
        {
            std::size_t h = std::hash<Index>{}(k[0]);
            h = h * 1000003u ^ std::hash<Index>{}(k[1]);
            h = h * 1000003u ^ std::hash<Index>{}(k[2]);
            return h;
        }
    };

    Simplex simplex(const Element& el) const
    {
        Simplex s;
        s.dim = dim_;
        for (int i = 0; i <= dim_; ++i)
            s.v[static_cast<std::size_t>(i)] = verts_[static_cast<std::size_t>(el[static_cast<std::size_t>(i)])];
        return s;
    }

    // Longest edge; equal lengths resolve to the smallest key so that every
    // element sharing the edges makes the same choice.
    EdgeKey longest_edge(const Element& el) const
    {
        EdgeKey best = 0;
        double best_len = -1.0;
        for (int i = 0; i <= dim_; ++i)
            for (int j = i + 1; j <= dim_; ++j) {
                const EdgeKey k = edge_key(el[static_cast<std::size_t>(i)], el[static_cast<std::size_t>(j)]);
                const double len = distance(verts_[static_cast<std::size_t>(key_lo(k))],
                                            verts_[static_cast<std::size_t>(key_hi(k))]);
                if (len > best_len || (len == best_len && k < best)) {
                    best = k;
                    best_len = len;
                }
            }
        return best;
    }

    Index midpoint(Index a, Index b)
    {
        const EdgeKey k = edge_key(a, b);
        if (auto it = midpoints_.find(k); it != midpoints_.end()) return it->second;
        Point x = (verts_[static_cast<std::size_t>(a)] + verts_[static_cast<std::size_t>(b)]) * 0.5;
        const auto opp = opposite_.find(k);
        const bool on_boundary = opp != opposite_.end();
        if (on_boundary) x = boundary_project(x, dom_);
        const auto m = static_cast<Index>(verts_.size());
        verts_.push_back(x);
        flags_.push_back(on_boundary ? 1 : 0);
        midpoints_.emplace(k, m);
        if (on_boundary) {
            const std::vector<Index> others = opp->second;
            opposite_.erase(opp);
            opposite_[edge_key(a, m)];
            opposite_[edge_key(m, b)];
            for (Index c : others) {
                opposite_[edge_key(a, m)].push_back(c);
                opposite_[edge_key(m, b)].push_back(c);
                opposite_[edge_key(m, c)] = {a, b};
                std::replace(opposite_[edge_key(a, c)].begin(), opposite_[edge_key(a, c)].end(), b, m);
                std::replace(opposite_[edge_key(b, c)].begin(), opposite_[edge_key(b, c)].end(), a, m);
            }
        }
        return m;
    }

    int dim_;
    const Domain& dom_;
    std::vector<Point> verts_;
    std::vector<std::uint8_t> flags_;
    std::vector<Element> elems_;
    std::unordered_map<EdgeKey, Index> midpoints_;
    // Boundary edges and, in 3D, the opposite vertices of their two boundary faces.
    std::unordered_map<EdgeKey, std::vector<Index>> opposite_;
};

}  // namespace

Mesh refine_until(const Mesh& mesh, const Domain& dom,
                  const std::function<bool(const Simplex&)>& fine_enough, std::size_t max_elements)
{
    GRADFEM_CHECK(domain_dim(dom) == mesh.dim(), InvalidArgument, "domain and mesh dimensions differ");
    Bisector b(mesh, dom);
    for (int iter = 0; iter < 200 && b.round(fine_enough, max_elements); ++iter) {
    }
    return std::move(b).finish();
}

}  // namespace gradfem
