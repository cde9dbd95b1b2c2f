#pragma once

#include "gradfem/mesh.hpp"

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

namespace gradfem::testing {

/// Pairs of elements sharing a facet.
inline std::vector<std::pair<std::size_t, std::size_t>> facet_neighbors(const Mesh& mesh)
{
    std::map<std::vector<Index>, std::size_t> first;
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const int nv = mesh.dim() + 1;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto el = mesh.element_span(e);
        for (int skip = 0; skip < nv; ++skip) {
            std::vector<Index> f;
            for (int i = 0; i < nv; ++i)
                if (i != skip) f.push_back(el[static_cast<std::size_t>(i)]);
            std::sort(f.begin(), f.end());
            auto [it, fresh] = first.emplace(f, e);
            if (!fresh) out.emplace_back(it->second, e);
        }
    }
    return out;
}

/// Two right triangles forming the unit square; all vertices on the boundary.
inline Mesh unit_square()
{
    return Mesh(2, {Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)},
                {Element{0, 1, 2, -1}, Element{0, 2, 3, -1}}, {1, 1, 1, 1});
}

}  // namespace gradfem::testing
