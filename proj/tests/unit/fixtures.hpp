#pragma once

#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

#include "perclab/lattice.hpp"

namespace fixtures {

using perclab::BondConfig;
using perclab::BoxLattice;
using perclab::Point;
using perclab::VertexId;

inline VertexId at(const BoxLattice& box, std::initializer_list<int> xs) {
    Point p{};
    int i = 0;
    for (int x : xs) p[i++] = x;
    return box.rank(p);
}

// Configuration on box (d, R) whose open edges are exactly the listed pairs.
inline BondConfig with_open_edges(int d, int R,
                                  std::initializer_list<std::pair<std::initializer_list<int>, std::initializer_list<int>>> edges) {
    auto box = perclab::build_box(d, R);
    std::vector<std::uint64_t> words(static_cast<std::size_t>((box->edge_count() + 63) / 64), 0);
    for (const auto& [a, b] : edges) {
        const VertexId u = at(*box, a), v = at(*box, b);
        bool found = false;
        for (int axis = 0; axis < d && !found; ++axis) {
            for (int dir : {-1, 1}) {
                if (box->neighbor(u, axis, dir) == v) {
                    const auto e = box->incident_edge(u, axis, dir);
                    words[static_cast<std::size_t>(e >> 6)] |= std::uint64_t{1} << (e & 63);
                    found = true;
                    break;
                }
            }
        }
        if (!found) throw std::invalid_argument("not a lattice edge");
    }
    return BondConfig(box, 0.5, 0, std::move(words));
}

// The R = 1 configuration with open edges (0,0)-(1,0), (0,0)-(0,1), (1,0)-(1,1).
inline BondConfig small_example() {
    return with_open_edges(2, 1, {{{0, 0}, {1, 0}}, {{0, 0}, {0, 1}}, {{1, 0}, {1, 1}}});
}

}  // namespace fixtures
