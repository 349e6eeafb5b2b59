#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "perclab/cluster.hpp"
#include "perclab/lattice.hpp"

namespace perclab::detail {

// Open graph of a cluster with vertices renumbered 0..m-1 in rank order, so
// comparing local index vectors compares vertex sets lexicographically.
// Every open neighbour of a cluster vertex is itself in the cluster, hence a
// vertex's open degree equals its degree here.
struct LocalGraph {
    std::vector<VertexId> global;
    std::vector<std::int32_t> offsets;
    std::vector<std::int32_t> adjacency;
    std::int32_t root = 0;

    std::int32_t size() const { return static_cast<std::int32_t>(global.size()); }
    int degree(std::int32_t u) const { return offsets[u + 1] - offsets[u]; }
    std::span<const std::int32_t> neighbors(std::int32_t u) const {
        return {adjacency.data() + offsets[u], adjacency.data() + offsets[u + 1]};
    }

    static LocalGraph build(const BondConfig& config, const Cluster& cluster);
};

// O(1) insert / erase / uniform sampling over 0..capacity-1.
class IndexedSet {
public:
    explicit IndexedSet(std::int32_t capacity) : pos_(static_cast<std::size_t>(capacity), -1) {}

    bool contains(std::int32_t v) const { return pos_[v] >= 0; }
    std::int32_t size() const { return static_cast<std::int32_t>(items_.size()); }
    bool empty() const { return items_.empty(); }
    std::int32_t at(std::int32_t i) const { return items_[i]; }
    const std::vector<std::int32_t>& items() const { return items_; }

    void insert(std::int32_t v) {
        if (pos_[v] >= 0) return;
        pos_[v] = static_cast<std::int32_t>(items_.size());
        items_.push_back(v);
    }
    void erase(std::int32_t v) {
        const std::int32_t p = pos_[v];
        if (p < 0) return;
        const std::int32_t last = items_.back();
        items_[p] = last;
        pos_[last] = p;
        items_.pop_back();
        pos_[v] = -1;
    }
    void clear() {
        for (std::int32_t v : items_) pos_[v] = -1;
        items_.clear();
    }

private:
    std::vector<std::int32_t> items_;
    std::vector<std::int32_t> pos_;
};

}  // namespace perclab::detail
