#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "perclab/lattice.hpp"

namespace perclab {

// The open cluster of `origin`, truncated at the simulation box (or at a
// sub-box when one was requested).
struct Cluster {
    std::uint64_t config_seed = 0;
    VertexId origin = kNoVertex;
    std::vector<VertexId> vertices;  // ascending rank
    bool touches_box_boundary = false;
    std::int64_t open_edge_count = 0;  // open edges with both ends in the cluster

    std::size_t size() const { return vertices.size(); }
    bool contains(VertexId v) const;
};

// Breadth-first closure of `origin` under open edges. With `box_radius`, the
// search never leaves [-r, r]^d and touches_box_boundary refers to that box.
Cluster open_cluster(const BondConfig& config, VertexId origin,
                     std::optional<int> box_radius = std::nullopt);

// Same closure seeded from a vertex set (all seeds are members).
Cluster open_cluster_of_set(const BondConfig& config, std::span<const VertexId> seeds,
                            std::optional<int> box_radius = std::nullopt);

// Independent route via a disjoint-set forest over all open edges.
Cluster open_cluster_union_find(const BondConfig& config, VertexId origin);

// Largest cluster; ties go to the cluster with the smallest minimal rank.
Cluster largest_cluster(const BondConfig& config);

// Explicit finite graph, used for the generic edge boundary.
struct GraphEdge {
    VertexId x = kNoVertex;
    VertexId y = kNoVertex;

    friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
    friend auto operator<=>(const GraphEdge&, const GraphEdge&) = default;
};

struct Graph {
    std::vector<VertexId> vertices;  // ascending
    std::vector<GraphEdge> edges;    // x < y
};

// Graph whose vertices are the cluster and whose edges are its open edges.
Graph open_subgraph(const BondConfig& config, const Cluster& cluster);
// Whole box with every edge (the p = 1 graph).
Graph full_graph(const BoxLattice& lattice);

// Edges <x, y> of g with x in a and y not in a (oriented that way).
std::vector<GraphEdge> edge_boundary(const Graph& g, std::span<const VertexId> a);

// Open edges of the box with exactly one endpoint in h.
std::vector<Edge> open_edge_boundary(const BondConfig& config, std::span<const VertexId> h);
std::int64_t open_edge_boundary_size(const BondConfig& config, std::span<const VertexId> h);

nlohmann::json to_json(const Cluster& cluster, const BoxLattice& lattice);

}  // namespace perclab
