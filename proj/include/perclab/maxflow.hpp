#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "perclab/lattice.hpp"

namespace perclab {

// Restricts the flow network to vertices for which the predicate holds.
using VertexFilter = std::function<bool(VertexId)>;

struct FlowResult {
    std::int64_t value = 0;
    std::vector<VertexId> source_side;  // residual-reachable from the sources, ascending
    std::vector<Edge> cut;              // open edges leaving source_side
    bool certified = false;             // |cut| == value and no sink is reachable
};

// Maximum flow between two disjoint vertex sets when every open edge carries
// one unit in either direction and closed edges carry nothing.
FlowResult max_flow(const BondConfig& config, std::span<const VertexId> source,
                    std::span<const VertexId> sink, const VertexFilter& region = {});

// Cylinder used for flow-constant estimation: `length` + 1 layers along
// `axis`, `side` vertices per transverse axis, anchored at the box corner.
struct FlowCylinder {
    int dimension = 2;
    int axis = 0;
    int side = 2;    // K
    int length = 2;  // L

    int box_radius() const;
    bool contains(const BoxLattice& box, VertexId v) const;
    std::vector<VertexId> face(const BoxLattice& box, bool far) const;
};

struct FlowEstimate {
    double p = 0.0;
    int dimension = 2;
    int axis = 0;
    int side = 0;
    int length = 0;
    int trials = 0;
    double mean_flow_per_area = 0.0;
    double standard_error = 0.0;
    bool all_certified = true;
    std::vector<std::int64_t> flows;  // per trial, trial order
};

// Mean over trials of maxflow(near face, far face) / K^{d-1}. Trial t samples
// with derive_seed(seed, t), so estimates at different p share uniforms.
FlowEstimate estimate_flow_constant(double p, const FlowCylinder& cylinder, int trials, std::uint64_t seed);

}  // namespace perclab
