#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "perclab/lattice.hpp"

namespace perclab {

// Sizes recorded at step l of the exploration C_0 ⊂ C_1 ⊂ ...
struct ExplorationStep {
    std::int64_t cluster_size = 0;   // |C_l|
    std::int64_t shell_size = 0;     // |A_l| (0 at l = 0)
    std::int64_t open_boundary = 0;  // |∂^o C_l|, every open edge leaving C_l
    // Open edges leaving C_l whose outer endpoint may still be explored
    // (equal to open_boundary without a constraint box).
    std::int64_t allowed_boundary = 0;
};

struct ExplorationHistory {
    int dimension = 0;
    std::vector<VertexId> seeds;             // C_0, ascending
    std::vector<ExplorationStep> steps;      // index l = 0 .. L
    std::optional<int> constrained_box_radius;
    bool halted = false;                     // A_{L+1} was found empty
    bool max_steps_exhausted = false;
    bool touches_box_boundary = false;       // terminal set meets the simulation box boundary
    bool touches_constraint_boundary = false;
    std::vector<VertexId> terminal;          // C_L, ascending
    // Shells A_1..A_L, kept only on request.
    std::optional<std::vector<std::vector<VertexId>>> shells;

    std::int64_t last_step() const { return static_cast<std::int64_t>(steps.size()) - 1; }
    // |C_l| for any l >= 0; after a halt the process is stationary.
    std::optional<std::int64_t> cluster_size_at(std::int64_t l) const;
    // C_l rebuilt from retained shells.
    std::vector<VertexId> cluster_at(std::int64_t l) const;
};

struct ExploreStepResult {
    std::vector<VertexId> shell;  // A_next, ascending
    std::vector<VertexId> next;   // C ∪ A_next, ascending
};

// One step: A_next = { x ∉ C (inside the constraint box if given) joined to C by an open edge }.
ExploreStepResult explore_step(const BondConfig& config, std::span<const VertexId> c,
                               std::optional<int> box_radius = std::nullopt);

// Iterate explore_step from {origin} until the shell is empty or max_steps
// steps were taken (default: vertex count of the box).
ExplorationHistory explore_until_halt(const BondConfig& config, VertexId origin,
                                      std::optional<int> box_radius = std::nullopt,
                                      std::optional<std::int64_t> max_steps = std::nullopt,
                                      bool retain_shells = false);

ExplorationHistory explore_from(const BondConfig& config, std::span<const VertexId> seeds,
                                std::optional<int> box_radius = std::nullopt,
                                std::optional<std::int64_t> max_steps = std::nullopt,
                                bool retain_shells = false);

// CSV with columns l, |C_l|, |A_l|, |∂^o C_l|.
void write_history_csv(std::ostream& out, const ExplorationHistory& history);

struct GrowthCheck {
    int n = 0;
    std::int64_t step = 0;           // (n - n0) k
    std::int64_t cluster_size = 0;   // |C_step|
    double required = 0.0;           // alpha n^d
    bool holds = false;
    // Hypotheses of the induction from n - 1: growth held at n - 1 and every
    // step of block n - 1 met the open-boundary bound.
    bool hypotheses_held = false;
    bool beyond_halt = false;        // read from the stationary terminal set
};

struct StepBoundCheck {
    std::int64_t step = 0;
    int n = 0;                       // block index: step in [(n - n0) k, (n + 1 - n0) k)
    std::int64_t open_boundary = 0;
    double required = 0.0;           // alpha c n^{d-1}
    bool holds = false;
    bool ratio_holds = false;        // |∂^o C_l| / |C_l| >= c / n
};

struct GrowthCertificate {
    double c = 0.0;
    int n0 = 0;
    int dimension = 0;
    double alpha = 0.0;              // 1 / n0^d
    std::int64_t k = 0;              // smallest integer > 2^{d+1} d / c
    std::vector<GrowthCheck> verified_range;
    std::vector<StepBoundCheck> step_bounds;
    bool range_truncated = false;    // history too short for the requested range
    bool cluster_exhausted = false;  // process halted on a cluster not cut by the box
    // Cases where the hypotheses held but the growth bound failed. The
    // induction step makes this impossible; a nonzero count is a bug.
    std::int64_t implication_violations = 0;

    bool all_hold() const;
};

// Replay the induction |C_{(n-n0)k}| >= alpha n^d for n0 < n <= n_max on a
// recorded history. Without n_max the range ends at the last recorded block
// (extended by one block when the cluster is exhausted).
GrowthCertificate growth_certificate(const ExplorationHistory& history, double c, int n0,
                                     std::optional<int> n_max = std::nullopt);

}  // namespace perclab
