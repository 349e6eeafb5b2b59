#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace perclab {

inline constexpr int kMaxDimension = 8;

using VertexId = std::int64_t;
using EdgeIndex = std::int64_t;
using Point = std::array<int, kMaxDimension>;

inline constexpr VertexId kNoVertex = -1;

// Edge stored by its lower endpoint and the (positive) axis it points along.
struct Edge {
    VertexId lower = kNoVertex;
    int axis = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// The box [-R, R]^d of Z^d with its nearest-neighbour edges.
//
// Vertices are ranked lexicographically over coordinates, x_0 most
// significant. Edges are ranked by (rank of lower endpoint, axis), counting
// only edges with both endpoints inside the box, so edge indices form a
// dense range [0, edge_count()).
class BoxLattice {
public:
    BoxLattice(int dimension, int radius);

    int dimension() const { return dim_; }
    int radius() const { return radius_; }
    int side() const { return 2 * radius_ + 1; }
    std::int64_t vertex_count() const { return vertex_count_; }
    std::int64_t edge_count() const { return edge_offset_.back(); }

    VertexId origin() const { return origin_; }
    VertexId stride(int axis) const { return stride_[axis]; }

    bool contains(const Point& x) const;
    VertexId rank(const Point& x) const;
    Point coords(VertexId v) const;
    int coord(VertexId v, int axis) const {
        return static_cast<int>((v / stride_[axis]) % side()) - radius_;
    }

    // Some coordinate has modulus R.
    bool on_boundary(VertexId v) const;
    // Inside the sub-box [-r, r]^d (r <= R).
    bool within(VertexId v, int r) const;
    int sup_norm(VertexId v) const;

    // Neighbour along `axis` in direction dir = +1 / -1, or kNoVertex.
    VertexId neighbor(VertexId v, int axis, int dir) const {
        const unsigned bit = dir > 0 ? axis : dim_ + axis;
        return (mask_[v] >> bit) & 1U ? v + dir * stride_[axis] : kNoVertex;
    }
    // Edge joining v to neighbor(v, axis, dir); the neighbour must exist.
    EdgeIndex incident_edge(VertexId v, int axis, int dir) const {
        return dir > 0 ? edge_index_unchecked(v, axis)
                       : edge_index_unchecked(v - stride_[axis], axis);
    }
    int degree(VertexId v) const;

    EdgeIndex edge_index(const Edge& e) const;
    Edge edge(EdgeIndex i) const;
    std::pair<VertexId, VertexId> endpoints(EdgeIndex i) const;

private:
    EdgeIndex edge_index_unchecked(VertexId lower, int axis) const {
        const unsigned below = mask_[lower] & ((1U << axis) - 1U);
        return edge_offset_[lower] + std::popcount(below);
    }

    int dim_;
    int radius_;
    std::int64_t vertex_count_;
    VertexId origin_;
    std::array<VertexId, kMaxDimension> stride_{};
    // bit a: x_a < R (edge towards +e_a exists); bit d+a: x_a > -R.
    std::vector<std::uint16_t> mask_;
    std::vector<EdgeIndex> edge_offset_;
};

std::shared_ptr<const BoxLattice> build_box(int dimension, int radius);

// A sampled bond configuration on a BoxLattice.
class BondConfig {
public:
    BondConfig(std::shared_ptr<const BoxLattice> lattice, double p, std::uint64_t master_seed,
               std::vector<std::uint64_t> open_words,
               std::optional<std::vector<double>> uniforms = std::nullopt);

    const BoxLattice& lattice() const { return *lattice_; }
    const std::shared_ptr<const BoxLattice>& lattice_ptr() const { return lattice_; }
    double p() const { return p_; }
    std::uint64_t master_seed() const { return seed_; }

    bool is_open(EdgeIndex e) const { return (words_[e >> 6] >> (e & 63)) & 1U; }
    // Edge from v towards neighbor(v, axis, dir) exists and is open.
    bool is_open(VertexId v, int axis, int dir) const {
        return lattice_->neighbor(v, axis, dir) != kNoVertex &&
               is_open(lattice_->incident_edge(v, axis, dir));
    }
    int open_degree(VertexId v) const;
    std::int64_t open_edge_count() const;

    bool has_uniforms() const { return uniforms_.has_value(); }
    std::span<const double> uniforms() const;
    std::span<const std::uint64_t> words() const { return words_; }

private:
    std::shared_ptr<const BoxLattice> lattice_;
    double p_;
    std::uint64_t seed_;
    std::vector<std::uint64_t> words_;
    std::optional<std::vector<double>> uniforms_;
};

// Uniform attached to the edge with lower endpoint x along `axis`. The key is
// the edge's position in Z^d, so boxes of different radii sampled with the
// same seed agree on their common edges.
double edge_uniform(std::uint64_t master_seed, const Point& x, int dimension, int axis);

BondConfig sample_config(std::shared_ptr<const BoxLattice> lattice, double p, std::uint64_t seed,
                         bool retain_uniforms = false);

// Re-threshold retained uniforms at p2. Requires has_uniforms().
BondConfig monotone_couple(const BondConfig& config, double p2);

// Binary dump: "PRCLBOND", u32 version, u32 d, u32 R, f64 p, u64 seed, then
// edge_count bits packed LSB-first in canonical edge order. Little-endian.
void write_config(std::ostream& out, const BondConfig& config);
BondConfig read_config(std::istream& in);
void save_config(const std::filesystem::path& path, const BondConfig& config);
BondConfig load_config(const std::filesystem::path& path);

}  // namespace perclab
