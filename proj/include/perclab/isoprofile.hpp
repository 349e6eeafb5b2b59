#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "perclab/cluster.hpp"
#include "perclab/lattice.hpp"
#include "perclab/ratio.hpp"

namespace perclab {

enum class SolverMode { exact, upper_bound };
enum class ZeroReason { cluster_fits_cap };
enum class ConditioningProxy { touches_boundary, largest_cluster };

std::string to_string(SolverMode m);
std::string to_string(ConditioningProxy p);
ConditioningProxy parse_proxy(const std::string& text);

// Minimal |∂^o H| / |H| over connected H with origin ∈ H ⊆ C(origin), |H| <= cap.
struct ProfileResult {
    Ratio value;
    std::vector<VertexId> witness;  // ascending
    std::int64_t cap = 0;
    int n = 0;
    SolverMode mode = SolverMode::exact;
    std::optional<ZeroReason> zero_reason;
    std::int64_t cluster_size = 0;
    bool truncated = false;  // C(origin) reaches the simulation box boundary
    bool discarded = false;  // rejected by the conditioning proxy
    std::optional<ConditioningProxy> proxy;

    // n * value, the normalisation under which the profile has a limit.
    Ratio scaled() const { return value.times(n); }
};

// Exact enumeration is attempted only when |C(0)| <= max_cluster or cap <= max_cap.
struct EnumerationBudget {
    std::int64_t max_cluster = 24;
    std::int64_t max_cap = 12;

    bool admits(std::int64_t cluster_size, std::int64_t cap) const {
        return cluster_size <= max_cluster || cap <= max_cap;
    }
};

// Geometric cooling from t_start to t_end (in units of boundary edges) over
// max(min_moves, sweeps * cap) proposals per restart.
struct AnnealSchedule {
    double t_start = 1.5;
    double t_end = 0.05;
    std::int64_t sweeps = 150;
    std::int64_t min_moves = 4000;
};

struct ProfileOptions {
    EnumerationBudget budget;
    AnnealSchedule schedule;
    int restarts = 16;
    std::optional<std::uint64_t> seed;  // default: derived from the config seed and n
};

ProfileResult profile_bruteforce(const BondConfig& config, VertexId origin, std::int64_t cap,
                                 const EnumerationBudget& budget = {});

ProfileResult profile_anneal(const BondConfig& config, VertexId origin, std::int64_t cap,
                             const AnnealSchedule& schedule, int restarts, std::uint64_t seed);

// cap = n^d; zero when the cluster fits, exact within budget, annealing otherwise.
ProfileResult profile(const BondConfig& config, VertexId origin, int n, const ProfileOptions& options = {});

// profile() at the box origin, kept only if the origin's cluster passes the proxy
// for {0 ∈ C_∞}.
ProfileResult supercritical_profile(const BondConfig& config, int n, ConditioningProxy proxy,
                                    const ProfileOptions& options = {});

bool satisfies_proxy(const BondConfig& config, const Cluster& origin_cluster, ConditioningProxy proxy);

// Box face {x_axis = sign * n}.
struct Face {
    int axis = 0;
    int sign = -1;

    friend bool operator==(const Face&, const Face&) = default;
};
std::vector<Face> all_faces(int dimension);

struct FaceCount {
    int n = 0;
    Face face;
    std::int64_t count = 0;
};

// Vertices of the face joined to the origin by an open path inside [-n, n]^d.
FaceCount face_connection_count(const BondConfig& config, int n, Face face);
// All 2d faces from a single constrained exploration.
std::vector<FaceCount> face_connection_counts(const BondConfig& config, int n);

std::int64_t checked_power(std::int64_t base, int exponent);

nlohmann::json to_json(const ProfileResult& r);

}  // namespace perclab
