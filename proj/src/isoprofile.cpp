#include "perclab/isoprofile.hpp"

#include <algorithm>
#include <limits>

#include "local_graph.hpp"
#include "perclab/errors.hpp"
#include "perclab/exploration.hpp"
#include "perclab/rng.hpp"

namespace perclab {

namespace detail {

LocalGraph LocalGraph::build(const BondConfig& config, const Cluster& cluster) {
    const BoxLattice& box = config.lattice();
    LocalGraph g;
    g.global = cluster.vertices;
    auto local = [&](VertexId v) {
        return static_cast<std::int32_t>(std::lower_bound(g.global.begin(), g.global.end(), v) -
                                         g.global.begin());
    };
    g.offsets.reserve(g.global.size() + 1);
    g.offsets.push_back(0);
    for (VertexId v : g.global) {
        for (int a = 0; a < box.dimension(); ++a) {
            for (int dir : {+1, -1}) {
                if (config.is_open(v, a, dir)) g.adjacency.push_back(local(box.neighbor(v, a, dir)));
            }
        }
        g.offsets.push_back(static_cast<std::int32_t>(g.adjacency.size()));
    }
    g.root = local(cluster.origin);
    return g;
}

}  // namespace detail

namespace {

using detail::LocalGraph;

// Redelmeier-style enumeration: every connected set containing the root is
// visited exactly once. Vertices stay marked after they leave `untried`, which
// excludes them from the later siblings of the current branch.
class Enumerator {
public:
    Enumerator(const LocalGraph& g, std::int64_t cap)
        : g_(g), cap_(cap), marked_(static_cast<std::size_t>(g.size()), 0),
          in_s_(static_cast<std::size_t>(g.size()), 0) {}

    void run() {
        marked_[g_.root] = 1;
        recurse({g_.root});
    }

    std::int64_t best_boundary = 0;
    std::int64_t best_size = 0;
    std::vector<std::int32_t> best;  // ascending local indices
    std::int64_t visited = 0;

private:
    void recurse(std::vector<std::int32_t> untried) {
        while (!untried.empty()) {
            const std::int32_t v = untried.back();
            untried.pop_back();
            int inside = 0;
            for (std::int32_t w : g_.neighbors(v)) inside += in_s_[w];
            const int delta = g_.degree(v) - 2 * inside;
            boundary_ += delta;
            in_s_[v] = 1;
            set_.push_back(v);
            record();
            if (static_cast<std::int64_t>(set_.size()) < cap_) {
                std::vector<std::int32_t> next = untried;
                const std::size_t fresh_from = next.size();
                for (std::int32_t w : g_.neighbors(v)) {
                    if (!marked_[w]) {
                        marked_[w] = 1;
                        next.push_back(w);
                    }
                }
                const std::vector<std::int32_t> fresh(next.begin() + static_cast<std::ptrdiff_t>(fresh_from),
                                                      next.end());
                recurse(std::move(next));
                for (std::int32_t w : fresh) marked_[w] = 0;
            }
            set_.pop_back();
            in_s_[v] = 0;
            boundary_ -= delta;
        }
    }

    void record() {
        ++visited;
        const auto s = static_cast<std::int64_t>(set_.size());
        const auto lhs = boundary_ * best_size;
        const auto rhs = best_boundary * s;
        if (best_size != 0 && lhs > rhs) return;
        std::vector<std::int32_t> sorted = set_;
        std::sort(sorted.begin(), sorted.end());
        if (best_size == 0 || lhs < rhs || sorted < best) {
            best_boundary = boundary_;
            best_size = s;
            best = std::move(sorted);
        }
    }

    const LocalGraph& g_;
    std::int64_t cap_;
    std::vector<char> marked_;
    std::vector<char> in_s_;
    std::vector<std::int32_t> set_;
    std::int64_t boundary_ = 0;
};

ProfileResult zero_result(const Cluster& cluster, std::int64_t cap, SolverMode mode) {
    ProfileResult r;
    r.cap = cap;
    r.mode = mode;
    r.value = Ratio(0, 1);
    r.witness = cluster.vertices;
    r.zero_reason = ZeroReason::cluster_fits_cap;
    r.cluster_size = static_cast<std::int64_t>(cluster.size());
    r.truncated = cluster.touches_box_boundary;
    return r;
}

void check_origin(const BondConfig& config, VertexId origin) {
    if (origin < 0 || origin >= config.lattice().vertex_count()) throw DomainError("origin outside the box");
}

}  // namespace

std::string to_string(SolverMode m) { return m == SolverMode::exact ? "exact" : "upper_bound"; }

std::string to_string(ConditioningProxy p) {
    return p == ConditioningProxy::touches_boundary ? "touches_boundary" : "largest_cluster";
}

ConditioningProxy parse_proxy(const std::string& text) {
    if (text == "touches_boundary") return ConditioningProxy::touches_boundary;
    if (text == "largest_cluster") return ConditioningProxy::largest_cluster;
    throw ConfigError("unknown conditioning proxy '" + text + "'");
}

std::int64_t checked_power(std::int64_t base, int exponent) {
    std::int64_t out = 1;
    for (int i = 0; i < exponent; ++i) {
        if (base != 0 && out > std::numeric_limits<std::int64_t>::max() / base) {
            throw SizeError("integer power overflows");
        }
        out *= base;
    }
    return out;
}

ProfileResult profile_bruteforce(const BondConfig& config, VertexId origin, std::int64_t cap,
                                 const EnumerationBudget& budget) {
    check_origin(config, origin);
    if (cap < 1) throw DomainError("cap must be >= 1");
    const Cluster cluster = open_cluster(config, origin);
    const auto m = static_cast<std::int64_t>(cluster.size());
    // The only connected H ∋ origin with empty open boundary is C(origin).
    if (m <= cap) return zero_result(cluster, cap, SolverMode::exact);
    if (!budget.admits(m, cap)) {
        throw BudgetError("exact enumeration refused: cluster of " + std::to_string(m) +
                          " vertices with cap " + std::to_string(cap));
    }
    const LocalGraph g = LocalGraph::build(config, cluster);
    Enumerator e(g, cap);
    e.run();

    ProfileResult r;
    r.cap = cap;
    r.mode = SolverMode::exact;
    r.value = Ratio(e.best_boundary, e.best_size);
    for (std::int32_t u : e.best) r.witness.push_back(g.global[u]);
    r.cluster_size = m;
    r.truncated = cluster.touches_box_boundary;
    return r;
}

ProfileResult profile(const BondConfig& config, VertexId origin, int n, const ProfileOptions& options) {
    check_origin(config, origin);
    if (n < 1) throw DomainError("n must be >= 1");
    const std::int64_t cap = checked_power(n, config.lattice().dimension());
    const Cluster cluster = open_cluster(config, origin);
    ProfileResult r;
    const auto m = static_cast<std::int64_t>(cluster.size());
    if (m <= cap) {
        r = zero_result(cluster, cap, SolverMode::exact);
    } else if (options.budget.admits(m, cap)) {
        r = profile_bruteforce(config, origin, cap, options.budget);
    } else {
        const std::uint64_t seed =
            options.seed.value_or(hash_combine(config.master_seed(), static_cast<std::uint64_t>(n)));
        r = profile_anneal(config, origin, cap, options.schedule, options.restarts, seed);
    }
    r.n = n;
    return r;
}

bool satisfies_proxy(const BondConfig& config, const Cluster& origin_cluster, ConditioningProxy proxy) {
    if (proxy == ConditioningProxy::touches_boundary) return origin_cluster.touches_box_boundary;
    return largest_cluster(config).contains(origin_cluster.origin);
}

ProfileResult supercritical_profile(const BondConfig& config, int n, ConditioningProxy proxy,
                                    const ProfileOptions& options) {
    const VertexId origin = config.lattice().origin();
    const Cluster cluster = open_cluster(config, origin);
    if (!satisfies_proxy(config, cluster, proxy)) {
        ProfileResult r;
        r.n = n;
        r.cap = checked_power(n, config.lattice().dimension());
        r.cluster_size = static_cast<std::int64_t>(cluster.size());
        r.truncated = cluster.touches_box_boundary;
        r.discarded = true;
        r.proxy = proxy;
        return r;
    }
    ProfileResult r = profile(config, origin, n, options);
    r.proxy = proxy;
    return r;
}

std::vector<Face> all_faces(int dimension) {
    std::vector<Face> faces;
    for (int a = 0; a < dimension; ++a) {
        faces.push_back({a, -1});
        faces.push_back({a, +1});
    }
    return faces;
}

std::vector<FaceCount> face_connection_counts(const BondConfig& config, int n) {
    const BoxLattice& box = config.lattice();
    if (n < 1 || n > box.radius()) throw DomainError("face radius must lie in [1, R]");
    const ExplorationHistory h = explore_until_halt(config, box.origin(), n);
    std::vector<FaceCount> out;
    for (const Face& f : all_faces(box.dimension())) {
        FaceCount fc{n, f, 0};
        for (VertexId v : h.terminal) {
            if (box.coord(v, f.axis) == f.sign * n) ++fc.count;
        }
        out.push_back(fc);
    }
    return out;
}

FaceCount face_connection_count(const BondConfig& config, int n, Face face) {
    if (face.axis < 0 || face.axis >= config.lattice().dimension() || (face.sign != 1 && face.sign != -1)) {
        throw DomainError("invalid face");
    }
    for (const FaceCount& fc : face_connection_counts(config, n)) {
        if (fc.face == face) return fc;
    }
    throw StateError("face not enumerated");
}

nlohmann::json to_json(const ProfileResult& r) {
    nlohmann::json j;
    j["value"] = r.value.str();
    j["n"] = r.n;
    j["scaled"] = r.scaled().str();
    j["cap"] = r.cap;
    j["witness_size"] = r.witness.size();
    j["mode"] = to_string(r.mode);
    j["zero_reason"] = r.zero_reason ? nlohmann::json("cluster_fits_cap") : nlohmann::json(nullptr);
    j["cluster_size"] = r.cluster_size;
    j["truncated"] = r.truncated;
    j["discarded"] = r.discarded;
    j["proxy"] = r.proxy ? nlohmann::json(to_string(*r.proxy)) : nlohmann::json(nullptr);
    return j;
}

}  // namespace perclab
