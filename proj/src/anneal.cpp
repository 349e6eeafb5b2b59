#include <algorithm>
#include <array>
#include <cmath>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boykov_kolmogorov_max_flow.hpp>

#include "local_graph.hpp"
#include "perclab/errors.hpp"
#include "perclab/isoprofile.hpp"
#include "perclab/rng.hpp"

namespace perclab {

namespace {

using detail::IndexedSet;
using detail::LocalGraph;

// A connected vertex set H containing the root, with its open boundary size
// and the set of vertices it could grow into.
class ConnectedSubset {
public:
    explicit ConnectedSubset(const LocalGraph& g)
        : g_(g), in_h_(static_cast<std::size_t>(g.size()), 0),
          nbr_in_h_(static_cast<std::size_t>(g.size()), 0), members_(g.size()), frontier_(g.size()),
          mark_(static_cast<std::size_t>(g.size()), 0), owner_(static_cast<std::size_t>(g.size()), 0) {}

    void reset() {
        for (std::int32_t v : members_.items()) {
            in_h_[v] = 0;
            for (std::int32_t w : g_.neighbors(v)) nbr_in_h_[w] = 0;
        }
        members_.clear();
        frontier_.clear();
        boundary_ = 0;
        add(g_.root);
    }

    std::int64_t size() const { return members_.size(); }
    std::int64_t boundary() const { return boundary_; }
    const IndexedSet& members() const { return members_; }
    const IndexedSet& frontier() const { return frontier_; }

    int delta_add(std::int32_t v) const { return g_.degree(v) - 2 * nbr_in_h_[v]; }
    int delta_remove(std::int32_t v) const { return 2 * nbr_in_h_[v] - g_.degree(v); }

    void add(std::int32_t v) {
        boundary_ += delta_add(v);
        in_h_[v] = 1;
        members_.insert(v);
        frontier_.erase(v);
        for (std::int32_t w : g_.neighbors(v)) {
            if (++nbr_in_h_[w] == 1 && !in_h_[w]) frontier_.insert(w);
        }
    }

    void remove(std::int32_t v) {
        boundary_ += delta_remove(v);
        in_h_[v] = 0;
        members_.erase(v);
        if (nbr_in_h_[v] > 0) frontier_.insert(v);
        for (std::int32_t w : g_.neighbors(v)) {
            if (--nbr_in_h_[w] == 0 && !in_h_[w]) frontier_.erase(w);
        }
    }

    // H \ {v} stays connected (and v is not the root). Flood fills from each
    // H-neighbour of v in lockstep; they either all merge or one group runs
    // dry, so the cost tracks the smaller side of a cut.
    bool removable(std::int32_t v) {
        if (v == g_.root) return false;
        std::array<std::int32_t, 2 * kMaxDimension> seeds{};
        int count = 0;
        for (std::int32_t w : g_.neighbors(v)) {
            if (in_h_[w]) seeds[count++] = w;
        }
        if (count <= 1) return true;

        if (++stamp_ == 0) {
            std::fill(mark_.begin(), mark_.end(), 0);
            stamp_ = 1;
        }
        std::array<int, 2 * kMaxDimension> parent{};
        auto find = [&](int i) {
            while (parent[i] != i) i = parent[i] = parent[parent[i]];
            return i;
        };
        for (int i = 0; i < count; ++i) {
            parent[i] = i;
            queues_[i].clear();
            heads_[i] = 0;
            queues_[i].push_back(seeds[i]);
            mark_[seeds[i]] = stamp_;
            owner_[seeds[i]] = static_cast<std::int8_t>(i);
        }
        mark_[v] = stamp_;
        owner_[v] = -1;
        int groups = count;
        while (true) {
            for (int i = 0; i < count; ++i) {
                if (heads_[i] >= queues_[i].size()) continue;
                const std::int32_t u = queues_[i][heads_[i]++];
                for (std::int32_t w : g_.neighbors(u)) {
                    if (!in_h_[w]) continue;
                    if (mark_[w] != stamp_) {
                        mark_[w] = stamp_;
                        owner_[w] = static_cast<std::int8_t>(i);
                        queues_[i].push_back(w);
                    } else if (owner_[w] >= 0) {
                        const int a = find(owner_[w]);
                        const int b = find(i);
                        if (a != b) {
                            parent[a] = b;
                            if (--groups == 1) return true;
                        }
                    }
                }
            }
            for (int i = 0; i < count; ++i) {
                if (find(i) != i) continue;
                bool alive = false;
                for (int j = 0; j < count && !alive; ++j) {
                    alive = find(j) == i && heads_[j] < queues_[j].size();
                }
                if (!alive) return false;
            }
        }
    }

private:
    const LocalGraph& g_;
    std::vector<char> in_h_;
    std::vector<int> nbr_in_h_;
    IndexedSet members_;
    IndexedSet frontier_;
    std::int64_t boundary_ = 0;

    std::vector<std::uint32_t> mark_;
    std::vector<std::int8_t> owner_;
    std::uint32_t stamp_ = 0;
    std::array<std::vector<std::int32_t>, 2 * kMaxDimension> queues_;
    std::array<std::size_t, 2 * kMaxDimension> heads_{};
};

struct Snapshot {
    std::int64_t boundary = 0;
    std::int64_t size = 0;
    std::vector<std::int32_t> members;

    bool valid() const { return size > 0; }
    // strictly smaller ratio than `other`
    bool beats(std::int64_t b, std::int64_t s) const {
        return !valid() || b * size < boundary * s;
    }
};

bool lex_less(std::vector<std::int32_t> a, std::vector<std::int32_t> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Starting from `start` (connected, contains the root), grows H by taking
// the frontier vertex with the smallest boundary increase plus uniform noise
// of the given amplitude, then leaves H at the best prefix seen.
void greedy_start(ConnectedSubset& h, const std::vector<std::int32_t>& start, std::int64_t cap, double noise,
                  Rng& rng, Snapshot& best) {
    h.reset();
    for (std::int32_t v : start) {
        if (v != h.members().at(0)) h.add(v);
    }
    const std::int64_t base = h.size();
    std::vector<std::int32_t> order;
    std::int64_t best_len = base;
    Snapshot local{h.boundary(), h.size(), {}};
    while (h.size() < cap && !h.frontier().empty()) {
        const auto& f = h.frontier();
        std::int32_t pick = -1;
        double pick_score = 0.0;
        for (std::int32_t i = 0; i < f.size(); ++i) {
            const std::int32_t v = f.at(i);
            const double score = h.delta_add(v) + noise * rng.uniform() + 1e-9 * rng.uniform();
            if (pick < 0 || score < pick_score) {
                pick = v;
                pick_score = score;
            }
        }
        h.add(pick);
        order.push_back(pick);
        if (local.beats(h.boundary(), h.size())) {
            local.boundary = h.boundary();
            local.size = h.size();
            best_len = h.size();
        }
    }
    h.reset();
    for (std::int32_t v : start) {
        if (v != h.members().at(0)) h.add(v);
    }
    for (std::int64_t i = 0; i < best_len - base; ++i) h.add(order[static_cast<std::size_t>(i)]);
    if (best.beats(h.boundary(), h.size())) best = {h.boundary(), h.size(), h.members().items()};
}

// With a reward w_v for every member, min B(H) - sum w_v over H containing
// the root is a minimum cut (root tied to the source, positive rewards as
// source arcs, penalties as sink arcs, unit open edges). The whole cluster has
// no open boundary, so the reward falls off radially, w_v = s (rho - |v - c|),
// to produce localised low-boundary sets. Bisecting rho per centre and slope
// gives candidates of size <= cap; the best per centre seed the annealer.
// Only vertices in a window around the root enter the network; edges leaving
// the window are charged as boundary.
class RadialCutSeeder {
public:
    RadialCutSeeder(const LocalGraph& g, const BoxLattice& lattice, std::int64_t cap)
        : g_(g), cap_(cap), dim_(lattice.dimension()) {
        reach_ = 2.0 * std::pow(static_cast<double>(cap), 1.0 / dim_) + 2.0;
        const Point origin = lattice.coords(g.global[g.root]);
        local_.assign(static_cast<std::size_t>(g.size()), -1);
        for (std::int32_t u = 0; u < g.size(); ++u) {
            const Point x = lattice.coords(g.global[u]);
            std::array<double, kMaxDimension> rel{};
            double far = 0.0;
            for (int i = 0; i < dim_; ++i) {
                rel[i] = x[i] - origin[i];
                far = std::max(far, std::abs(rel[i]));
            }
            if (far > reach_) continue;
            local_[u] = static_cast<std::int32_t>(members_.size());
            members_.push_back(u);
            pos_.push_back(rel);
        }
        const auto m = members_.size();
        net_ = Net(m + 2);
        const std::size_t src = m, snk = m + 1;
        leak_.assign(m, 0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::int32_t w : g.neighbors(members_[i])) {
                const std::int32_t j = local_[w];
                if (j < 0) {
                    ++leak_[i];
                } else if (static_cast<std::size_t>(j) > i) {
                    link(i, static_cast<std::size_t>(j), kScale, kScale);
                }
            }
            source_arcs_.push_back(link(src, i, 0, 0));
            sink_arcs_.push_back(link(i, snk, 0, 0));
        }
        root_ = static_cast<std::size_t>(local_[g.root]);
    }

    // Best candidate for each centre, root first in breadth-first order.
    std::vector<std::vector<std::int32_t>> seeds() {
        std::vector<std::array<double, kMaxDimension>> centres(1);
        const double shift = 0.5 * std::pow(static_cast<double>(cap_), 1.0 / dim_);
        for (int i = 0; i < dim_; ++i) {
            for (double sgn : {-1.0, 1.0}) {
                std::array<double, kMaxDimension> c{};
                c[i] = sgn * shift;
                centres.push_back(c);
            }
        }
        std::vector<std::vector<std::int32_t>> out;
        for (const auto& c : centres) {
            std::vector<std::int32_t> best;
            std::int64_t best_b = 0, best_s = 0;
            for (double slope : {0.25, 1.0, 4.0}) {
                double lo = 0.0, hi = reach_;
                for (int it = 0; it < 14; ++it) {
                    const double rho = 0.5 * (lo + hi);
                    std::int64_t b = 0;
                    auto h = solve(c, slope, rho, b);
                    const auto sz = static_cast<std::int64_t>(h.size());
                    if (sz > cap_) {
                        hi = rho;
                        continue;
                    }
                    lo = rho;
                    if (best_s == 0 || b * best_s < best_b * sz) {
                        best = std::move(h);
                        best_b = b;
                        best_s = sz;
                    }
                }
            }
            if (best_s > 1) out.push_back(std::move(best));
        }
        return out;
    }

private:
    static constexpr long kScale = 1L << 12;

    using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
    using Net = boost::adjacency_list<
        boost::vecS, boost::vecS, boost::directedS,
        boost::property<boost::vertex_color_t, boost::default_color_type,
                        boost::property<boost::vertex_distance_t, long,
                                        boost::property<boost::vertex_predecessor_t, Traits::edge_descriptor>>>,
        boost::property<boost::edge_capacity_t, long,
                        boost::property<boost::edge_residual_capacity_t, long,
                                        boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
    using Arc = Traits::edge_descriptor;

    Arc link(std::size_t u, std::size_t v, long forward, long backward) {
        const Arc a = boost::add_edge(u, v, net_).first;
        const Arc b = boost::add_edge(v, u, net_).first;
        auto cap = boost::get(boost::edge_capacity, net_);
        auto rev = boost::get(boost::edge_reverse, net_);
        cap[a] = forward;
        cap[b] = backward;
        rev[a] = b;
        rev[b] = a;
        return a;
    }

    std::vector<std::int32_t> solve(const std::array<double, kMaxDimension>& c, double slope, double rho,
                                    std::int64_t& boundary) {
        auto cap = boost::get(boost::edge_capacity, net_);
        const std::size_t m = members_.size();
        for (std::size_t i = 0; i < m; ++i) {
            double r2 = 0.0;
            for (int k = 0; k < dim_; ++k) r2 += (pos_[i][k] - c[k]) * (pos_[i][k] - c[k]);
            const long w = std::lround(slope * (rho - std::sqrt(r2)) * kScale) - leak_[i] * kScale;
            cap[source_arcs_[i]] = std::max(w, 0L);
            cap[sink_arcs_[i]] = std::max(-w, 0L);
        }
        cap[source_arcs_[root_]] = static_cast<long>(g_.adjacency.size() + 1) * kScale;
        boost::boykov_kolmogorov_max_flow(net_, m, m + 1);

        auto residual = boost::get(boost::edge_residual_capacity, net_);
        std::vector<char> reached(m + 2, 0);
        std::vector<std::size_t> stack{m};
        reached[m] = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (auto [it, end] = boost::out_edges(u, net_); it != end; ++it) {
                const std::size_t w = boost::target(*it, net_);
                if (!reached[w] && residual[*it] > 0) {
                    reached[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        // the component of the root, breadth-first so replaying keeps H connected
        std::vector<char> seen(m, 0);
        std::vector<std::int32_t> order{g_.root};
        seen[root_] = 1;
        boundary = 0;
        for (std::size_t head = 0; head < order.size(); ++head) {
            for (std::int32_t w : g_.neighbors(order[head])) {
                const std::int32_t j = local_[w];
                if (j < 0 || !reached[static_cast<std::size_t>(j)]) {
                    ++boundary;
                } else if (!seen[static_cast<std::size_t>(j)]) {
                    seen[static_cast<std::size_t>(j)] = 1;
                    order.push_back(w);
                }
            }
        }
        return order;
    }

    const LocalGraph& g_;
    std::int64_t cap_;
    int dim_;
    double reach_ = 0.0;
    std::vector<std::int32_t> local_;
    std::vector<std::int32_t> members_;
    std::vector<std::array<double, kMaxDimension>> pos_;
    std::vector<long> leak_;
    std::size_t root_ = 0;
    Net net_;
    std::vector<Arc> source_arcs_;
    std::vector<Arc> sink_arcs_;
};

}  // namespace

ProfileResult profile_anneal(const BondConfig& config, VertexId origin, std::int64_t cap,
                             const AnnealSchedule& schedule, int restarts, std::uint64_t seed) {
    if (cap < 1) throw DomainError("cap must be >= 1");
    if (restarts < 1) throw DomainError("restarts must be >= 1");
    if (!(schedule.t_start > 0.0 && schedule.t_end > 0.0)) throw DomainError("temperatures must be positive");

    const Cluster cluster = open_cluster(config, origin);
    ProfileResult result;
    result.cap = cap;
    result.mode = SolverMode::upper_bound;
    result.cluster_size = static_cast<std::int64_t>(cluster.size());
    result.truncated = cluster.touches_box_boundary;
    if (result.cluster_size <= cap) {
        result.value = Ratio(0, 1);
        result.witness = cluster.vertices;
        result.zero_reason = ZeroReason::cluster_fits_cap;
        return result;
    }

    const LocalGraph g = LocalGraph::build(config, cluster);
    ConnectedSubset h(g);
    const std::int64_t moves = std::max(schedule.min_moves, schedule.sweeps * cap);
    const double cooling = std::log(schedule.t_end / schedule.t_start) / static_cast<double>(moves);

    const std::vector<std::int32_t> root_only{g.root};
    std::vector<std::vector<std::int32_t>> seeds;
    if (restarts > 1) seeds = RadialCutSeeder(g, config.lattice(), cap).seeds();

    Snapshot overall;
    for (int r = 0; r < restarts; ++r) {
        Rng rng(hash_combine(seed, static_cast<std::uint64_t>(r)));
        Snapshot best;
        // even restarts grow from the root, odd ones from the cut seeds in turn
        const double noise = r < 2 ? 0.0 : 0.5 + 2.5 * rng.uniform();
        const bool seeded = r % 2 == 1 && !seeds.empty();
        greedy_start(h, seeded ? seeds[static_cast<std::size_t>(r / 2) % seeds.size()] : root_only, cap, noise, rng,
                     best);

        for (std::int64_t step = 0; step < moves; ++step) {
            const double t = schedule.t_start * std::exp(cooling * static_cast<double>(step));
            const bool can_add = h.size() < cap && !h.frontier().empty();
            const bool can_remove = h.size() > 1;
            const bool adding = can_add && (!can_remove || (rng.next() & 1U));
            std::int32_t v;
            std::int64_t nb, ns;
            if (adding) {
                v = h.frontier().at(static_cast<std::int32_t>(rng.below(h.frontier().size())));
                nb = h.boundary() + h.delta_add(v);
                ns = h.size() + 1;
            } else {
                v = h.members().at(static_cast<std::int32_t>(rng.below(h.members().size())));
                if (v == g.root) continue;
                nb = h.boundary() + h.delta_remove(v);
                ns = h.size() - 1;
            }
            // Change of B - r|H| at the current ratio r, i.e. ns * (new ratio - r).
            const double delta = static_cast<double>(nb) -
                                 static_cast<double>(h.boundary()) * static_cast<double>(ns) /
                                     static_cast<double>(h.size());
            if (delta > 0.0 && rng.uniform() >= std::exp(-delta / t)) continue;
            if (!adding && !h.removable(v)) continue;
            if (adding) {
                h.add(v);
            } else {
                h.remove(v);
            }
            if (best.beats(h.boundary(), h.size())) best = {h.boundary(), h.size(), h.members().items()};
        }

        const bool strictly = overall.beats(best.boundary, best.size);
        const bool tie = !strictly && best.boundary * overall.size == overall.boundary * best.size;
        if (strictly || (tie && lex_less(best.members, overall.members))) overall = std::move(best);
    }

    result.value = Ratio(overall.boundary, overall.size);
    result.witness.reserve(overall.members.size());
    for (std::int32_t u : overall.members) result.witness.push_back(g.global[u]);
    std::sort(result.witness.begin(), result.witness.end());
    return result;
}

}  // namespace perclab
