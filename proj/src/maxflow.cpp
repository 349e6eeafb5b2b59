#include "perclab/maxflow.hpp"

#include <algorithm>
#include <cmath>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boykov_kolmogorov_max_flow.hpp>

#include "perclab/errors.hpp"
#include "perclab/rng.hpp"

namespace perclab {

namespace {

using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
using FlowGraph = boost::adjacency_list<
    boost::vecS, boost::vecS, boost::directedS,
    boost::property<boost::vertex_color_t, boost::default_color_type,
                    boost::property<boost::vertex_distance_t, long,
                                    boost::property<boost::vertex_predecessor_t, Traits::edge_descriptor>>>,
    boost::property<boost::edge_capacity_t, long,
                    boost::property<boost::edge_residual_capacity_t, long,
                                    boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
using FlowEdge = Traits::edge_descriptor;

class NetworkBuilder {
public:
    explicit NetworkBuilder(std::size_t vertices) : g_(vertices) {}

    // Arc pair u->v and v->u, each the other's reverse.
    void link(std::size_t u, std::size_t v, long forward, long backward) {
        const FlowEdge a = boost::add_edge(u, v, g_).first;
        const FlowEdge b = boost::add_edge(v, u, g_).first;
        auto cap = boost::get(boost::edge_capacity, g_);
        auto rev = boost::get(boost::edge_reverse, g_);
        cap[a] = forward;
        cap[b] = backward;
        rev[a] = b;
        rev[b] = a;
    }

    FlowGraph& graph() { return g_; }

private:
    FlowGraph g_;
};

}  // namespace

FlowResult max_flow(const BondConfig& config, std::span<const VertexId> source,
                    std::span<const VertexId> sink, const VertexFilter& region) {
    const BoxLattice& box = config.lattice();
    if (source.empty() || sink.empty()) throw DomainError("source and sink must be nonempty");
    auto in_region = [&](VertexId v) { return !region || region(v); };

    const auto nv = static_cast<std::size_t>(box.vertex_count());
    std::vector<char> role(nv, 0);  // 1 source, 2 sink
    for (VertexId v : source) {
        if (v < 0 || v >= box.vertex_count() || !in_region(v)) throw DomainError("source vertex outside the network");
        role[v] = 1;
    }
    for (VertexId v : sink) {
        if (v < 0 || v >= box.vertex_count() || !in_region(v)) throw DomainError("sink vertex outside the network");
        if (role[v] == 1) throw DomainError("source and sink must be disjoint");
        role[v] = 2;
    }

    const std::size_t super_source = nv;
    const std::size_t super_sink = nv + 1;
    NetworkBuilder net(nv + 2);
    // Any value above the total open capacity acts as infinity.
    const long big = static_cast<long>(box.edge_count()) + 1;
    std::vector<Edge> open_edges;
    for (EdgeIndex e = 0; e < box.edge_count(); ++e) {
        if (!config.is_open(e)) continue;
        const auto [x, y] = box.endpoints(e);
        if (!in_region(x) || !in_region(y)) continue;
        net.link(static_cast<std::size_t>(x), static_cast<std::size_t>(y), 1, 1);
        open_edges.push_back(box.edge(e));
    }
    for (VertexId v : source) net.link(super_source, static_cast<std::size_t>(v), big, 0);
    for (VertexId v : sink) net.link(static_cast<std::size_t>(v), super_sink, big, 0);

    FlowGraph& g = net.graph();
    FlowResult r;
    r.value = boost::boykov_kolmogorov_max_flow(g, super_source, super_sink);

    // Certificate: residual reachability from the super source.
    auto residual = boost::get(boost::edge_residual_capacity, g);
    std::vector<char> reached(nv + 2, 0);
    std::vector<std::size_t> stack{super_source};
    reached[super_source] = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (auto [it, end] = boost::out_edges(u, g); it != end; ++it) {
            const std::size_t w = boost::target(*it, g);
            if (!reached[w] && residual[*it] > 0) {
                reached[w] = 1;
                stack.push_back(w);
            }
        }
    }
    for (std::size_t v = 0; v < nv; ++v) {
        if (reached[v]) r.source_side.push_back(static_cast<VertexId>(v));
    }
    for (const Edge& e : open_edges) {
        const VertexId y = e.lower + box.stride(e.axis);
        if (reached[e.lower] != reached[y]) r.cut.push_back(e);
    }
    r.certified = !reached[super_sink] && static_cast<std::int64_t>(r.cut.size()) == r.value;
    return r;
}

int FlowCylinder::box_radius() const {
    const int extent = std::max(length, side - 1);
    return std::max(1, (extent + 1) / 2);
}

bool FlowCylinder::contains(const BoxLattice& box, VertexId v) const {
    const int lo = -box.radius();
    for (int a = 0; a < box.dimension(); ++a) {
        const int x = box.coord(v, a) - lo;
        const int extent = a == axis ? length : side - 1;
        if (x > extent) return false;
    }
    return true;
}

std::vector<VertexId> FlowCylinder::face(const BoxLattice& box, bool far) const {
    std::vector<VertexId> out;
    const int target = -box.radius() + (far ? length : 0);
    for (VertexId v = 0; v < box.vertex_count(); ++v) {
        if (box.coord(v, axis) == target && contains(box, v)) out.push_back(v);
    }
    return out;
}

FlowEstimate estimate_flow_constant(double p, const FlowCylinder& cylinder, int trials, std::uint64_t seed) {
    if (cylinder.side < 2 || cylinder.length < 2) throw DomainError("K and L must be >= 2");
    if (cylinder.axis < 0 || cylinder.axis >= cylinder.dimension) throw DomainError("flow direction must be an axis");
    if (trials < 1) throw DomainError("trials must be >= 1");

    const auto box = build_box(cylinder.dimension, cylinder.box_radius());
    const auto near = cylinder.face(*box, false);
    const auto far = cylinder.face(*box, true);
    const double area = std::pow(static_cast<double>(cylinder.side), cylinder.dimension - 1);
    const VertexFilter region = [&](VertexId v) { return cylinder.contains(*box, v); };

    FlowEstimate est;
    est.p = p;
    est.dimension = cylinder.dimension;
    est.axis = cylinder.axis;
    est.side = cylinder.side;
    est.length = cylinder.length;
    est.trials = trials;
    double sum = 0.0, sum_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
        const BondConfig config = sample_config(box, p, derive_seed(seed, static_cast<std::uint64_t>(t)));
        const FlowResult f = max_flow(config, near, far, region);
        est.all_certified = est.all_certified && f.certified;
        est.flows.push_back(f.value);
        const double x = static_cast<double>(f.value) / area;
        sum += x;
        sum_sq += x * x;
    }
    est.mean_flow_per_area = sum / trials;
    if (trials > 1) {
        const double var = std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1));
        est.standard_error = std::sqrt(var / trials);
    }
    return est;
}

}  // namespace perclab
