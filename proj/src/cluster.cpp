#include "perclab/cluster.hpp"

#include <algorithm>
#include <vector>

#include <boost/pending/disjoint_sets.hpp>

#include "perclab/errors.hpp"

namespace perclab {

namespace {

void check_vertex(const BoxLattice& box, VertexId v) {
    if (v < 0 || v >= box.vertex_count()) throw DomainError("vertex outside the box");
}

bool touches(const BoxLattice& box, VertexId v, std::optional<int> box_radius) {
    return box_radius ? box.sup_norm(v) == *box_radius : box.on_boundary(v);
}

std::vector<VertexId> sorted_unique(std::span<const VertexId> vs) {
    std::vector<VertexId> out(vs.begin(), vs.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

bool Cluster::contains(VertexId v) const {
    return std::binary_search(vertices.begin(), vertices.end(), v);
}

Cluster open_cluster(const BondConfig& config, VertexId origin, std::optional<int> box_radius) {
    const VertexId seeds[] = {origin};
    return open_cluster_of_set(config, seeds, box_radius);
}

Cluster open_cluster_of_set(const BondConfig& config, std::span<const VertexId> seeds,
                            std::optional<int> box_radius) {
    const BoxLattice& box = config.lattice();
    if (seeds.empty()) throw DomainError("seed set is empty");
    if (box_radius && (*box_radius < 0 || *box_radius > box.radius())) {
        throw DomainError("constraint box exceeds the simulation box");
    }
    const int d = box.dimension();
    std::vector<char> seen(static_cast<std::size_t>(box.vertex_count()), 0);
    std::vector<VertexId> queue;
    for (VertexId s : seeds) {
        check_vertex(box, s);
        if (box_radius && !box.within(s, *box_radius)) throw DomainError("seed outside the constraint box");
        if (!seen[s]) {
            seen[s] = 1;
            queue.push_back(s);
        }
    }
    Cluster c;
    c.config_seed = config.master_seed();
    c.origin = seeds.front();
    std::int64_t half_edges = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const VertexId v = queue[head];
        if (touches(box, v, box_radius)) c.touches_box_boundary = true;
        for (int a = 0; a < d; ++a) {
            for (int dir : {+1, -1}) {
                const VertexId w = box.neighbor(v, a, dir);
                if (w == kNoVertex || !config.is_open(box.incident_edge(v, a, dir))) continue;
                if (box_radius && !box.within(w, *box_radius)) continue;
                ++half_edges;
                if (!seen[w]) {
                    seen[w] = 1;
                    queue.push_back(w);
                }
            }
        }
    }
    c.open_edge_count = half_edges / 2;
    std::sort(queue.begin(), queue.end());
    c.vertices = std::move(queue);
    return c;
}

Cluster open_cluster_union_find(const BondConfig& config, VertexId origin) {
    const BoxLattice& box = config.lattice();
    check_vertex(box, origin);
    const auto n = static_cast<std::size_t>(box.vertex_count());
    boost::disjoint_sets_with_storage<> sets(n);
    for (EdgeIndex e = 0; e < box.edge_count(); ++e) {
        if (!config.is_open(e)) continue;
        const auto [x, y] = box.endpoints(e);
        sets.union_set(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
    }
    const auto root = sets.find_set(static_cast<std::size_t>(origin));
    Cluster c;
    c.config_seed = config.master_seed();
    c.origin = origin;
    for (VertexId v = 0; v < box.vertex_count(); ++v) {
        if (sets.find_set(static_cast<std::size_t>(v)) != root) continue;
        c.vertices.push_back(v);
        if (box.on_boundary(v)) c.touches_box_boundary = true;
    }
    for (EdgeIndex e = 0; e < box.edge_count(); ++e) {
        if (config.is_open(e) && sets.find_set(static_cast<std::size_t>(box.endpoints(e).first)) == root) {
            ++c.open_edge_count;
        }
    }
    return c;
}

Cluster largest_cluster(const BondConfig& config) {
    const BoxLattice& box = config.lattice();
    const auto n = static_cast<std::size_t>(box.vertex_count());
    boost::disjoint_sets_with_storage<> sets(n);
    for (EdgeIndex e = 0; e < box.edge_count(); ++e) {
        if (!config.is_open(e)) continue;
        const auto [x, y] = box.endpoints(e);
        sets.union_set(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
    }
    // Scanning in rank order, the first vertex seen of each root is its
    // minimal rank, so a strict '>' keeps the smallest-rank cluster on ties.
    std::vector<std::int64_t> count(n, 0);
    for (std::size_t v = 0; v < n; ++v) ++count[sets.find_set(v)];
    std::int64_t best = -1;
    VertexId best_first = kNoVertex;
    std::vector<char> visited(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        const auto r = sets.find_set(v);
        if (visited[r]) continue;
        visited[r] = 1;
        if (count[r] > best) {
            best = count[r];
            best_first = static_cast<VertexId>(v);
        }
    }
    return open_cluster(config, best_first);
}

Graph open_subgraph(const BondConfig& config, const Cluster& cluster) {
    const BoxLattice& box = config.lattice();
    Graph g;
    g.vertices = cluster.vertices;
    for (VertexId v : cluster.vertices) {
        for (int a = 0; a < box.dimension(); ++a) {
            const VertexId w = box.neighbor(v, a, +1);
            if (w != kNoVertex && config.is_open(box.incident_edge(v, a, +1)) && cluster.contains(w)) {
                g.edges.push_back({v, w});
            }
        }
    }
    return g;
}

Graph full_graph(const BoxLattice& lattice) {
    Graph g;
    g.vertices.resize(static_cast<std::size_t>(lattice.vertex_count()));
    for (VertexId v = 0; v < lattice.vertex_count(); ++v) g.vertices[v] = v;
    for (EdgeIndex e = 0; e < lattice.edge_count(); ++e) {
        const auto [x, y] = lattice.endpoints(e);
        g.edges.push_back({x, y});
    }
    return g;
}

std::vector<GraphEdge> edge_boundary(const Graph& g, std::span<const VertexId> a) {
    const auto set = sorted_unique(a);
    for (VertexId v : set) {
        if (!std::binary_search(g.vertices.begin(), g.vertices.end(), v)) {
            throw DomainError("subset is not contained in the graph's vertex set");
        }
    }
    auto in = [&](VertexId v) { return std::binary_search(set.begin(), set.end(), v); };
    std::vector<GraphEdge> out;
    for (const GraphEdge& e : g.edges) {
        const bool ix = in(e.x);
        const bool iy = in(e.y);
        if (ix && !iy) out.push_back({e.x, e.y});
        if (iy && !ix) out.push_back({e.y, e.x});
    }
    return out;
}

std::vector<Edge> open_edge_boundary(const BondConfig& config, std::span<const VertexId> h) {
    const BoxLattice& box = config.lattice();
    const auto set = sorted_unique(h);
    for (VertexId v : set) check_vertex(box, v);
    auto in = [&](VertexId v) { return std::binary_search(set.begin(), set.end(), v); };
    std::vector<Edge> out;
    for (VertexId v : set) {
        for (int a = 0; a < box.dimension(); ++a) {
            for (int dir : {+1, -1}) {
                const VertexId w = box.neighbor(v, a, dir);
                if (w == kNoVertex || in(w) || !config.is_open(box.incident_edge(v, a, dir))) continue;
                out.push_back(dir > 0 ? Edge{v, a} : Edge{w, a});
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::int64_t open_edge_boundary_size(const BondConfig& config, std::span<const VertexId> h) {
    return static_cast<std::int64_t>(open_edge_boundary(config, h).size());
}

nlohmann::json to_json(const Cluster& cluster, const BoxLattice& lattice) {
    nlohmann::json j;
    const int d = lattice.dimension();
    auto point = [&](VertexId v) {
        const Point x = lattice.coords(v);
        return std::vector<int>(x.begin(), x.begin() + d);
    };
    j["d"] = d;
    j["radius"] = lattice.radius();
    j["origin"] = point(cluster.origin);
    j["size"] = cluster.size();
    j["touches_box_boundary"] = cluster.touches_box_boundary;
    j["open_edge_count"] = cluster.open_edge_count;
    auto& vs = j["vertices"] = nlohmann::json::array();
    for (VertexId v : cluster.vertices) vs.push_back(point(v));
    return j;
}

}  // namespace perclab
