#include "perclab/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "perclab/errors.hpp"

namespace perclab {

namespace {

class Explorer {
public:
    Explorer(const BondConfig& config, std::optional<int> box_radius)
        : config_(config), box_(config.lattice()), radius_(box_radius),
          in_c_(static_cast<std::size_t>(box_.vertex_count()), 0) {
        if (radius_ && (*radius_ < 0 || *radius_ > box_.radius())) {
            throw DomainError("constraint box exceeds the simulation box");
        }
    }

    bool allowed(VertexId w) const { return !radius_ || box_.within(w, *radius_); }

    // Adds v to C, keeping both boundary counts exact.
    void add(VertexId v) {
        int open = 0, open_allowed = 0, into_c = 0;
        for (int a = 0; a < box_.dimension(); ++a) {
            for (int dir : {+1, -1}) {
                const VertexId w = box_.neighbor(v, a, dir);
                if (w == kNoVertex || !config_.is_open(box_.incident_edge(v, a, dir))) continue;
                ++open;
                if (allowed(w)) ++open_allowed;
                if (in_c_[w]) ++into_c;
            }
        }
        boundary_ += open - 2 * into_c;
        allowed_boundary_ += open_allowed - 2 * into_c;
        in_c_[v] = 1;
        ++size_;
        if (box_.on_boundary(v)) touches_box_ = true;
        if (radius_ && box_.sup_norm(v) == *radius_) touches_constraint_ = true;
    }

    // New shell from the vertices that may still have unexplored open neighbours.
    std::vector<VertexId> next_shell(std::span<const VertexId> frontier) {
        std::vector<VertexId> shell;
        for (VertexId v : frontier) {
            for (int a = 0; a < box_.dimension(); ++a) {
                for (int dir : {+1, -1}) {
                    const VertexId w = box_.neighbor(v, a, dir);
                    if (w == kNoVertex || in_c_[w] == 1 || in_c_[w] == 2 || !allowed(w)) continue;
                    if (!config_.is_open(box_.incident_edge(v, a, dir))) continue;
                    in_c_[w] = 2;  // pending
                    shell.push_back(w);
                }
            }
        }
        for (VertexId w : shell) in_c_[w] = 0;
        std::sort(shell.begin(), shell.end());
        return shell;
    }

    bool contains(VertexId v) const { return in_c_[v] == 1; }
    std::int64_t size() const { return size_; }
    std::int64_t boundary() const { return boundary_; }
    std::int64_t allowed_boundary() const { return allowed_boundary_; }
    bool touches_box() const { return touches_box_; }
    bool touches_constraint() const { return touches_constraint_; }

private:
    const BondConfig& config_;
    const BoxLattice& box_;
    std::optional<int> radius_;
    std::vector<char> in_c_;
    std::int64_t size_ = 0;
    std::int64_t boundary_ = 0;
    std::int64_t allowed_boundary_ = 0;
    bool touches_box_ = false;
    bool touches_constraint_ = false;
};

std::vector<VertexId> checked_seeds(const BoxLattice& box, std::span<const VertexId> c,
                                    std::optional<int> box_radius) {
    if (c.empty()) throw DomainError("exploration needs a nonempty vertex set");
    std::vector<VertexId> seeds(c.begin(), c.end());
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    for (VertexId v : seeds) {
        if (v < 0 || v >= box.vertex_count()) throw DomainError("vertex outside the box");
        if (box_radius && !box.within(v, *box_radius)) throw DomainError("vertex outside the constraint box");
    }
    return seeds;
}

}  // namespace

std::optional<std::int64_t> ExplorationHistory::cluster_size_at(std::int64_t l) const {
    if (l < 0) return std::nullopt;
    if (l <= last_step()) return steps[static_cast<std::size_t>(l)].cluster_size;
    if (halted) return steps.back().cluster_size;
    return std::nullopt;
}

std::vector<VertexId> ExplorationHistory::cluster_at(std::int64_t l) const {
    if (!shells) throw StateError("exploration history did not retain vertex sets");
    if (l < 0) throw DomainError("negative step");
    std::vector<VertexId> out = seeds;
    const auto upto = std::min<std::int64_t>(l, static_cast<std::int64_t>(shells->size()));
    if (l > upto && !halted) throw DomainError("step beyond the recorded history");
    for (std::int64_t i = 0; i < upto; ++i) {
        const auto& s = (*shells)[static_cast<std::size_t>(i)];
        out.insert(out.end(), s.begin(), s.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

ExploreStepResult explore_step(const BondConfig& config, std::span<const VertexId> c,
                               std::optional<int> box_radius) {
    const auto seeds = checked_seeds(config.lattice(), c, box_radius);
    Explorer ex(config, box_radius);
    for (VertexId v : seeds) ex.add(v);
    ExploreStepResult r;
    r.shell = ex.next_shell(seeds);
    r.next.reserve(seeds.size() + r.shell.size());
    std::merge(seeds.begin(), seeds.end(), r.shell.begin(), r.shell.end(), std::back_inserter(r.next));
    return r;
}

ExplorationHistory explore_until_halt(const BondConfig& config, VertexId origin,
                                      std::optional<int> box_radius,
                                      std::optional<std::int64_t> max_steps, bool retain_shells) {
    const VertexId seeds[] = {origin};
    return explore_from(config, seeds, box_radius, max_steps, retain_shells);
}

ExplorationHistory explore_from(const BondConfig& config, std::span<const VertexId> c,
                                std::optional<int> box_radius, std::optional<std::int64_t> max_steps,
                                bool retain_shells) {
    const BoxLattice& box = config.lattice();
    ExplorationHistory h;
    h.dimension = box.dimension();
    h.seeds = checked_seeds(box, c, box_radius);
    h.constrained_box_radius = box_radius;
    if (retain_shells) h.shells.emplace();
    const std::int64_t limit = max_steps.value_or(box.vertex_count());
    if (limit < 0) throw DomainError("max_steps must be nonnegative");

    Explorer ex(config, box_radius);
    for (VertexId v : h.seeds) ex.add(v);
    h.steps.push_back({ex.size(), 0, ex.boundary(), ex.allowed_boundary()});

    std::vector<VertexId> members = h.seeds;
    std::vector<VertexId> frontier = h.seeds;
    while (true) {
        if (h.last_step() >= limit) {
            h.max_steps_exhausted = true;
            break;
        }
        auto shell = ex.next_shell(frontier);
        if (shell.empty()) {
            h.halted = true;
            break;
        }
        for (VertexId v : shell) ex.add(v);
        h.steps.push_back({ex.size(), static_cast<std::int64_t>(shell.size()), ex.boundary(),
                           ex.allowed_boundary()});
        members.insert(members.end(), shell.begin(), shell.end());
        if (h.shells) h.shells->push_back(shell);
        frontier = std::move(shell);
    }
    std::sort(members.begin(), members.end());
    h.terminal = std::move(members);
    h.touches_box_boundary = ex.touches_box();
    h.touches_constraint_boundary = ex.touches_constraint();
    return h;
}

void write_history_csv(std::ostream& out, const ExplorationHistory& history) {
    out << "l,cluster_size,shell_size,open_boundary\n";
    for (std::size_t l = 0; l < history.steps.size(); ++l) {
        const auto& s = history.steps[l];
        out << l << ',' << s.cluster_size << ',' << s.shell_size << ',' << s.open_boundary << '\n';
    }
}

bool GrowthCertificate::all_hold() const {
    return std::all_of(verified_range.begin(), verified_range.end(),
                       [](const GrowthCheck& g) { return g.holds; });
}

GrowthCertificate growth_certificate(const ExplorationHistory& history, double c, int n0,
                                     std::optional<int> n_max) {
    if (!(c > 0.0)) throw DomainError("profile constant c must be positive");
    if (n0 < 1) throw DomainError("n0 must be >= 1");
    if (history.steps.empty()) throw DomainError("empty exploration history");

    GrowthCertificate cert;
    cert.c = c;
    cert.n0 = n0;
    const int d = history.dimension;
    cert.dimension = d;
    cert.alpha = 1.0 / std::pow(static_cast<double>(n0), d);
    cert.k = static_cast<std::int64_t>(std::floor(std::ldexp(static_cast<double>(d), d + 1) / c)) + 1;
    const std::int64_t k = cert.k;

    // Unconstrained run that halted without reaching the box boundary: the
    // cluster is finite and fully revealed, so C_l is known for every l.
    const bool exhausted = history.halted && !history.touches_box_boundary &&
                           !history.constrained_box_radius;
    const std::int64_t recorded_blocks = history.last_step() / k;
    int last_n = n0 + static_cast<int>(recorded_blocks);
    if (exhausted) last_n += 1;
    if (n_max) {
        if (*n_max > last_n && !exhausted) cert.range_truncated = true;
        last_n = exhausted ? *n_max : std::min(*n_max, last_n);
    }

    auto step_size = [&](std::int64_t l) { return *history.cluster_size_at(l); };
    auto boundary_at = [&](std::int64_t l) {
        return l <= history.last_step() ? history.steps[static_cast<std::size_t>(l)].open_boundary
                                        : std::int64_t{0};
    };

    // Per-step bounds for every block feeding a verified n.
    std::vector<char> block_ok;
    for (int n = n0; n < last_n; ++n) {
        bool ok = true;
        const double required = cert.alpha * c * std::pow(static_cast<double>(n), d - 1);
        for (std::int64_t j = 0; j < k; ++j) {
            const std::int64_t l = static_cast<std::int64_t>(n - n0) * k + j;
            StepBoundCheck s;
            s.step = l;
            s.n = n;
            s.open_boundary = boundary_at(l);
            s.required = required;
            s.holds = static_cast<double>(s.open_boundary) >= required;
            s.ratio_holds = static_cast<double>(s.open_boundary) * n >= c * static_cast<double>(step_size(l));
            ok = ok && s.holds;
            cert.step_bounds.push_back(s);
        }
        block_ok.push_back(ok);
    }

    bool previous_holds = static_cast<double>(step_size(0)) >= cert.alpha * std::pow(n0, d);
    for (int n = n0 + 1; n <= last_n; ++n) {
        GrowthCheck g;
        g.n = n;
        g.step = static_cast<std::int64_t>(n - n0) * k;
        g.cluster_size = step_size(g.step);
        g.required = cert.alpha * std::pow(static_cast<double>(n), d);
        g.holds = static_cast<double>(g.cluster_size) >= g.required;
        g.hypotheses_held = previous_holds && block_ok[static_cast<std::size_t>(n - 1 - n0)];
        g.beyond_halt = g.step > history.last_step();
        if (g.hypotheses_held && !g.holds) ++cert.implication_violations;
        if (!g.holds && exhausted) cert.cluster_exhausted = true;
        previous_holds = g.holds;
        cert.verified_range.push_back(g);
    }
    return cert;
}

}  // namespace perclab
