// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/program_options.hpp>

#include "perclab/cluster.hpp"
#include "perclab/errors.hpp"
#include "perclab/exploration.hpp"
#include "perclab/geometry.hpp"
#include "perclab/harness.hpp"
#include "perclab/isoprofile.hpp"
#include "perclab/maxflow.hpp"
#include "perclab/norm.hpp"
#include "perclab/rng.hpp"
#include "perclab/wulff.hpp"

namespace po = boost::program_options;
using namespace perclab;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail << "  failed:";
            detail << " [" << what << "]";
            pass = false;
        }
    }
};

class Thresholds {
public:
    explicit Thresholds(const po::variables_map& vm) : vm_(vm) {}

    std::string text(const std::string& key) const {
        if (!vm_.count(key)) throw ConfigError("thresholds: missing '" + key + "'");
        return vm_[key].as<std::string>();
    }
    double real(const std::string& key) const { return parse_double(key, text(key)); }
    int integer(const std::string& key) const {
        const std::string t = text(key);
        int v = 0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size()) throw ConfigError("thresholds: bad integer " + key);
        return v;
    }
    std::vector<std::string> words(const std::string& key) const {
        std::vector<std::string> out;
        std::stringstream ss(text(key));
        for (std::string w; std::getline(ss, w, ',');) {
            w.erase(0, w.find_first_not_of(' '));
            w.erase(w.find_last_not_of(' ') + 1);
            out.push_back(w);
        }
        return out;
    }
    std::vector<double> reals(const std::string& key) const {
        std::vector<double> out;
        for (const auto& w : words(key)) out.push_back(parse_double(key, w));
        return out;
    }
    std::vector<int> integers(const std::string& key) const {
        std::vector<int> out;
        for (double v : reals(key)) out.push_back(static_cast<int>(v));
        return out;
    }

private:
    static double parse_double(const std::string& key, const std::string& t) {
        double v = 0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size()) throw ConfigError("thresholds: bad number " + key);
        return v;
    }

    const po::variables_map& vm_;
};

const char* const kKeys[] = {
    "oracle.instances", "oracle.max_cap", "oracle.restarts", "oracle.seconds", "exact.n_list", "zero.instances",
    "zero.radius", "zero.n", "explore.instances", "explore.radius", "critical.config", "critical.seconds",
    "super.config", "super.max_relative_change", "super.sigmas", "super.seconds", "wulff.directions",
    "wulff.exact_tolerance", "wulff.disc_volume_tolerance", "wulff.disc_tension_tolerance", "wulff.norms",
    "wulff.random_polytopes", "wulff.slack", "flow.side", "flow.length", "flow.trials", "flow.p_list",
    "flow.low_max", "flow.seconds", "scan.p_list", "scan.side", "scan.length", "scan.flow_trials", "scan.theta_n",
    "scan.theta_trials", "scan.seconds", "faces.config", "faces.probe_config", "faces.sigmas", "faces.seconds",
    "determinism.trials", "determinism.workers",
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(double v) {
    std::ostringstream o;
    o << std::setprecision(6) << v;
    return o.str();
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + fmt(x);
    return s;
}

struct Context {
    Thresholds th;
    std::filesystem::path configs;

    ExperimentConfig campaign(const std::string& key) const {
        auto cfg = ExperimentConfig::load((configs / th.text(key)).string());
        cfg.validate();
        return cfg;
    }
};

void oracle_equivalence(const Context& cx, Outcome& o) {
    const int instances = cx.th.integer("oracle.instances");
    const int max_cap = cx.th.integer("oracle.max_cap");
    const int restarts = cx.th.integer("oracle.restarts");
    int agree = 0;
    for (int s = 0; s < instances; ++s) {
        auto box = build_box(2, 2);
        const auto c = sample_config(box, 0.4 + 0.1 * (s % 5), derive_seed(101, static_cast<std::uint64_t>(s)));
        const std::int64_t cap = 1 + s % max_cap;
        const auto exact = profile_bruteforce(c, box->origin(), cap, {25, 25});
        const auto heur = profile_anneal(c, box->origin(), cap, {}, restarts, static_cast<std::uint64_t>(s));
        agree += heur.value == exact.value;
    }
    o.detail << agree << "/" << instances << " instances equal";
    o.require(agree == instances, "every instance equal");
}

void exact_case(const Context& cx, Outcome& o) {
    for (int n : cx.th.integers("exact.n_list")) {
        auto box = build_box(2, 2 * n);
        const auto r = profile(sample_config(box, 1.0, 1), box->origin(), n);
        int lo0 = n, hi0 = -n, lo1 = n, hi1 = -n;
        for (VertexId v : r.witness) {
            lo0 = std::min(lo0, box->coord(v, 0));
            hi0 = std::max(hi0, box->coord(v, 0));
            lo1 = std::min(lo1, box->coord(v, 1));
            hi1 = std::max(hi1, box->coord(v, 1));
        }
        const bool square = static_cast<int>(r.witness.size()) == n * n && hi0 - lo0 == n - 1 && hi1 - lo1 == n - 1;
        o.detail << "n=" << n << ": " << r.scaled().str() << (square ? " square " : " non-square ");
        o.require(r.scaled() == Ratio(4, 1), "n*phi = 4 at n=" + std::to_string(n));
        o.require(square, "square witness at n=" + std::to_string(n));
    }
}

void zero_characterization(const Context& cx, Outcome& o) {
    const int instances = cx.th.integer("zero.instances");
    const int radius = cx.th.integer("zero.radius");
    const int n = cx.th.integer("zero.n");
    int zeros = 0, mismatches = 0;
    for (int s = 0; s < instances; ++s) {
        const double p = std::array{0.2, 0.5, 0.8}[static_cast<std::size_t>(s % 3)];
        auto box = build_box(2, radius);
        const auto c = sample_config(box, p, derive_seed(303, static_cast<std::uint64_t>(s)));
        const auto r = profile(c, box->origin(), n);
        const auto cl = open_cluster(c, box->origin());
        const bool fits = static_cast<std::int64_t>(cl.size()) <= checked_power(n, 2);
        const bool ok = r.value.is_zero() == fits && (!fits || r.witness == cl.vertices);
        mismatches += !ok;
        zeros += r.value.is_zero();
    }
    o.detail << zeros << " zeros, " << mismatches << " mismatches over " << instances;
    o.require(mismatches == 0, "zero <=> |C(0)| <= n^d");
}

void exploration_inequalities(const Context& cx, Outcome& o) {
    const int instances = cx.th.integer("explore.instances");
    const int radius = cx.th.integer("explore.radius");
    std::int64_t steps = 0, bad = 0;
    int terminal_bad = 0;
    for (int s = 0; s < instances; ++s) {
        const double p = std::array{0.3, 0.5, 0.7}[static_cast<std::size_t>(s % 3)];
        auto box = build_box(2, radius);
        const auto c = sample_config(box, p, derive_seed(404, static_cast<std::uint64_t>(s)));
        const auto h = explore_until_halt(c, box->origin(), std::nullopt, std::nullopt, true);
        std::vector<VertexId> cur = h.seeds;
        for (std::int64_t l = 0; l < h.last_step(); ++l) {
            const auto& shell = (*h.shells)[static_cast<std::size_t>(l)];
            bool disjoint = true;
            for (VertexId v : shell) disjoint = disjoint && !std::binary_search(cur.begin(), cur.end(), v);
            const auto& st = h.steps[static_cast<std::size_t>(l)];
            const auto& nx = h.steps[static_cast<std::size_t>(l + 1)];
            const bool sizes = nx.cluster_size == st.cluster_size + static_cast<std::int64_t>(shell.size());
            const bool counting = open_edge_boundary_size(c, cur) <= 2 * 2 * static_cast<std::int64_t>(shell.size());
            bad += !(disjoint && sizes && counting);
            ++steps;
            cur = h.cluster_at(l + 1);
        }
        const int n = 4 + s % 9;
        terminal_bad += explore_until_halt(c, box->origin(), n).terminal != open_cluster(c, box->origin(), n).vertices;
    }
    o.detail << steps << " steps checked, " << bad << " violations, " << terminal_bad << " terminal mismatches";
    o.require(bad == 0, "step inequalities");
    o.require(terminal_bad == 0, "constrained terminal set = sub-box BFS cluster");
}

void critical_trend(const Context& cx, Outcome& o) {
    const auto res = run_campaign(cx.campaign("critical.config"));
    const auto& rows = res.summary.critical;
    for (const auto& r : rows) {
        o.detail << "n=" << r.n << " zero=" << fmt(r.zero_fraction) << " median=" << fmt(r.median)
                 << " trunc=" << r.truncated << "; ";
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        o.require(rows[i].zero_fraction > rows[i - 1].zero_fraction, "zero fraction increasing");
        o.require(rows[i].median <= rows[i - 1].median, "median non-increasing");
    }
}

void supercritical_trend(const Context& cx, Outcome& o) {
    const auto res = run_campaign(cx.campaign("super.config"));
    const auto& rows = res.summary.supercritical;
    for (const auto& r : rows) {
        o.detail << "n=" << r.n << " pos.median=" << fmt(r.positive_median) << " zero=" << fmt(r.zero_mass)
                 << " z=" << fmt(r.zero_mass_z) << "; ";
    }
    o.detail << "theta=" << fmt(rows.back().theta_hat);
    const std::size_t k = rows.size();
    const double change = rel(rows[k - 1].positive_median, rows[k - 2].positive_median);
    o.detail << " change=" << fmt(change);
    o.require(change < cx.th.real("super.max_relative_change"), "positive median stabilizes");
    o.require(std::abs(rows.back().zero_mass_z) <= cx.th.real("super.sigmas"), "zero mass vs 1 - theta");
}

void wulff_exactness(const Context& cx, Outcome& o) {
    const int dirs = cx.th.integer("wulff.directions");
    const double tol = cx.th.real("wulff.exact_tolerance");
    for (int d : {2, 3}) {
        const NormTable l1 = named_norm("l1", d, d == 2 ? dirs : 200);
        const Polytope w = wulff_set(l1, d == 2 ? dirs : 200);
        o.detail << "l1 d=" << d << " vol=" << fmt(volume(w)) << "; ";
        o.require(rel(volume(w), std::pow(2.0, d)) <= tol, "l1 volume d=" + std::to_string(d));
        if (d == 2) o.require(rel(surface_tension(w, l1), 8.0) <= tol, "l1 tension");
    }
    const NormTable l2 = named_norm("l2", 2, dirs);
    const Polytope disc = wulff_set(l2, dirs);
    const double v = volume(disc), t = surface_tension(disc, l2);
    o.detail << "disc vol=" << fmt(v) << " tension=" << fmt(t);
    o.require(rel(v, std::numbers::pi) <= cx.th.real("wulff.disc_volume_tolerance"), "disc volume");
    o.require(rel(t, 2 * std::numbers::pi) <= cx.th.real("wulff.disc_tension_tolerance"), "disc tension");
}

void wulff_optimality(const Context& cx, Outcome& o) {
    const int dirs = cx.th.integer("wulff.directions");
    Rng rng(808);
    std::vector<Polytope> candidates{cube(2), ball_approximation(2, dirs)};
    for (int k = 0; k < cx.th.integer("wulff.random_polytopes"); ++k) {
        candidates.push_back(random_symmetric_polytope(2, 1 + k % 5, rng));
    }
    for (const auto& name : cx.th.words("wulff.norms")) {
        const auto rep = isoperimetric_check(named_norm(name, 2, dirs), candidates, cx.th.real("wulff.slack"), dirs);
        const double best = *std::min_element(rep.candidate_tensions.begin(), rep.candidate_tensions.end());
        o.detail << name << ": W=" << fmt(rep.wulff_tension) << " best=" << fmt(best) << "; ";
        o.require(rep.wulff_is_minimal, name + " Wulff minimal");
    }
}

void flow_constant(const Context& cx, Outcome& o) {
    const FlowCylinder cyl{2, 0, cx.th.integer("flow.side"), cx.th.integer("flow.length")};
    const int trials = cx.th.integer("flow.trials");
    const auto one = estimate_flow_constant(1.0, cyl, 2, 1);
    const auto zero = estimate_flow_constant(0.0, cyl, 2, 1);
    o.require(one.mean_flow_per_area == 1.0, "beta(1) = 1");
    o.require(zero.mean_flow_per_area == 0.0, "beta(0) = 0");
    std::vector<double> betas;
    bool certified = one.all_certified && zero.all_certified;
    for (double p : cx.th.reals("flow.p_list")) {
        const auto e = estimate_flow_constant(p, cyl, trials, 909);
        betas.push_back(e.mean_flow_per_area);
        certified = certified && e.all_certified;
    }
    o.detail << "beta = " << join(betas);
    for (std::size_t i = 1; i < betas.size(); ++i) o.require(betas[i] > betas[i - 1], "beta increasing");
    o.require(betas.front() < cx.th.real("flow.low_max"), "beta near p_c small");
    o.require(certified, "max-flow = min-cut on every trial");
}

void vanishing_scan_trend(const Context& cx, Outcome& o) {
    ScanSettings s;
    s.side = cx.th.integer("scan.side");
    s.length = cx.th.integer("scan.length");
    s.flow_trials = cx.th.integer("scan.flow_trials");
    s.theta_n = cx.th.integer("scan.theta_n");
    s.theta_trials = cx.th.integer("scan.theta_trials");
    s.seed = 1010;
    const auto rows = vanishing_scan(cx.th.reals("scan.p_list"), s);
    std::vector<double> phi;
    for (const auto& r : rows) {
        phi.push_back(r.phi_hat);
        o.detail << "p=" << r.p << " beta=" << fmt(r.beta_hat) << " theta=" << fmt(r.theta_hat) << " phi="
                 << fmt(r.phi_hat) << "; ";
        o.require(!r.flagged, "theta positive at p=" + fmt(r.p));
        o.require(r.certified, "flows certified");
    }
    for (std::size_t i = 1; i < phi.size(); ++i) o.require(phi[i] < phi[i - 1], "phi strictly decreasing");
}

void face_bounds(const Context& cx, Outcome& o) {
    const auto faces = run_campaign(cx.campaign("faces.config")).summary;
    const double sigmas = cx.th.real("faces.sigmas");
    for (const auto& m : faces.markov) {
        o.detail << "t=" << m.t << " tail=" << fmt(m.tail) << " E/t=" << fmt(m.markov_bound) << "; ";
        o.require(m.margin >= -sigmas, "Markov at t=" + fmt(m.t));
    }
    for (const auto& f : faces.faces) o.require(f.bound_holds, "X_n <= (2n+1)^(d-1)");
    const auto probe = run_campaign(cx.campaign("faces.probe_config")).summary.probe;
    std::vector<double> probs;
    for (const auto& r : probe) probs.push_back(r.probability);
    o.detail << "probe = " << join(probs);
    for (std::size_t i = 1; i < probs.size(); ++i) o.require(probs[i] < probs[i - 1], "probe decreasing");
}

void determinism(const Context& cx, Outcome& o) {
    const int trials = cx.th.integer("determinism.trials");
    for (const char* key : {"critical.config", "super.config", "faces.config", "faces.probe_config"}) {
        auto cfg = cx.campaign(key);
        cfg.trials = trials;
        std::string first;
        for (int w : cx.th.integers("determinism.workers")) {
            std::ostringstream out;
            write_records(out, run_records(cfg, w));
            if (first.empty()) first = out.str();
            o.require(out.str() == first, cfg.experiment_id() + " with " + std::to_string(w) + " workers");
        }
        std::ostringstream again;
        write_records(again, run_records(cfg, 1));
        o.require(again.str() == first, cfg.experiment_id() + " rerun");
        o.detail << cfg.experiment_id() << " " << first.size() << " bytes; ";
    }
}

struct Criterion {
    int id;
    const char* name;
    const char* seconds_key;  // runtime limit, may be empty
    std::function<void(const Context&, Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    po::options_description cli("acceptance");
    cli.add_options()("help", "show options")("thresholds", po::value<std::string>()->required(), "thresholds file")(
        "configs", po::value<std::string>()->required(), "directory of campaign configs")(
        "only", po::value<std::vector<int>>()->multitoken(), "criteria to run");
    po::variables_map args;
    try {
        po::store(po::parse_command_line(argc, argv, cli), args);
        if (args.count("help")) {
            std::cout << cli;
            return 0;
        }
        po::notify(args);
    } catch (const po::error& e) {
        std::cerr << e.what() << "\n" << cli;
        return 2;
    }

    po::options_description keys;
    for (const char* k : kKeys) keys.add_options()(k, po::value<std::string>());
    po::variables_map vm;
    try {
        std::ifstream in(args["thresholds"].as<std::string>());
        if (!in) throw ConfigError("cannot open thresholds file");
        po::store(po::parse_config_file(in, keys), vm);
        po::notify(vm);
    } catch (const std::exception& e) {
        std::cerr << "thresholds: " << e.what() << "\n";
        return 2;
    }
    const Context cx{Thresholds(vm), args["configs"].as<std::string>()};

    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", "oracle.seconds", oracle_equivalence},
        {2, "exact full-lattice case", "", exact_case},
        {3, "zero characterization", "", zero_characterization},
        {4, "exploration inequalities", "", exploration_inequalities},
        {5, "critical vanishing trend", "critical.seconds", critical_trend},
        {6, "supercritical stabilization", "super.seconds", supercritical_trend},
        {7, "Wulff geometry exactness", "", wulff_exactness},
        {8, "Wulff optimality", "", wulff_optimality},
        {9, "flow constant", "flow.seconds", flow_constant},
        {10, "vanishing scan", "scan.seconds", vanishing_scan_trend},
        {11, "half-space and face bounds", "faces.seconds", face_bounds},
        {12, "determinism", "", determinism},
    };
    std::set<int> only;
    if (args.count("only")) {
        const auto& v = args["only"].as<std::vector<int>>();
        only.insert(v.begin(), v.end());
    }

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(cx, o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (*c.seconds_key) {
            const double limit = cx.th.real(c.seconds_key);
            o.require(secs <= limit, "runtime " + fmt(secs) + " s > " + fmt(limit) + " s");
        }
        failed += !o.pass;
        std::cout << "criterion " << c.id << " (" << c.name << "): " << (o.pass ? "PASS" : "FAIL") << "  "
                  << o.detail.str() << "  [" << std::fixed << std::setprecision(1) << secs << " s]"
                  << std::defaultfloat << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
