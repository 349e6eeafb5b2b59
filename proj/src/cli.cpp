#include "perclab/cli.hpp"

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "perclab/cluster.hpp"
#include "perclab/errors.hpp"
#include "perclab/exploration.hpp"
#include "perclab/harness.hpp"
#include "perclab/isoprofile.hpp"
#include "perclab/lattice.hpp"
#include "perclab/maxflow.hpp"
#include "perclab/norm.hpp"
#include "perclab/wulff.hpp"

namespace perclab {

namespace {

struct Globals {
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
};

// Writes to --out when given, otherwise to the command's stdout.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError("cannot write '" + path + "'");
        }
        os_ = path.empty() ? &fallback : &file_;
    }
    std::ostream& operator*() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

void print_json(std::ostream& os, const nlohmann::json& j) { os << j.dump(2) << "\n"; }

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"perclab: bond percolation profiles, exploration, Wulff crystals and campaigns"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "master seed")->capture_default_str();
    app.add_option("--out", g.out, "output path");
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    int d = 2, radius = 8, n = 2;
    double p = 0.5;

    auto* sample = app.add_subcommand("sample", "sample a configuration; --out receives the binary dump");
    sample->fallthrough();
    sample->add_option("--d", d)->capture_default_str();
    sample->add_option("--p", p)->capture_default_str();
    sample->add_option("--radius", radius)->capture_default_str();

    int restarts = 16;
    bool exact_only = false;
    auto* prof = app.add_subcommand("profile", "anchored isoperimetric profile at the origin");
    prof->fallthrough();
    prof->add_option("--d", d)->capture_default_str();
    prof->add_option("--p", p)->capture_default_str();
    prof->add_option("--n", n)->capture_default_str();
    prof->add_option("--radius", radius)->capture_default_str();
    prof->add_option("--restarts", restarts)->capture_default_str();
    prof->add_flag("--exact", exact_only, "refuse to fall back to annealing");

    std::optional<int> box;
    double cert_c = 0.0;
    int cert_n0 = 1;
    auto* expl = app.add_subcommand("explore", "exploration process from the origin");
    expl->fallthrough();
    expl->add_option("--d", d)->capture_default_str();
    expl->add_option("--p", p)->capture_default_str();
    expl->add_option("--radius", radius)->capture_default_str();
    expl->add_option("--box", box, "constrain to [-box, box]^d");
    expl->add_option("--cert-c", cert_c, "growth certificate constant c (0: off)");
    expl->add_option("--cert-n0", cert_n0)->capture_default_str();

    std::string norm_name = "l2";
    std::string table_path;
    int directions = kDefaultWulffDirections;
    double theta = 1.0;
    auto* wulff = app.add_subcommand("wulff", "Wulff crystal of a norm");
    wulff->fallthrough();
    wulff->add_option("--norm", norm_name)->check(CLI::IsMember({"l1", "linf", "l2", "elliptic"}))->capture_default_str();
    wulff->add_option("--table", table_path, "norm table file (overrides --norm)");
    wulff->add_option("--d", d)->capture_default_str();
    wulff->add_option("--directions", directions)->capture_default_str();
    wulff->add_option("--theta", theta, "also report I(W) at volume 1/theta")->capture_default_str();

    int side = 48, length = 48, trials = 100;
    auto* flow = app.add_subcommand("flow", "flow constant estimate in a cylinder");
    flow->fallthrough();
    flow->add_option("--d", d)->capture_default_str();
    flow->add_option("--p", p)->capture_default_str();
    flow->add_option("--side", side)->capture_default_str();
    flow->add_option("--length", length)->capture_default_str();
    flow->add_option("--trials", trials)->capture_default_str();

    std::string config_path;
    std::optional<int> workers;
    auto* expt = app.add_subcommand("experiment", "run a campaign from a config file");
    expt->fallthrough();
    expt->add_option("--config", config_path)->required();
    expt->add_option("--workers", workers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return 2;
    }

    try {
        if (*sample) {
            const auto lat = build_box(d, radius);
            const BondConfig c = sample_config(lat, p, g.seed);
            if (!g.out.empty()) save_config(g.out, c);
            const Cluster cl = open_cluster(c, lat->origin());
            if (g.format == "csv") {
                out << "d,radius,p,seed,vertices,edges,open_edges,origin_cluster\n"
                    << d << ',' << radius << ',' << p << ',' << g.seed << ',' << lat->vertex_count() << ','
                    << lat->edge_count() << ',' << c.open_edge_count() << ',' << cl.size() << "\n";
            } else {
                print_json(out, {{"d", d}, {"radius", radius}, {"p", p}, {"seed", g.seed},
                                 {"vertices", lat->vertex_count()}, {"edges", lat->edge_count()},
                                 {"open_edges", c.open_edge_count()}, {"origin_cluster", cl.size()},
                                 {"touches_box_boundary", cl.touches_box_boundary}});
            }
        } else if (*prof) {
            const auto lat = build_box(d, radius);
            const BondConfig c = sample_config(lat, p, g.seed);
            ProfileResult r;
            if (exact_only) {
                r = profile_bruteforce(c, lat->origin(), checked_power(n, d));
                r.n = n;
            } else {
                ProfileOptions o;
                o.restarts = restarts;
                r = profile(c, lat->origin(), n, o);
            }
            Sink s(g.out, out);
            if (g.format == "csv") {
                *s << "n,value,scaled,mode,cluster_size,witness_size,truncated\n"
                   << n << ',' << r.value.str() << ',' << r.scaled().str() << ',' << to_string(r.mode) << ','
                   << r.cluster_size << ',' << r.witness.size() << ',' << r.truncated << "\n";
            } else {
                print_json(*s, to_json(r));
            }
        } else if (*expl) {
            const auto lat = build_box(d, radius);
            const BondConfig c = sample_config(lat, p, g.seed);
            const ExplorationHistory h = explore_until_halt(c, lat->origin(), box);
            Sink s(g.out, out);
            if (g.format == "csv") {
                write_history_csv(*s, h);
            } else {
                nlohmann::json j{{"steps", h.steps.size()},
                                 {"halted", h.halted},
                                 {"terminal_size", h.terminal.size()},
                                 {"touches_box_boundary", h.touches_box_boundary}};
                nlohmann::json rows = nlohmann::json::array();
                for (const auto& st : h.steps) {
                    rows.push_back({st.cluster_size, st.shell_size, st.open_boundary});
                }
                j["history"] = rows;
                if (cert_c > 0.0) {
                    const GrowthCertificate gc = growth_certificate(h, cert_c, cert_n0);
                    j["certificate"] = {{"alpha", gc.alpha},
                                        {"k", gc.k},
                                        {"checked", gc.verified_range.size()},
                                        {"holds", gc.all_hold()},
                                        {"implication_violations", gc.implication_violations}};
                }
                print_json(*s, j);
            }
        } else if (*wulff) {
            std::optional<NormTable> table;
            if (!table_path.empty()) {
                std::ifstream in(table_path);
                if (!in) throw ConfigError("cannot open norm table '" + table_path + "'");
                table = read_norm_table(in, d);
            } else {
                table = named_norm(norm_name, d, directions);
            }
            const NormTable& norm = *table;
            const Polytope w = wulff_set(norm, directions);
            const double vol = volume(w);
            const double tension = surface_tension(w, norm);
            const PhiResult phi = phi_of_p(norm, theta, directions);
            Sink s(g.out, out);
            if (g.format == "csv") {
                *s << std::setprecision(12) << "volume,surface_tension,facets,phi\n"
                   << vol << ',' << tension << ',' << w.facets().size() << ',' << phi.value << "\n";
            } else {
                print_json(*s, {{"volume", vol},
                                {"surface_tension", tension},
                                {"facets", w.facets().size()},
                                {"theta", theta},
                                {"phi", phi.value}});
            }
        } else if (*flow) {
            const FlowEstimate e = estimate_flow_constant(p, FlowCylinder{d, 0, side, length}, trials, g.seed);
            Sink s(g.out, out);
            if (g.format == "csv") {
                *s << std::setprecision(12) << "p,side,length,trials,beta_hat,stderr,certified\n"
                   << p << ',' << side << ',' << length << ',' << trials << ',' << e.mean_flow_per_area << ','
                   << e.standard_error << ',' << e.all_certified << "\n";
            } else {
                print_json(*s, {{"p", p},
                                {"side", side},
                                {"length", length},
                                {"trials", trials},
                                {"beta_hat", e.mean_flow_per_area},
                                {"stderr", e.standard_error},
                                {"certified", e.all_certified},
                                {"flows", e.flows}});
            }
        } else if (*expt) {
            ExperimentConfig cfg = ExperimentConfig::load(config_path);
            if (!g.out.empty()) cfg.records_path = g.out;
            if (workers) cfg.workers = *workers;
            const CampaignResult res = run_campaign(cfg);
            if (g.format == "csv") {
                write_summary_csv(out, res.summary);
            } else {
                print_json(out, to_json(res.summary));
            }
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace perclab
