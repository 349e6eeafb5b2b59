#include "perclab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <boost/program_options.hpp>

#include "perclab/cluster.hpp"
#include "perclab/errors.hpp"
#include "perclab/exploration.hpp"
#include "perclab/lattice.hpp"
#include "perclab/rng.hpp"

namespace po = boost::program_options;

namespace perclab {

namespace {

constexpr std::uint64_t kThetaTag = 0x7468657461ULL;

const std::map<ExperimentKind, std::string>& kind_names() {
    static const std::map<ExperimentKind, std::string> names{
        {ExperimentKind::critical_profile, "critical_profile"},
        {ExperimentKind::supercritical_scan, "supercritical_scan"},
        {ExperimentKind::face_bound, "face_bound"},
        {ExperimentKind::halfspace_probe, "halfspace_probe"},
    };
    return names;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
    const std::string text = trim(raw);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("bad value for '" + key + "': '" + raw + "'");
    }
    return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& raw) {
    std::vector<T> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, item));
    if (out.empty()) throw ConfigError("empty list for '" + key + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string t = trim(raw);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw ConfigError("bad value for '" + key + "': '" + raw + "'");
}

std::string fmt(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

template <typename T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_floating_point_v<T>) {
            out += fmt(xs[i]);
        } else {
            out += std::to_string(xs[i]);
        }
    }
    return out;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "kind",      "id",        "d",         "p",          "p_critical",    "n_list",  "radius_factor",
        "radius_offset", "trials", "master_seed", "restarts", "sweeps",       "min_moves", "t_start",
        "t_end",     "max_cluster", "max_cap", "theta_n",    "thresholds",    "cert_c",  "cert_n0",
        "workers",   "record_timing", "records", "summary",
    };
    return keys;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

std::string to_string(ExperimentKind k) { return kind_names().at(k); }

ExperimentKind parse_kind(const std::string& text) {
    for (const auto& [k, name] : kind_names()) {
        if (name == text) return k;
    }
    throw ConfigError("unknown experiment kind '" + text + "'");
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
    po::options_description desc;
    for (const auto& k : config_keys()) desc.add_options()(k.c_str(), po::value<std::string>());
    po::variables_map vm;
    try {
        po::store(po::parse_config_file(in, desc, false), vm);
    } catch (const po::error& e) {
        throw ConfigError(e.what());
    }
    ExperimentConfig c;
    auto has = [&](const char* k) { return vm.count(k) > 0; };
    auto get = [&](const char* k) { return vm[k].as<std::string>(); };

    if (!has("kind")) throw ConfigError("missing key 'kind'");
    c.kind = parse_kind(trim(get("kind")));
    if (has("id")) c.id = trim(get("id"));
    if (has("d")) c.dimension = parse_number<int>("d", get("d"));
    if (has("p")) c.p = parse_number<double>("p", get("p"));
    if (has("p_critical")) c.p_critical = parse_number<double>("p_critical", get("p_critical"));
    if (!has("n_list")) throw ConfigError("missing key 'n_list'");
    c.n_list = parse_list<int>("n_list", get("n_list"));
    if (has("radius_factor")) c.radius_factor = parse_number<int>("radius_factor", get("radius_factor"));
    if (has("radius_offset")) c.radius_offset = parse_number<int>("radius_offset", get("radius_offset"));
    if (has("trials")) c.trials = parse_number<int>("trials", get("trials"));
    if (has("master_seed")) c.master_seed = parse_number<std::uint64_t>("master_seed", get("master_seed"));
    if (has("restarts")) c.restarts = parse_number<int>("restarts", get("restarts"));
    if (has("sweeps")) c.sweeps = parse_number<std::int64_t>("sweeps", get("sweeps"));
    if (has("min_moves")) c.min_moves = parse_number<std::int64_t>("min_moves", get("min_moves"));
    if (has("t_start")) c.t_start = parse_number<double>("t_start", get("t_start"));
    if (has("t_end")) c.t_end = parse_number<double>("t_end", get("t_end"));
    if (has("max_cluster")) c.max_cluster = parse_number<std::int64_t>("max_cluster", get("max_cluster"));
    if (has("max_cap")) c.max_cap = parse_number<std::int64_t>("max_cap", get("max_cap"));
    if (has("theta_n")) c.theta_n = parse_number<int>("theta_n", get("theta_n"));
    if (has("thresholds")) c.thresholds = parse_list<double>("thresholds", get("thresholds"));
    if (has("cert_c")) c.cert_c = parse_number<double>("cert_c", get("cert_c"));
    if (has("cert_n0")) c.cert_n0 = parse_number<int>("cert_n0", get("cert_n0"));
    if (has("workers")) c.workers = parse_number<int>("workers", get("workers"));
    if (has("record_timing")) c.record_timing = parse_bool("record_timing", get("record_timing"));
    if (has("records")) c.records_path = trim(get("records"));
    if (has("summary")) c.summary_path = trim(get("summary"));
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse(in);
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream out;
    out << "kind = " << to_string(kind) << "\n";
    if (!id.empty()) out << "id = " << id << "\n";
    out << "d = " << dimension << "\n";
    if (p) out << "p = " << fmt(*p) << "\n";
    out << "p_critical = " << fmt(p_critical) << "\n";
    out << "n_list = " << join(n_list) << "\n";
    out << "radius_factor = " << radius_factor << "\n";
    out << "radius_offset = " << radius_offset << "\n";
    out << "trials = " << trials << "\n";
    out << "master_seed = " << master_seed << "\n";
    out << "restarts = " << restarts << "\n";
    out << "sweeps = " << sweeps << "\n";
    out << "min_moves = " << min_moves << "\n";
    out << "t_start = " << fmt(t_start) << "\n";
    out << "t_end = " << fmt(t_end) << "\n";
    out << "max_cluster = " << max_cluster << "\n";
    out << "max_cap = " << max_cap << "\n";
    out << "theta_n = " << theta_n << "\n";
    if (!thresholds.empty()) out << "thresholds = " << join(thresholds) << "\n";
    out << "cert_c = " << fmt(cert_c) << "\n";
    out << "cert_n0 = " << cert_n0 << "\n";
    out << "workers = " << workers << "\n";
    out << "record_timing = " << (record_timing ? "true" : "false") << "\n";
    if (!records_path.empty()) out << "records = " << records_path << "\n";
    if (!summary_path.empty()) out << "summary = " << summary_path << "\n";
    return out.str();
}

double ExperimentConfig::effective_p() const {
    if (p) return *p;
    if (kind == ExperimentKind::supercritical_scan) throw ConfigError("supercritical_scan needs 'p'");
    return p_critical;
}

int ExperimentConfig::radius_for(int n) const { return radius_factor * n + radius_offset; }

ProfileOptions ExperimentConfig::profile_options() const {
    ProfileOptions o;
    o.budget = {max_cluster, max_cap};
    o.schedule = {t_start, t_end, sweeps, min_moves};
    o.restarts = restarts;
    return o;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (dimension < 1 || dimension > kMaxDimension) fail("d must lie in [1, 8]");
    if (!(p_critical > 0.0 && p_critical < 1.0)) fail("p_critical must lie in (0, 1)");
    const double pe = effective_p();
    if (!(pe >= 0.0 && pe <= 1.0)) fail("p must lie in [0, 1]");
    if (kind == ExperimentKind::supercritical_scan && !(pe > p_critical)) fail("supercritical_scan needs p > p_critical");
    if (n_list.empty()) fail("n_list is empty");
    if (trials < 1) fail("trials must be >= 1");
    if (restarts < 1) fail("restarts must be >= 1");
    if (sweeps < 0 || min_moves < 0) fail("sweeps and min_moves must be >= 0");
    if (!(t_end > 0.0 && t_start >= t_end)) fail("need t_start >= t_end > 0");
    if (max_cluster < 0 || max_cap < 0) fail("enumeration budget must be >= 0");
    if (theta_n < 1) fail("theta_n must be >= 1");
    if (workers < 0) fail("workers must be >= 0");
    if (cert_c < 0.0 || cert_n0 < 1) fail("need cert_c >= 0 and cert_n0 >= 1");
    const bool needs_cover = kind == ExperimentKind::face_bound || kind == ExperimentKind::halfspace_probe;
    for (int n : n_list) {
        if (n < 1) fail("n_list entries must be >= 1");
        const int r = radius_for(n);
        if (r < 1) fail("simulation radius must be >= 1 for n = " + std::to_string(n));
        if (needs_cover && r < n) fail("simulation radius must be >= n for n = " + std::to_string(n));
        try {
            build_box(dimension, r);
            if (kind == ExperimentKind::critical_profile || kind == ExperimentKind::supercritical_scan) {
                checked_power(n, dimension);
            }
        } catch (const std::exception& e) {
            fail(std::string("n = ") + std::to_string(n) + ": " + e.what());
        }
    }
    if (kind == ExperimentKind::supercritical_scan) {
        try {
            build_box(dimension, theta_n);
        } catch (const std::exception& e) {
            fail(std::string("theta_n: ") + e.what());
        }
    }
    if (kind == ExperimentKind::face_bound) {
        if (thresholds.empty()) fail("face_bound needs 'thresholds'");
        for (double t : thresholds) {
            if (!(t > 0.0)) fail("thresholds must be > 0");
        }
    }
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial) {
    return derive_seed(cfg.master_seed, static_cast<std::uint64_t>(trial));
}

bool halfspace_reaches(const BondConfig& config, int n) {
    const BoxLattice& box = config.lattice();
    if (n < 1 || n > box.radius()) throw DomainError("probe radius must lie in [1, R]");
    const int d = box.dimension();
    auto inside = [&](VertexId v) {
        if (box.coord(v, 0) < 0) return false;
        return box.within(v, n);
    };
    std::vector<VertexId> stack{box.origin()};
    std::vector<char> seen(static_cast<std::size_t>(box.vertex_count()), 0);
    seen[static_cast<std::size_t>(box.origin())] = 1;
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        if (box.sup_norm(v) >= n) return true;
        for (int a = 0; a < d; ++a) {
            for (int dir : {-1, 1}) {
                if (!config.is_open(v, a, dir)) continue;
                const VertexId w = box.neighbor(v, a, dir);
                if (w == kNoVertex || seen[static_cast<std::size_t>(w)] || !inside(w)) continue;
                seen[static_cast<std::size_t>(w)] = 1;
                stack.push_back(w);
            }
        }
    }
    return false;
}

Record run_trial(const ExperimentConfig& cfg, int trial) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed = trial_seed(cfg, trial);
    const double p = cfg.effective_p();
    Record rec;
    rec["experiment"] = cfg.experiment_id();
    rec["kind"] = to_string(cfg.kind);
    rec["trial"] = trial;
    rec["seed"] = seed;
    rec["inputs"] = {{"d", cfg.dimension}, {"p", p}};
    Record results = Record::array();

    for (int n : cfg.n_list) {
        const int radius = cfg.radius_for(n);
        const auto box = build_box(cfg.dimension, radius);
        const BondConfig config = sample_config(box, p, seed);
        Record r{{"n", n}, {"radius", radius}};
        switch (cfg.kind) {
        case ExperimentKind::critical_profile:
        case ExperimentKind::supercritical_scan: {
            const ProfileResult pr = profile(config, box->origin(), n, cfg.profile_options());
            r["value"] = pr.value.str();
            r["scaled"] = pr.scaled().str();
            r["mode"] = to_string(pr.mode);
            r["cluster_size"] = pr.cluster_size;
            r["truncated"] = pr.truncated;
            r["zero"] = pr.value.is_zero();
            if (cfg.kind == ExperimentKind::supercritical_scan) {
                const Cluster c = open_cluster(config, box->origin());
                r["proxy_boundary"] = satisfies_proxy(config, c, ConditioningProxy::touches_boundary);
                r["proxy_largest"] = satisfies_proxy(config, c, ConditioningProxy::largest_cluster);
            } else if (cfg.cert_c > 0.0) {
                const ExplorationHistory h = explore_until_halt(config, box->origin());
                const GrowthCertificate g = growth_certificate(h, cfg.cert_c, cfg.cert_n0);
                r["certificate"] = {{"holds", g.all_hold()},
                                    {"checked", g.verified_range.size()},
                                    {"violations", g.implication_violations}};
            }
            break;
        }
        case ExperimentKind::face_bound: {
            Record counts = Record::array();
            std::int64_t x = 0;
            for (const FaceCount& fc : face_connection_counts(config, n)) {
                counts.push_back(fc.count);
                if (fc.face == Face{0, +1}) x = fc.count;
            }
            r["faces"] = counts;
            r["x"] = x;
            break;
        }
        case ExperimentKind::halfspace_probe:
            r["hit"] = halfspace_reaches(config, n);
            break;
        }
        results.push_back(std::move(r));
    }
    rec["results"] = std::move(results);

    if (cfg.kind == ExperimentKind::supercritical_scan) {
        // independent sample for the theta proxy
        const auto box = build_box(cfg.dimension, cfg.theta_n);
        const BondConfig config = sample_config(box, p, hash_combine(seed, kThetaTag));
        rec["theta_hit"] = open_cluster(config, box->origin()).touches_box_boundary;
    }
    if (cfg.record_timing) rec["wall_ms"] = elapsed_ms(start);
    return rec;
}

int resolve_workers(const ExperimentConfig& cfg) {
    int w = cfg.workers;
    if (const char* env = std::getenv("PERCLAB_WORKERS")) {
        const std::string text = env;
        int v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size() || v < 1) {
            throw ConfigError("PERCLAB_WORKERS must be a positive integer");
        }
        w = v;
    }
    if (w == 0) w = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    return std::clamp(w, 1, cfg.trials);
}

std::vector<Record> run_records(const ExperimentConfig& cfg, int workers) {
    cfg.validate();
    if (workers < 1) throw DomainError("workers must be >= 1");
    std::vector<Record> out(static_cast<std::size_t>(cfg.trials));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= cfg.trials) return;
            try {
                out[static_cast<std::size_t>(t)] = run_trial(cfg, t);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = cfg.trials;
                return;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

void write_records(std::ostream& out, const std::vector<Record>& records) {
    for (const Record& r : records) out << r.dump() << "\n";
}

std::vector<Record> read_records(std::istream& in) {
    std::vector<Record> out;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        try {
            out.push_back(Record::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("malformed record: ") + e.what());
        }
    }
    return out;
}

double order_quantile(std::vector<double> values, double q) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (!(q > 0.0 && q <= 1.0)) throw DomainError("quantile must lie in (0, 1]");
    std::sort(values.begin(), values.end());
    const auto m = static_cast<double>(values.size());
    const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(q * m - 1e-12)));
    return values[rank - 1];
}

namespace {

const Record& result_for(const Record& rec, int n) {
    for (const Record& r : rec.at("results")) {
        if (r.at("n").get<int>() == n) return r;
    }
    throw ConfigError("record " + std::to_string(rec.at("trial").get<int>()) + " has no result for n = " +
                      std::to_string(n));
}

double bernoulli_se(double p, int m) { return std::sqrt(p * (1.0 - p) / m); }

}  // namespace

Summary summarize(const ExperimentConfig& cfg, const std::vector<Record>& records) {
    Summary s;
    s.kind = cfg.kind;
    if (records.empty()) return s;
    const int m = static_cast<int>(records.size());

    for (int n : cfg.n_list) {
        switch (cfg.kind) {
        case ExperimentKind::critical_profile: {
            CriticalRow row{n, m};
            std::vector<double> scaled;
            for (const Record& rec : records) {
                const Record& r = result_for(rec, n);
                scaled.push_back(Ratio::parse(r.at("scaled")).to_double());
                row.zeros += r.at("zero").get<bool>();
                row.truncated += r.at("truncated").get<bool>();
                row.exact += r.at("mode") == "exact";
                if (r.contains("certificate")) {
                    ++row.certificates;
                    row.certificate_holds += r["certificate"].at("holds").get<bool>();
                    row.certificate_violations += r["certificate"].at("violations").get<std::int64_t>();
                }
            }
            row.zero_fraction = static_cast<double>(row.zeros) / m;
            row.median = order_quantile(scaled, 0.5);
            row.q90 = order_quantile(scaled, 0.9);
            s.critical.push_back(row);
            break;
        }
        case ExperimentKind::supercritical_scan: {
            SupercriticalRow row{n, m};
            std::vector<double> positive;
            int theta_hits = 0;
            for (const Record& rec : records) {
                const Record& r = result_for(rec, n);
                if (r.at("zero").get<bool>()) {
                    ++row.zeros;
                } else {
                    positive.push_back(Ratio::parse(r.at("scaled")).to_double());
                }
                row.truncated += r.at("truncated").get<bool>();
                row.proxy_boundary += r.at("proxy_boundary").get<bool>();
                row.proxy_largest += r.at("proxy_largest").get<bool>();
                theta_hits += rec.at("theta_hit").get<bool>();
            }
            row.zero_mass = static_cast<double>(row.zeros) / m;
            row.zero_mass_stderr = bernoulli_se(row.zero_mass, m);
            row.positive_median = order_quantile(positive, 0.5);
            row.theta_hat = static_cast<double>(theta_hits) / m;
            row.theta_stderr = bernoulli_se(row.theta_hat, m);
            const double se = std::hypot(row.zero_mass_stderr, row.theta_stderr);
            const double diff = row.zero_mass - (1.0 - row.theta_hat);
            row.zero_mass_z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
            s.supercritical.push_back(row);
            break;
        }
        case ExperimentKind::face_bound: {
            FaceRow row{n, m};
            row.face_bound = checked_power(2 * n + 1, cfg.dimension - 1);
            std::vector<double> xs;
            std::vector<std::int64_t> worst;
            for (const Record& rec : records) {
                const Record& r = result_for(rec, n);
                const auto x = r.at("x").get<std::int64_t>();
                xs.push_back(static_cast<double>(x));
                std::int64_t w = 0;
                for (const auto& c : r.at("faces")) {
                    const auto v = c.get<std::int64_t>();
                    w = std::max(w, v);
                    if (v > row.face_bound) row.bound_holds = false;
                }
                worst.push_back(w);
                row.max_count = std::max(row.max_count, w);
            }
            double sum = 0.0, sq = 0.0;
            for (double x : xs) sum += x;
            row.mean = sum / m;
            for (double x : xs) sq += (x - row.mean) * (x - row.mean);
            row.stderr_mean = m > 1 ? std::sqrt(sq / (m - 1) / m) : 0.0;
            s.faces.push_back(row);

            for (double t : cfg.thresholds) {
                MarkovRow mk{n, t};
                int above = 0, any = 0;
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    above += xs[i] > t;
                    any += static_cast<double>(worst[i]) > t;
                }
                mk.tail = static_cast<double>(above) / m;
                mk.markov_bound = row.mean / t;
                mk.stderr_diff = std::hypot(bernoulli_se(mk.tail, m), row.stderr_mean / t);
                const double gap = mk.markov_bound - mk.tail;
                mk.margin = mk.stderr_diff > 0.0 ? gap / mk.stderr_diff
                                                 : (gap >= 0.0 ? INFINITY : -INFINITY);
                mk.any_face_tail = static_cast<double>(any) / m;
                mk.union_bound = 2.0 * cfg.dimension * mk.tail;
                s.markov.push_back(mk);
            }
            break;
        }
        case ExperimentKind::halfspace_probe: {
            ProbeRow row{n, m};
            for (const Record& rec : records) row.hits += result_for(rec, n).at("hit").get<bool>();
            row.probability = static_cast<double>(row.hits) / m;
            row.stderr_prob = bernoulli_se(row.probability, m);
            s.probe.push_back(row);
            break;
        }
        }
    }
    return s;
}

void write_summary_csv(std::ostream& out, const Summary& s) {
    out << std::setprecision(10);
    switch (s.kind) {
    case ExperimentKind::critical_profile:
        out << "n,trials,zeros,zero_fraction,median,q90,truncated,exact,certificates,certificate_holds,"
               "certificate_violations\n";
        for (const auto& r : s.critical) {
            out << r.n << ',' << r.trials << ',' << r.zeros << ',' << r.zero_fraction << ',' << r.median << ','
                << r.q90 << ',' << r.truncated << ',' << r.exact << ',' << r.certificates << ','
                << r.certificate_holds << ',' << r.certificate_violations << "\n";
        }
        break;
    case ExperimentKind::supercritical_scan:
        out << "n,trials,zeros,zero_mass,zero_mass_stderr,positive_median,theta_hat,theta_stderr,zero_mass_z,"
               "truncated,proxy_boundary,proxy_largest\n";
        for (const auto& r : s.supercritical) {
            out << r.n << ',' << r.trials << ',' << r.zeros << ',' << r.zero_mass << ',' << r.zero_mass_stderr << ','
                << r.positive_median << ',' << r.theta_hat << ',' << r.theta_stderr << ',' << r.zero_mass_z << ','
                << r.truncated << ',' << r.proxy_boundary << ',' << r.proxy_largest << "\n";
        }
        break;
    case ExperimentKind::face_bound:
        out << "n,t,trials,mean_x,stderr_mean,tail,markov_bound,margin,any_face_tail,union_bound,max_count,"
               "face_bound\n";
        for (const auto& f : s.faces) {
            for (const auto& mk : s.markov) {
                if (mk.n != f.n) continue;
                out << f.n << ',' << mk.t << ',' << f.trials << ',' << f.mean << ',' << f.stderr_mean << ','
                    << mk.tail << ',' << mk.markov_bound << ',' << mk.margin << ',' << mk.any_face_tail << ','
                    << mk.union_bound << ',' << f.max_count << ',' << f.face_bound << "\n";
            }
        }
        break;
    case ExperimentKind::halfspace_probe:
        out << "n,trials,hits,probability,stderr\n";
        for (const auto& r : s.probe) {
            out << r.n << ',' << r.trials << ',' << r.hits << ',' << r.probability << ',' << r.stderr_prob << "\n";
        }
        break;
    }
}

nlohmann::json to_json(const Summary& s) {
    // NaN and infinities have no JSON form; they become null
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); };
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : s.critical) {
        rows.push_back({{"n", r.n}, {"trials", r.trials}, {"zeros", r.zeros}, {"zero_fraction", r.zero_fraction},
                        {"median", num(r.median)}, {"q90", num(r.q90)}, {"truncated", r.truncated},
                        {"exact", r.exact}, {"certificates", r.certificates},
                        {"certificate_holds", r.certificate_holds},
                        {"certificate_violations", r.certificate_violations}});
    }
    for (const auto& r : s.supercritical) {
        rows.push_back({{"n", r.n}, {"trials", r.trials}, {"zeros", r.zeros}, {"zero_mass", r.zero_mass},
                        {"zero_mass_stderr", r.zero_mass_stderr}, {"positive_median", num(r.positive_median)},
                        {"theta_hat", r.theta_hat}, {"theta_stderr", r.theta_stderr},
                        {"zero_mass_z", num(r.zero_mass_z)}, {"truncated", r.truncated},
                        {"proxy_boundary", r.proxy_boundary}, {"proxy_largest", r.proxy_largest}});
    }
    for (const auto& f : s.faces) {
        nlohmann::json tails = nlohmann::json::array();
        for (const auto& mk : s.markov) {
            if (mk.n != f.n) continue;
            tails.push_back({{"t", mk.t}, {"tail", mk.tail}, {"markov_bound", mk.markov_bound},
                             {"stderr_diff", mk.stderr_diff}, {"margin", num(mk.margin)},
                             {"any_face_tail", mk.any_face_tail}, {"union_bound", mk.union_bound}});
        }
        rows.push_back({{"n", f.n}, {"trials", f.trials}, {"mean_x", f.mean}, {"stderr_mean", f.stderr_mean},
                        {"max_count", f.max_count}, {"face_bound", f.face_bound}, {"bound_holds", f.bound_holds},
                        {"thresholds", tails}});
    }
    for (const auto& r : s.probe) {
        rows.push_back({{"n", r.n}, {"trials", r.trials}, {"hits", r.hits}, {"probability", r.probability},
                        {"stderr", r.stderr_prob}});
    }
    return {{"kind", to_string(s.kind)}, {"rows", rows}};
}

CampaignResult run_campaign(const ExperimentConfig& cfg) {
    cfg.validate();
    CampaignResult res;
    res.records = run_records(cfg, resolve_workers(cfg));
    res.summary = summarize(cfg, res.records);
    if (!cfg.records_path.empty()) {
        std::ofstream out(cfg.records_path);
        if (!out) throw ConfigError("cannot write records to '" + cfg.records_path + "'");
        write_records(out, res.records);
    }
    if (!cfg.summary_path.empty()) {
        std::ofstream out(cfg.summary_path);
        if (!out) throw ConfigError("cannot write summary to '" + cfg.summary_path + "'");
        write_summary_csv(out, res.summary);
    }
    return res;
}

namespace {

CampaignResult run_kind(const ExperimentConfig& cfg, ExperimentKind k) {
    if (cfg.kind != k) throw ConfigError("config kind is " + to_string(cfg.kind) + ", expected " + to_string(k));
    return run_campaign(cfg);
}

}  // namespace

CampaignResult run_critical_profile_campaign(const ExperimentConfig& cfg) {
    return run_kind(cfg, ExperimentKind::critical_profile);
}
CampaignResult run_supercritical_limit_scan(const ExperimentConfig& cfg) {
    return run_kind(cfg, ExperimentKind::supercritical_scan);
}
CampaignResult run_face_bound_check(const ExperimentConfig& cfg) { return run_kind(cfg, ExperimentKind::face_bound); }
CampaignResult run_halfspace_probe(const ExperimentConfig& cfg) {
    return run_kind(cfg, ExperimentKind::halfspace_probe);
}

}  // namespace perclab
