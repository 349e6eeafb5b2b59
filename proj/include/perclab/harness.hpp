#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "perclab/isoprofile.hpp"

namespace perclab {

enum class ExperimentKind { critical_profile, supercritical_scan, face_bound, halfspace_probe };

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& text);

// Flat "key = value" file; '#' starts a comment, lists are comma separated.
// Unknown keys, repeated keys and malformed values raise ConfigError.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::critical_profile;
    std::string id;  // defaults to the kind name
    int dimension = 2;
    std::optional<double> p;  // critical kinds fall back to p_critical
    double p_critical = 0.5;
    std::vector<int> n_list;
    int radius_factor = 4;  // simulation radius R = radius_factor * n + radius_offset
    int radius_offset = 0;
    int trials = 100;
    std::uint64_t master_seed = 1;

    // solver
    int restarts = 16;
    std::int64_t sweeps = 150;
    std::int64_t min_moves = 4000;
    double t_start = 1.5;
    double t_end = 0.05;
    std::int64_t max_cluster = 24;
    std::int64_t max_cap = 12;

    // supercritical: theta proxy box radius for the independent theta sample
    int theta_n = 32;
    // face_bound: thresholds t of P(X_n > t)
    std::vector<double> thresholds;
    // critical_profile: growth certificate replay, off when cert_c == 0
    double cert_c = 0.0;
    int cert_n0 = 1;

    int workers = 0;  // 0: hardware concurrency; PERCLAB_WORKERS overrides
    bool record_timing = false;
    std::string records_path;
    std::string summary_path;

    static ExperimentConfig parse(std::istream& in);
    static ExperimentConfig load(const std::string& path);
    std::string to_text() const;
    void validate() const;

    double effective_p() const;
    int radius_for(int n) const;
    ProfileOptions profile_options() const;
    std::string experiment_id() const { return id.empty() ? to_string(kind) : id; }

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

using Record = nlohmann::json;

// Seed of trial t; the same configuration seed serves every n of the trial.
std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial);

Record run_trial(const ExperimentConfig& cfg, int trial);

// All trials on a pool of `workers` threads; output is ordered by trial index.
std::vector<Record> run_records(const ExperimentConfig& cfg, int workers);
int resolve_workers(const ExperimentConfig& cfg);

void write_records(std::ostream& out, const std::vector<Record>& records);
std::vector<Record> read_records(std::istream& in);

struct CriticalRow {
    int n = 0;
    int trials = 0;
    int zeros = 0;
    int truncated = 0;
    int exact = 0;
    double zero_fraction = 0.0;
    double median = 0.0;
    double q90 = 0.0;
    int certificates = 0;  // trials with a growth certificate replay
    int certificate_holds = 0;
    std::int64_t certificate_violations = 0;
};

struct SupercriticalRow {
    int n = 0;
    int trials = 0;
    int zeros = 0;
    int truncated = 0;
    int proxy_boundary = 0;  // trials passing the touches_boundary proxy
    int proxy_largest = 0;   // trials passing the largest_cluster proxy
    double zero_mass = 0.0;
    double zero_mass_stderr = 0.0;
    double positive_median = 0.0;  // NaN without positive trials
    double theta_hat = 0.0;
    double theta_stderr = 0.0;
    // (zero_mass - (1 - theta_hat)) / combined standard error
    double zero_mass_z = 0.0;
};

struct MarkovRow {
    int n = 0;
    double t = 0.0;
    double tail = 0.0;          // P(X_n > t)
    double markov_bound = 0.0;  // E[X_n] / t
    double stderr_diff = 0.0;   // standard error of tail - markov_bound
    double margin = 0.0;        // (markov_bound - tail) / stderr_diff, +inf when both are exact
    double any_face_tail = 0.0; // P(max over the 2d faces > t)
    double union_bound = 0.0;   // 2d P(X_n > t)
};

struct FaceRow {
    int n = 0;
    int trials = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
    std::int64_t max_count = 0;
    std::int64_t face_bound = 0;  // (2n+1)^(d-1)
    bool bound_holds = true;
};

struct ProbeRow {
    int n = 0;
    int trials = 0;
    int hits = 0;
    double probability = 0.0;
    double stderr_prob = 0.0;
};

struct Summary {
    ExperimentKind kind = ExperimentKind::critical_profile;
    std::vector<CriticalRow> critical;
    std::vector<SupercriticalRow> supercritical;
    std::vector<FaceRow> faces;
    std::vector<MarkovRow> markov;
    std::vector<ProbeRow> probe;
};

// Pure function of the records: recomputing from a persisted stream gives
// the same table.
Summary summarize(const ExperimentConfig& cfg, const std::vector<Record>& records);
void write_summary_csv(std::ostream& out, const Summary& s);
nlohmann::json to_json(const Summary& s);

struct CampaignResult {
    std::vector<Record> records;
    Summary summary;
};

// Validates, runs, and writes records/summary when the paths are set.
CampaignResult run_campaign(const ExperimentConfig& cfg);
CampaignResult run_critical_profile_campaign(const ExperimentConfig& cfg);
CampaignResult run_supercritical_limit_scan(const ExperimentConfig& cfg);
CampaignResult run_face_bound_check(const ExperimentConfig& cfg);
CampaignResult run_halfspace_probe(const ExperimentConfig& cfg);

// Origin's open cluster restricted to {0 <= x_0 <= n, |x_i| <= n} reaches
// sup-distance n.
bool halfspace_reaches(const BondConfig& config, int n);

// Lower median and nearest-rank quantile of an unsorted sample.
double order_quantile(std::vector<double> values, double q);

}  // namespace perclab
