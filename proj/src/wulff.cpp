#include "perclab/wulff.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "perclab/cluster.hpp"
#include "perclab/errors.hpp"
#include "perclab/lattice.hpp"
#include "perclab/rng.hpp"

namespace perclab {

Polytope wulff_set(const NormTable& norm, int direction_count) {
    const int d = norm.dimension();
    if (d != 2 && d != 3) throw GeometryError("Wulff construction supports d = 2 or 3");
    if (direction_count < 2 * d) throw DomainError("need at least 2d directions");
    std::vector<Halfspace> hs;
    for (const auto& u : quasi_uniform_directions(d, direction_count)) hs.push_back({u, norm(u)});
    for (const auto& s : norm.samples()) hs.push_back({s.direction, s.value});
    return Polytope::from_halfspaces(d, std::move(hs));
}

double surface_tension(const Polytope& poly, const NormTable& norm) {
    if (poly.dimension() != norm.dimension()) throw DomainError("polytope and norm dimensions differ");
    double total = 0.0;
    for (const auto& f : poly.facets()) total += norm(f.normal) * f.measure;
    return total;
}

PhiResult phi_of_p(const NormTable& norm, double theta, int direction_count) {
    if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("theta must lie in (0, 1]");
    PhiResult r;
    if (norm.max_value() < 1e-14) {
        r.degenerate = true;
        return r;
    }
    const Polytope crystal = dilate_to_volume(wulff_set(norm, direction_count), 1.0 / theta);
    r.crystal_volume = volume(crystal);
    r.value = surface_tension(crystal, norm);
    return r;
}

IsoperimetricReport isoperimetric_check(const NormTable& norm, const std::vector<Polytope>& candidates,
                                        double slack, int direction_count) {
    if (candidates.empty()) throw DomainError("candidate list is empty");
    IsoperimetricReport rep;
    rep.wulff_tension = surface_tension(dilate_to_volume(wulff_set(norm, direction_count), 1.0), norm);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double t = surface_tension(dilate_to_volume(candidates[i], 1.0), norm);
        rep.candidate_tensions.push_back(t);
        if (t < best) {
            best = t;
            rep.best_candidate = i;
        }
    }
    rep.wulff_is_minimal = rep.wulff_tension <= best * (1.0 + slack);
    return rep;
}

ThetaEstimate theta_estimate(double p, int dimension, int n, int trials, std::uint64_t seed) {
    if (n < 1) throw DomainError("n must be >= 1");
    if (trials < 1) throw DomainError("trials must be >= 1");
    const auto box = build_box(dimension, n);
    ThetaEstimate est{p, n, trials, 0.0, 0.0};
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        const BondConfig config = sample_config(box, p, derive_seed(seed, static_cast<std::uint64_t>(t)));
        if (open_cluster(config, box->origin()).touches_box_boundary) ++hits;
    }
    est.value = static_cast<double>(hits) / trials;
    est.standard_error = std::sqrt(est.value * (1.0 - est.value) / trials);
    return est;
}

NormTable axis_norm(int dimension, double beta) {
    std::vector<NormSample> samples;
    for (const auto& e : axis_directions(dimension)) samples.push_back({e, beta});
    return NormTable(dimension, std::move(samples), true);
}

std::vector<ScanRow> vanishing_scan(const std::vector<double>& p_list, const ScanSettings& settings,
                                    const std::optional<std::vector<double>>& theta_estimates) {
    if (theta_estimates && theta_estimates->size() != p_list.size()) {
        throw DomainError("theta estimates must match the p list");
    }
    std::vector<ScanRow> rows;
    for (std::size_t i = 0; i < p_list.size(); ++i) {
        ScanRow row;
        row.p = p_list[i];
        FlowCylinder cyl{settings.dimension, 0, settings.side, settings.length};
        const FlowEstimate flow = estimate_flow_constant(row.p, cyl, settings.flow_trials, settings.seed);
        row.beta_hat = flow.mean_flow_per_area;
        row.beta_stderr = flow.standard_error;
        row.certified = flow.all_certified;
        row.theta_hat = theta_estimates
                            ? (*theta_estimates)[i]
                            : theta_estimate(row.p, settings.dimension, settings.theta_n, settings.theta_trials,
                                             hash_combine(settings.seed, 0x7468657461ULL))
                                  .value;
        if (row.theta_hat <= 0.0) {
            row.flagged = true;
            row.phi_hat = std::numeric_limits<double>::quiet_NaN();
        } else if (row.beta_hat <= 0.0) {
            row.degenerate = true;
            row.phi_hat = 0.0;
        } else {
            const PhiResult phi = phi_of_p(axis_norm(settings.dimension, row.beta_hat), row.theta_hat);
            row.phi_hat = phi.value;
            row.degenerate = phi.degenerate;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
    out << "p,beta_hat,beta_stderr,theta_hat,phi_hat\n" << std::setprecision(10);
    for (const auto& r : rows) {
        out << r.p << ',' << r.beta_hat << ',' << r.beta_stderr << ',' << r.theta_hat << ',' << r.phi_hat << '\n';
    }
}

}  // namespace perclab
