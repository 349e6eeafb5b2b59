#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "perclab/geometry.hpp"
#include "perclab/maxflow.hpp"
#include "perclab/norm.hpp"

namespace perclab {

inline constexpr int kDefaultWulffDirections = 360;

// ∩_v {x : x . v <= tau(v)} over quasi-uniform directions and every sampled
// direction of the table.
Polytope wulff_set(const NormTable& norm, int direction_count = kDefaultWulffDirections);

// Sum over facets of tau(normal) * facet measure.
double surface_tension(const Polytope& poly, const NormTable& norm);

struct PhiResult {
    double value = 0.0;
    bool degenerate = false;  // norm numerically zero; value reported as 0
    double crystal_volume = 0.0;
};

// Surface tension of the Wulff set dilated to volume 1/theta.
PhiResult phi_of_p(const NormTable& norm, double theta, int direction_count = kDefaultWulffDirections);

struct IsoperimetricReport {
    double wulff_tension = 0.0;              // at volume 1
    std::vector<double> candidate_tensions;  // at volume 1, input order
    std::size_t best_candidate = 0;
    bool wulff_is_minimal = false;           // within slack (relative)
};

IsoperimetricReport isoperimetric_check(const NormTable& norm, const std::vector<Polytope>& candidates,
                                        double slack = 1e-6,
                                        int direction_count = kDefaultWulffDirections);

struct ThetaEstimate {
    double p = 0.0;
    int n = 0;
    int trials = 0;
    double value = 0.0;  // fraction of trials with C(0) reaching the boundary of [-n, n]^d
    double standard_error = 0.0;
};

ThetaEstimate theta_estimate(double p, int dimension, int n, int trials, std::uint64_t seed);

// Norm with the value beta on every axis direction, extended by symmetry and
// the support-function rule (beta times the l1 norm).
NormTable axis_norm(int dimension, double beta);

struct ScanRow {
    double p = 0.0;
    double beta_hat = 0.0;
    double beta_stderr = 0.0;
    double theta_hat = 0.0;
    double phi_hat = 0.0;   // NaN when theta_hat == 0
    bool flagged = false;   // theta_hat == 0: crystal undefined
    bool degenerate = false;  // beta_hat == 0: phi_hat = 0
    bool certified = true;
};

struct ScanSettings {
    int dimension = 2;
    int side = 48;     // K
    int length = 48;   // L
    int flow_trials = 100;
    int theta_n = 32;
    int theta_trials = 200;
    std::uint64_t seed = 1;
};

// Per p: beta_hat from axis flows, theta_hat from the box proxy (unless
// supplied), phi_hat = I(W) for the crystal of volume 1/theta_hat.
std::vector<ScanRow> vanishing_scan(const std::vector<double>& p_list, const ScanSettings& settings,
                                    const std::optional<std::vector<double>>& theta_estimates = std::nullopt);

// CSV header "p,beta_hat,beta_stderr,theta_hat,phi_hat".
void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows);

}  // namespace perclab
