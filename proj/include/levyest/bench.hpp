#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "levyest/adaptive.hpp"
#include "levyest/kernel.hpp"
#include "levyest/models.hpp"

namespace levyest {

//! One Monte Carlo risk experiment: draw increments, run the adaptive
//! estimator on a uniform evaluation grid, score against the true curve.
//!
//! Replication r draws its data from RngStream::for_replication(master_seed,
//! r), so reports are bit-identical across reruns and thread counts. When
//! auto_m is set, the bandwidth grid is rebuilt per experiment as
//! simulation/theory(default_m(n delta_bar)) keeping the configured rule.
struct ExperimentSpec {
  Model model = Model::gamma_process(1.0, 1.0);
  SamplingScheme scheme = RegularScheme{0.05, 50000};
  KernelSpec kernel =
      build_kernel(BaseDensity::gaussian(), 2, ScalingRule::convolution_power);
  AdaptiveConfig config;
  double eval_lo = 0.1;
  double eval_hi = 5.0;
  int n_points = 50;
  int replications = 10;
  std::uint64_t master_seed = 1;
  bool auto_m = true;
  int threads = 0;  // 0 = hardware concurrency; never affects the results
};

//! Midpoints of n equal cells over [lo, hi]; the Riemann weight of each
//! point is (hi - lo) / n. Midpoints never land on 0 exactly unless a cell
//! boundary arithmetic says so, and 0 is excluded from curve division anyway.
std::vector<double> eval_grid(double lo, double hi, int n);

struct ReplicationResult {
  int index = 0;
  bool ok = false;
  std::string error;             // set when ok is false
  double mise = 0.0;
  std::vector<double> g_hat;     // adaptive estimate per evaluation point
  std::vector<double> h_hat;     // selected bandwidth per evaluation point
};

struct RiskReport {
  // Experiment identity.
  std::string model_name;
  std::string kernel_record;
  std::string scheme_kind;       // "regular", "irregular", "power_decay"
  double n_delta_bar = 0.0;
  std::int64_t n = 0;
  double c = 0.0;
  std::string c0_mode;
  std::string grid_rule;
  std::vector<double> grid;
  double eval_lo = 0.0, eval_hi = 0.0;
  int n_points = 0;
  std::uint64_t master_seed = 0;
  bool levy_reported = false;    // false when the interval straddles 0

  // Aggregates. mean_mise is the exact arithmetic mean over successful
  // replications; se_mise is sample std / sqrt(#successful).
  std::vector<ReplicationResult> replications;
  int n_failed = 0;
  double mean_mise = 0.0;
  double se_mise = 0.0;
  std::vector<double> points;
  std::vector<double> point_mse;  // per-point mean squared error
  std::vector<double> mean_h;     // per-point mean selected bandwidth
};

RiskReport run_experiment(const ExperimentSpec& spec);

//! Full report as ordered JSON (keys in fixed order; doubles round-trip, so
//! byte equality of the dump is the determinism check).
nlohmann::ordered_json report_to_json(const RiskReport& report);

//! One-line CSV summary: model, n_delta_bar, mean MISE, MISE s.e.
std::string report_csv_summary_header();
std::string report_csv_summary_row(const RiskReport& report);

//! Least-squares fit of log(mean MISE) against log(n delta_bar) across a
//! family of sampling schemes. Needs >= 3 distinct n delta_bar values.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> log_n_delta_bar;
  std::vector<double> log_mean_mise;
  std::vector<RiskReport> reports;
};

RateFit rate_regression(const ExperimentSpec& base,
                        const std::vector<SamplingScheme>& schemes);

//! Pointwise adaptive risk against the best fixed bandwidth on the same
//! seeds. ratio = adaptive_risk / (best_fixed_risk + v_best), the quantity
//! bounded by the oracle inequality; v_best uses the mean C0 across
//! successful replications.
struct OracleGapRow {
  double x0 = 0.0;
  double adaptive_risk = 0.0;
  double best_fixed_risk = 0.0;
  double best_h = 0.0;
  double v_best = 0.0;
  double ratio = 0.0;
  std::vector<double> fixed_risks;  // one entry per grid bandwidth
};

std::vector<OracleGapRow> oracle_gap(const ExperimentSpec& spec,
                                     const std::vector<double>& points);

//! Mean interval, mean squared interval, and the sampling-balance value
//! (delta_sq_bar)^2 / delta_bar checked against 1/n. Violations warn via
//! condition_ok = false; they never abort the run.
struct IrregularDiagnostics {
  double delta_bar = 0.0;
  double delta_sq_bar = 0.0;
  double condition_value = 0.0;
  double threshold = 0.0;  // 1/n
  bool condition_ok = false;
};

struct IrregularReport {
  RiskReport report;
  IrregularDiagnostics diagnostics;
};

IrregularReport irregular_experiment(const ExperimentSpec& spec);

}  // namespace levyest
