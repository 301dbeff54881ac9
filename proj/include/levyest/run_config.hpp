#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levyest/adaptive.hpp"
#include "levyest/bench.hpp"
#include "levyest/kernel.hpp"
#include "levyest/models.hpp"

namespace levyest {

//! A configuration problem: unreadable file, syntax error, unknown section
//! or key, bad value. The message carries origin:line and the field name.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Parsed INI-style run configuration.
//!
//! Sections: [run] seed, threads; [model] kind + parameters; [sampling]
//! scheme + parameters; [kernel] base, order, rule, table; [adaptive]
//! grid, m, values, c, c0_mode, manual_c0, quadrature_step, path, min_bins;
//! [estimate] mode, h, eval_lo, eval_hi, n_points; [experiment] eval_lo,
//! eval_hi, n_points, replications; [output] out, format. Every key is
//! optional unless the command that consumes it says otherwise; unknown
//! sections or keys fail the parse.
struct RunConfig {
  std::uint64_t seed = 1;
  int threads = 0;

  std::optional<Model> model;
  std::optional<SamplingScheme> scheme;
  KernelSpec kernel =
      build_kernel(BaseDensity::gaussian(), 2, ScalingRule::convolution_power);

  // [adaptive] — grid resolution is deferred: m unset means M is derived
  // from n delta_bar at run time.
  std::string grid_rule = "simulation";
  std::optional<int> grid_m;
  std::vector<double> grid_values;  // used when grid_rule == "explicit"
  double c = 0.1;
  C0Mode c0_mode = C0Mode::empirical;
  double manual_c0 = 0.0;
  double quadrature_step = 0.0;
  CurvePath path = CurvePath::automatic;
  int min_bins = 4096;

  // [estimate]
  std::string estimate_mode = "adaptive";  // "fixed" or "adaptive"
  std::optional<double> fixed_h;
  std::optional<double> est_lo, est_hi;
  int est_points = 50;

  // [experiment]
  std::optional<double> eval_lo, eval_hi;
  int n_points = 50;
  int replications = 10;

  // [output]
  std::string out_prefix = "levyest_out";
  std::string output_format = "both";  // bench report: "json", "csv", "both"

  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text,
                               const std::string& origin = "<config>");

  //! The bandwidth grid for a dataset of the given n delta_bar, honoring an
  //! explicit list or a fixed M when the config pins one.
  BandwidthGrid resolve_grid(double n_delta_bar) const;

  //! The adaptive settings with the grid resolved for n delta_bar.
  AdaptiveConfig make_adaptive(double n_delta_bar) const;

  //! Bench experiment built from [model]/[sampling]/[kernel]/[adaptive]/
  //! [experiment]; missing eval bounds fall back to the model default.
  ExperimentSpec make_experiment() const;
};

}  // namespace levyest
