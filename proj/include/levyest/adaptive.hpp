#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levyest/estimator.hpp"
#include "levyest/kernel.hpp"
#include "levyest/models.hpp"

namespace levyest {

//! Candidate bandwidth set for the local selection rule.
//!
//! Two built-in rules: theory() produces {j/M : 1 <= j <= M}, simulation()
//! produces {j/(2M) : 1 <= j <= M}. default_m(nDbar) = floor(2 (n Dbar)^{1/3})
//! feeds either rule. Explicit lists are accepted as long as they are strictly
//! increasing and contained in (0, 1].
class BandwidthGrid {
 public:
  static BandwidthGrid theory(std::size_t m);
  static BandwidthGrid simulation(std::size_t m);
  static BandwidthGrid explicit_values(std::vector<double> values);
  static std::size_t default_m(double n_delta_bar);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  //! "theory", "simulation", or "explicit" — recorded for audit output.
  const std::string& rule() const { return rule_; }

 private:
  BandwidthGrid(std::vector<double> values, std::string rule);

  std::vector<double> values_;
  std::string rule_;
};

//! How the constant in the variance term is obtained.
enum class C0Mode {
  oracle,     // closed-form Fourier norms of a known model
  empirical,  // plug-in norms estimated from the increments
  manual,     // caller supplies the constant directly
};

std::string to_string(C0Mode mode);

struct AdaptiveConfig {
  BandwidthGrid grid = BandwidthGrid::simulation(8);
  double c = 0.1;                   // calibration constant in front of C0
  C0Mode c0_mode = C0Mode::empirical;
  double manual_c0 = 0.0;           // used only when c0_mode == manual
  double quadrature_step = 0.0;     // 0 = automatic step for the plug-in norms
  CurvePath path = CurvePath::direct;
  int min_bins = 4096;              // lattice floor when path uses the FFT
};

//! Signals that the plug-in constant degenerated to zero (all-zero data), in
//! which case the selection rule has no usable variance term.
class degenerate_c0_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Plug-in Fourier norms built from the increments: the L1 norm of the
//! derivative transform (weights Z^2) and the squared L2 norm of the
//! transform itself (weights Z), both integrated over |u| <= (n Dbar)^{1/3}.
FourierNorms empirical_fourier_norms(const IncrementSeries& data,
                                     double quadrature_step = 0.0);

//! The constant C0 = (c / 2pi) ||K||_2^2 (||(g*)'||_1 + ||g*||_2^2) with the
//! norms taken from the model (oracle), from the data (empirical), or given
//! verbatim (manual, in which case config.manual_c0 is returned unchanged).
double compute_c0(const AdaptiveConfig& config, const IncrementSeries& data,
                  const KernelSpec& kernel,
                  const std::optional<Model>& model = std::nullopt);

//! V(h) = C0 log(n Dbar) / (n h Dbar). Requires n Dbar > 1.
double variance_term(double c0, std::int64_t n, double delta_bar, double h);

//! A(h, x0): the positive-part supremum over the whole grid (h' = h included)
//! of |ghat_{h,h'}(x0) - ghat_{h'}(x0)|^2 - V(h').
double bias_proxy_a(const IncrementSeries& data, const KernelSpec& kernel,
                    const BandwidthGrid& grid, double x0, double h,
                    const std::vector<double>& v_table);

struct SelectionRow {
  double h = 0.0;
  double v = 0.0;
  double a = 0.0;
  double criterion = 0.0;  // a + v
  bool chosen = false;
};

//! Full audit record of one local selection: every grid candidate with its
//! V, A and criterion value, the winner, and the final estimates at x0.
struct SelectionTrace {
  double x0 = 0.0;
  std::vector<SelectionRow> rows;
  double h_hat = 0.0;
  double estimate = 0.0;
  std::optional<double> levy_value;  // estimate / x0, absent at x0 == 0
  double c0 = 0.0;
};

//! Runs the selection rule at each point. Single-bandwidth and pair curves
//! are computed once into shared tables; ties in the criterion go to the
//! smallest bandwidth.
std::vector<SelectionTrace> adaptive_curve(
    const IncrementSeries& data, const KernelSpec& kernel,
    const AdaptiveConfig& config, const std::vector<double>& points,
    const std::optional<Model>& model = std::nullopt);

SelectionTrace select_bandwidth(const IncrementSeries& data,
                                const KernelSpec& kernel,
                                const AdaptiveConfig& config, double x0,
                                const std::optional<Model>& model =
                                    std::nullopt);

}  // namespace levyest
