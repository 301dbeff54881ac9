#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "levyest/kernel.hpp"
#include "levyest/models.hpp"

namespace levyest {

//! Estimate of g (and of the jump intensity N = g/x) at one point.
struct PointEstimate {
  double x0 = 0.0;
  double h = 0.0;
  double value = 0.0;                //!< estimate of g(x0)
  std::optional<double> levy_value;  //!< value / x0; absent when x0 == 0
};

//! Which evaluation path estimate_curve and the selector use.
//!
//! `automatic` picks the binned-FFT path on uniform grids that fit the
//! lattice budget and falls back to direct summation otherwise. The two
//! paths agree to a small multiple of machine precision relative to the
//! curve's sup norm; the direct path is the reference.
enum class CurvePath { automatic, direct, fft };

struct CurveOptions {
  CurvePath path = CurvePath::automatic;
  //! Lattice pitch targets: pitch <= span/min_bins and <= min_scale/8.
  int min_bins = 4096;
  //! Direct fallback above this lattice size (automatic mode only).
  int max_nodes = 1 << 19;
};

//! S(x0) = sum_k weights[k] * profile(x0 - positions[k]), summed in index
//! order. The building block of every direct-path estimate; exposed so its
//! algebraic invariances can be exercised directly.
double weighted_profile_sum(const std::vector<double>& positions,
                            const std::vector<double>& weights,
                            const std::function<double(double)>& profile,
                            double x0);

//! ghat_h(x0) = (1/(n delta_bar)) sum_k Z_k K_h(x0 - Z_k).
PointEstimate estimate_point(const IncrementSeries& data, const KernelSpec& k,
                             double h, double x0);

//! Same estimate smoothed twice: the kernel is the profile K_{h2} * K_{h1}.
//! Symmetric in (h1, h2), bitwise.
double estimate_pair(const IncrementSeries& data, const KernelSpec& k,
                     double h1, double h2, double x0);

//! Frequency-domain form (1/(n delta_bar)) K*(u h) sum_k Z_k e^{i u Z_k}.
std::complex<double> estimate_fourier(const IncrementSeries& data,
                                      const KernelSpec& k, double h, double u);

//! Evaluate ghat_h over a list of points.
std::vector<PointEstimate> estimate_curve(const IncrementSeries& data,
                                          const KernelSpec& k, double h,
                                          const std::vector<double>& points,
                                          const CurveOptions& opts = {});

//! Shares one binned lattice across many smoothing profiles for a fixed
//! (data, evaluation grid) pair.
//!
//! The lattice refines the evaluation grid so every evaluation point is a
//! lattice node; increments enter through 4-point (cubic) binning and each
//! profile is sampled at every lattice lag, so the only FFT-path error is
//! the binning interpolation error, of order (pitch/scale)^4.
//!
//! Instances are not safe for concurrent use; give each worker its own.
class CurveEngine {
 public:
  //! @param min_scale smallest smoothing scale any requested profile will
  //!        have; controls the lattice pitch.
  CurveEngine(const IncrementSeries& data, std::vector<double> points,
              double min_scale, const CurveOptions& opts = {});

  //! Curve x_j -> (1/(n delta_bar)) sum_k Z_k profile(x_j - Z_k).
  std::vector<double> curve(const std::function<double(double)>& profile) const;

  //! False when the engine degraded to direct summation.
  bool fft_active() const { return fft_active_; }

  const std::vector<double>& points() const { return points_; }

 private:
  std::vector<double> curve_direct(
      const std::function<double(double)>& profile) const;

  const IncrementSeries* data_;
  std::vector<double> points_;
  bool fft_active_ = false;
  // Lattice state (FFT path only).
  double origin_ = 0.0;
  double pitch_ = 0.0;
  long long j_lo_ = 0;
  int stride_ = 1;
  int n_nodes_ = 0;
  int fft_size_ = 0;
  std::vector<std::complex<double>> coeff_spectrum_;
};

}  // namespace levyest
