#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace levyest {

enum class BaseFamily { gaussian, cauchy, tabulated };

//! How the dilations entering a higher-order kernel are scaled.
//!
//! `literal` applies the textbook recipe sum_k C(l,k) (-1)^{k+1} (1/k) u(t/k)
//! as written. `convolution_power` replaces the k-th dilation by the k-fold
//! self-convolution of the base, which is what actually produces a kernel of
//! order l; it is the default everywhere in this library.
enum class ScalingRule { literal, convolution_power };

//! Base density u from which estimation kernels are assembled.
//!
//! Built-ins are the standard gaussian and Cauchy densities, both with
//! closed-form Fourier transforms and closed convolution families. A
//! tabulated base is a piecewise-linear density on a uniform abscissa grid.
class BaseDensity {
 public:
  static BaseDensity gaussian();
  static BaseDensity cauchy();

  //! Piecewise-linear density from (abscissa, value) samples.
  //!
  //! The abscissae must be strictly increasing and uniformly spaced, the
  //! values nonnegative, and the piecewise-linear interpolant must integrate
  //! to 1 within 1e-8. The density is 0 outside the tabulated range.
  static BaseDensity tabulated(std::vector<double> x, std::vector<double> y);

  //! Load a tabulated base from a two-column CSV (abscissa, density).
  static BaseDensity tabulated_from_csv(const std::string& path);

  BaseFamily family() const { return family_; }

  //! Density value at t.
  double operator()(double t) const;

  //! Fourier transform integral e^{i xi t} u(t) dt.
  std::complex<double> fourier(double xi) const;

  //! True when the k-fold self-convolution stays in the family.
  bool has_convolution_closure() const { return family_ != BaseFamily::tabulated; }

  //! Scale s such that the k-fold self-convolution is (1/s) u(t/s).
  //! gaussian: sqrt(k); cauchy: k. Throws for tabulated bases.
  double convolution_scale(int k) const;

  //! Radius beyond which the density is zero or numerically negligible.
  double tail_radius() const;

  //! Source path for CSV-loaded bases, empty otherwise.
  const std::string& source() const { return source_; }

  //! Default-constructs the gaussian base.
  BaseDensity() = default;

 private:
  BaseFamily family_ = BaseFamily::gaussian;
  // Tabulated payload (unused for the analytic families).
  std::vector<double> tab_x_;
  std::vector<double> tab_y_;
  double tab_step_ = 0.0;
  std::string source_;
};

//! One dilation term w * (1/s) u(t/s) of an assembled kernel.
struct KernelTerm {
  double weight;
  double scale;
};

//! Cached kernel norms: ||K||_1, ||K||_2 (the norm, not its square), and
//! ||K||_inf.
struct KernelNorms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

//! An order-l estimation kernel assembled from a base density.
class KernelSpec {
 public:
  const BaseDensity& base() const { return base_; }
  int order() const { return order_; }
  ScalingRule rule() const { return rule_; }
  const std::vector<KernelTerm>& terms() const { return terms_; }

  //! Norms computed once at build time by adaptive quadrature.
  const KernelNorms& norms() const { return norms_; }

  //! One-line text record, e.g. "base=gaussian order=2 rule=convolution_power".
  std::string record() const;

 private:
  friend KernelSpec build_kernel(const BaseDensity&, int, ScalingRule);

  BaseDensity base_;
  int order_ = 1;
  ScalingRule rule_ = ScalingRule::convolution_power;
  std::vector<KernelTerm> terms_;
  KernelNorms norms_;
};

//! Assemble the order-l kernel for a base density.
//!
//! Weights are C(l,k) (-1)^{k+1} for k = 1..l; scales follow the rule. A
//! tabulated base combined with `convolution_power` is rejected because no
//! convolution closure is available for it.
KernelSpec build_kernel(const BaseDensity& base, int order,
                        ScalingRule rule = ScalingRule::convolution_power);

//! K(x).
double eval_kernel(const KernelSpec& k, double x);

//! Bandwidth-scaled evaluation K_h(x) = K(x/h)/h. Requires h > 0.
double eval_scaled(const KernelSpec& k, double h, double x);

//! Fourier transform K*(xi) = sum_k w_k u*(s_k xi).
std::complex<double> kernel_fourier(const KernelSpec& k, double xi);

//! Recompute the norms by adaptive quadrature (plus a grid/golden-section
//! search for the sup norm). `build_kernel` caches this result.
KernelNorms kernel_norms(const KernelSpec& k);

//! The convolution K_{h2} * K_{h1} as a callable profile.
//!
//! For gaussian and cauchy bases the profile is an exact mixture in the same
//! family (gaussian scales add in quadrature, cauchy scales add linearly).
//! For other bases it is precomputed by quadrature on a uniform grid and
//! evaluated by cubic interpolation.
class ConvolvedKernel {
 public:
  double operator()(double x) const;

  //! True when the exact in-family mixture path is used.
  bool analytic() const { return analytic_; }

  //! Mixture terms (weight, scale); meaningful only when analytic().
  const std::vector<KernelTerm>& terms() const { return terms_; }

  BaseFamily family() const { return family_; }

 private:
  friend ConvolvedKernel detail_make_convolved(const KernelSpec&, double,
                                               double, int, bool);

  bool analytic_ = true;
  BaseFamily family_ = BaseFamily::gaussian;
  std::vector<KernelTerm> terms_;
  // Numeric-path payload.
  std::shared_ptr<const BaseDensity> base_;
  std::vector<double> grid_values_;
  double grid_lo_ = 0.0;
  double grid_step_ = 0.0;
};

//! Build the convolution profile of K at bandwidths h1 and h2 (symmetric in
//! its arguments). `grid_size` only affects the numeric fallback path.
ConvolvedKernel convolve_kernels(const KernelSpec& k, double h1, double h2,
                                 int grid_size = 4097);

//! Force the grid-plus-quadrature path even when an exact mixture exists.
//! Exists so the two paths can be cross-checked against each other.
ConvolvedKernel convolve_kernels_numeric(const KernelSpec& k, double h1,
                                         double h2, int grid_size = 4097);

//! Internal builder shared by the two convolve entry points.
ConvolvedKernel detail_make_convolved(const KernelSpec& k, double h1,
                                      double h2, int grid_size,
                                      bool force_numeric);

//! Parse a kernel record produced by KernelSpec::record().
//! Accepts keys base, order, rule and, for tabulated bases, table=<csv path>.
KernelSpec kernel_from_record(const std::string& record);

const char* to_string(BaseFamily f);
const char* to_string(ScalingRule r);

}  // namespace levyest
