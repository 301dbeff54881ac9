#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace levyest {

class RngStream;

//! Closed-form norms of the Fourier transform g* of the target function
//! g(x) = x N(x), when a model provides them.
struct FourierNorms {
  double deriv_l1 = 0.0;  //!< ||(g*)'||_1
  double l2_sq = 0.0;     //!< ||g*||_2^2
};

enum class ModelKind { sqrt_jump, gamma_process, merton, variance_gamma };

//! A bounded-variation pure-jump process observed through its increments.
//!
//! Each model knows how to sample one increment over a time step, the true
//! target g(x) = x N(x) it implies (N is the jump intensity function), and a
//! few closed-form functionals of g used by the selector and the test rig.
class Model {
 public:
  //! Compound Poisson, intensity 1, jump law F(x) = sqrt(x/2) on (0, 2].
  //! Implied g(x) = (1/2) sqrt(x/2) on that interval.
  static Model sqrt_jump();

  //! Gamma subordinator: increments are Gamma(shape*dt, rate); g(x) =
  //! shape * exp(-rate x) for x > 0.
  static Model gamma_process(double shape, double rate);

  //! Compound Poisson with centered gaussian jumps (Merton jumps):
  //! g(x) = intensity * x * phi_{jump_sd}(x). intensity 0 is allowed and
  //! produces identically zero increments.
  static Model merton(double intensity, double jump_sd);

  //! Variance gamma: a Brownian motion with drift evaluated at an
  //! independent gamma subordinator with unit mean rate and variance
  //! `variance_rate` per unit time.
  static Model variance_gamma(double drift, double volatility,
                              double variance_rate);

  ModelKind kind() const { return kind_; }

  //! Short printable name including parameters, e.g. "gamma(1,1)".
  std::string name() const;

  //! g(x) = x N(x); 0 where the intensity has no mass (and at x = 0).
  double true_g(double x) const;

  //! integral of g over the real line (closed form).
  double g_integral() const;

  //! integral of |g| (closed form).
  double g_l1() const;

  //! Closed-form Fourier norms, for the models where we derived them
  //! (gamma_process and merton); absent otherwise.
  std::optional<FourierNorms> analytic_fourier_norms() const;

  //! Draw one increment of the process over time dt > 0.
  double sample_increment(RngStream& rng, double dt) const;

  //! Interval on which estimation error is scored by default.
  std::pair<double, double> default_eval_interval() const;

  //! Named parameters, in declaration order.
  std::vector<std::pair<std::string, double>> params() const;

 private:
  Model(ModelKind kind, double a, double b, double c)
      : kind_(kind), p1_(a), p2_(b), p3_(c) {}

  ModelKind kind_;
  double p1_, p2_, p3_;
};

//! Evenly spaced observations: n increments of length delta.
struct RegularScheme {
  double delta;
  std::int64_t n;
};

//! Explicit positive observation intervals.
struct IrregularScheme {
  std::vector<double> intervals;
};

//! Polynomially shrinking intervals delta_k = coefficient * k^{-alpha},
//! k = 1..n, with alpha in [1/3, 1].
struct PowerDecayScheme {
  double coefficient;
  double alpha;
  std::int64_t n;
};

using SamplingScheme =
    std::variant<RegularScheme, IrregularScheme, PowerDecayScheme>;

//! Throws std::invalid_argument when a scheme violates its preconditions.
void validate_scheme(const SamplingScheme& s);

//! Materialize the observation intervals of a scheme.
std::vector<double> scheme_intervals(const SamplingScheme& s);

std::int64_t scheme_size(const SamplingScheme& s);

//! Observed increments Z_k with their observation intervals.
//!
//! delta_bar() is the mean interval. When every interval is bit-identical
//! (regular sampling) the mean is taken as that common value exactly, so
//! regular and constant-irregular data are indistinguishable downstream.
class IncrementSeries {
 public:
  IncrementSeries(std::vector<double> values, std::vector<double> intervals);

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& intervals() const { return intervals_; }
  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }

  double delta_bar() const { return delta_bar_; }
  double delta_sq_bar() const { return delta_sq_bar_; }
  double n_delta_bar() const { return delta_bar_ * static_cast<double>(size()); }
  bool regular() const { return regular_; }

  //! Two-column CSV "delta,z", one row per increment, 17 significant digits.
  void to_csv(const std::string& path) const;
  static IncrementSeries from_csv(const std::string& path);

 private:
  std::vector<double> values_;
  std::vector<double> intervals_;
  double delta_bar_ = 0.0;
  double delta_sq_bar_ = 0.0;
  bool regular_ = false;
};

//! Sample a full increment series for a model under a sampling scheme.
IncrementSeries sample_increments(const Model& model, const SamplingScheme& s,
                                  RngStream& rng);

//! Convenience overload owning its stream; identical output for equal seeds.
IncrementSeries sample_increments(const Model& model, const SamplingScheme& s,
                                  std::uint64_t seed);

}  // namespace levyest
