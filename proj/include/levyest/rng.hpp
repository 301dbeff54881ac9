#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

namespace levyest {

//! splitmix64 finalizer, used to whiten stream keys.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

//! Deterministic random stream.
//!
//! The engine is mt19937_64 (bit-exact across platforms for a given seed)
//! and every distribution below is implemented here rather than taken from
//! <random>, whose distributions are implementation-defined. Two streams
//! built from the same (master seed, index) pair produce identical draws
//! regardless of how many threads the caller runs.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  //! Stream for one replication of a seeded experiment.
  static RngStream for_replication(std::uint64_t master_seed,
                                   std::uint64_t index) {
    return RngStream(
        splitmix64(master_seed ^ (0x9E3779B97F4A7C15ULL * (index + 1))));
  }

  //! Uniform draw on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  //! Uniform draw on (0, 1]; safe as a log() argument.
  double uniform_pos() { return 1.0 - uniform(); }

  //! Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  double exponential() { return -std::log(uniform_pos()); }

  //! Poisson draw: product-of-uniforms inversion for small means, PTRD
  //! (transformed rejection) for large ones.
  std::int64_t poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean < 0");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
      const double limit = std::exp(-mean);
      std::int64_t k = 0;
      double prod = uniform_pos();
      while (prod > limit) {
        ++k;
        prod *= uniform_pos();
      }
      return k;
    }
    return poisson_ptrd(mean);
  }

  //! Gamma(shape, scale) via Marsaglia-Tsang, with the standard power boost
  //! for shape < 1.
  double gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
      throw std::invalid_argument("gamma: shape and scale must be positive");
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma_mt(shape + 1.0) * std::pow(u, 1.0 / shape) * scale;
    }
    return gamma_mt(shape) * scale;
  }

 private:
  std::int64_t poisson_ptrd(double mean) {
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mu = std::log(mean);
    for (;;) {
      double u = uniform() - 0.5;
      double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double kf =
          std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      const std::int64_t k = static_cast<std::int64_t>(kf);
      const double lhs =
          std::log(v * inv_alpha / (a / (us * us) + b));
      const double rhs =
          kf * log_mu - mean - std::lgamma(kf + 1.0);
      if (lhs <= rhs) return k;
    }
  }

  // Marsaglia-Tsang core, shape >= 1, scale 1.
  double gamma_mt(double shape) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace levyest
