#include "levyest/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "levyest/rng.hpp"

namespace levyest {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

// Decay rate of the variance gamma tails:
// B = (1/sigma) sqrt(2/nu + theta^2/sigma^2).
double vg_decay(double theta, double sigma, double nu) {
  return std::sqrt(2.0 / nu + theta * theta / (sigma * sigma)) / sigma;
}

// Compensated mean for pairwise-unequal interval lists.
double mean_of(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(v.size());
}

}  // namespace

Model Model::sqrt_jump() { return Model(ModelKind::sqrt_jump, 0, 0, 0); }

Model Model::gamma_process(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("gamma_process: shape and rate must be > 0");
  return Model(ModelKind::gamma_process, shape, rate, 0);
}

Model Model::merton(double intensity, double jump_sd) {
  if (!(intensity >= 0.0))
    throw std::invalid_argument("merton: intensity must be >= 0");
  if (!(jump_sd > 0.0))
    throw std::invalid_argument("merton: jump_sd must be > 0");
  return Model(ModelKind::merton, intensity, jump_sd, 0);
}

Model Model::variance_gamma(double drift, double volatility,
                            double variance_rate) {
  if (!(volatility > 0.0) || !(variance_rate > 0.0))
    throw std::invalid_argument(
        "variance_gamma: volatility and variance_rate must be > 0");
  return Model(ModelKind::variance_gamma, drift, volatility, variance_rate);
}

std::string Model::name() const {
  std::ostringstream ss;
  switch (kind_) {
    case ModelKind::sqrt_jump:
      return "sqrt_jump";
    case ModelKind::gamma_process:
      ss << "gamma(" << p1_ << "," << p2_ << ")";
      return ss.str();
    case ModelKind::merton:
      ss << "merton(" << p1_ << "," << p2_ << ")";
      return ss.str();
    case ModelKind::variance_gamma:
      ss << "vgamma(" << p1_ << "," << p2_ << "," << p3_ << ")";
      return ss.str();
  }
  return "?";
}

double Model::true_g(double x) const {
  switch (kind_) {
    case ModelKind::sqrt_jump:
      // N(x) = x^{-1/2} / (2 sqrt(2)) on (0, 2]; g = x N(x).
      if (x <= 0.0 || x > 2.0) return 0.0;
      return 0.5 * std::sqrt(0.5 * x);
    case ModelKind::gamma_process:
      if (x <= 0.0) return 0.0;
      return p1_ * std::exp(-p2_ * x);
    case ModelKind::merton: {
      const double d = p2_;
      return p1_ * x * kInvSqrt2Pi / d * std::exp(-0.5 * x * x / (d * d));
    }
    case ModelKind::variance_gamma: {
      if (x == 0.0) return 0.0;
      const double theta = p1_, sigma = p2_, nu = p3_;
      const double b = vg_decay(theta, sigma, nu);
      const double sgn = (x > 0.0) ? 1.0 : -1.0;
      return sgn / nu *
             std::exp(theta * x / (sigma * sigma) - b * std::abs(x));
    }
  }
  return 0.0;
}

double Model::g_integral() const {
  switch (kind_) {
    case ModelKind::sqrt_jump:
      return 2.0 / 3.0;
    case ModelKind::gamma_process:
      return p1_ / p2_;
    case ModelKind::merton:
      return 0.0;  // odd integrand
    case ModelKind::variance_gamma:
      return p1_;  // the drift
  }
  return 0.0;
}

double Model::g_l1() const {
  switch (kind_) {
    case ModelKind::sqrt_jump:
      return 2.0 / 3.0;
    case ModelKind::gamma_process:
      return p1_ / p2_;
    case ModelKind::merton:
      return p1_ * p2_ * std::sqrt(2.0 / std::numbers::pi);
    case ModelKind::variance_gamma: {
      const double b = vg_decay(p1_, p2_, p3_);
      return b * p2_ * p2_;
    }
  }
  return 0.0;
}

std::optional<FourierNorms> Model::analytic_fourier_norms() const {
  switch (kind_) {
    case ModelKind::gamma_process: {
      // g*(u) = shape / (rate - iu):
      // |g*|^2 integrates to pi shape^2 / rate, |(g*)'| to pi shape / rate.
      FourierNorms f;
      f.deriv_l1 = std::numbers::pi * p1_ / p2_;
      f.l2_sq = std::numbers::pi * p1_ * p1_ / p2_;
      return f;
    }
    case ModelKind::merton: {
      // g*(u) = i L d^2 u exp(-d^2 u^2 / 2) with L = intensity, d = jump_sd.
      FourierNorms f;
      f.deriv_l1 = 4.0 * p1_ * p2_ * std::exp(-0.5);
      f.l2_sq = p1_ * p1_ * p2_ * std::sqrt(std::numbers::pi) / 2.0;
      return f;
    }
    default:
      return std::nullopt;
  }
}

double Model::sample_increment(RngStream& rng, double dt) const {
  if (!(dt > 0.0))
    throw std::invalid_argument("sample_increment: dt must be > 0");
  switch (kind_) {
    case ModelKind::sqrt_jump: {
      const std::int64_t j = rng.poisson(dt);  // unit intensity
      double z = 0.0;
      for (std::int64_t i = 0; i < j; ++i) {
        const double u = rng.uniform();
        z += 2.0 * u * u;  // inverse of F(x) = sqrt(x/2)
      }
      return z;
    }
    case ModelKind::gamma_process:
      return rng.gamma(p1_ * dt, 1.0 / p2_);
    case ModelKind::merton: {
      if (p1_ == 0.0) return 0.0;
      const std::int64_t j = rng.poisson(p1_ * dt);
      double z = 0.0;
      for (std::int64_t i = 0; i < j; ++i) z += p2_ * rng.normal();
      return z;
    }
    case ModelKind::variance_gamma: {
      const double g = rng.gamma(dt / p3_, p3_);
      return p1_ * g + p2_ * std::sqrt(g) * rng.normal();
    }
  }
  return 0.0;
}

std::pair<double, double> Model::default_eval_interval() const {
  switch (kind_) {
    case ModelKind::sqrt_jump:
      return {0.04, 2.0};
    case ModelKind::gamma_process:
      return {0.1, 5.0};
    case ModelKind::merton:
      return {-1.0, 1.0};
    case ModelKind::variance_gamma:
      return {-0.6, 0.6};
  }
  return {0.0, 1.0};
}

std::vector<std::pair<std::string, double>> Model::params() const {
  switch (kind_) {
    case ModelKind::sqrt_jump:
      return {};
    case ModelKind::gamma_process:
      return {{"shape", p1_}, {"rate", p2_}};
    case ModelKind::merton:
      return {{"intensity", p1_}, {"jump_sd", p2_}};
    case ModelKind::variance_gamma:
      return {{"drift", p1_}, {"volatility", p2_}, {"variance_rate", p3_}};
  }
  return {};
}

void validate_scheme(const SamplingScheme& s) {
  if (const auto* r = std::get_if<RegularScheme>(&s)) {
    if (!(r->delta > 0.0))
      throw std::invalid_argument("regular scheme: delta must be > 0");
    if (r->n < 1) throw std::invalid_argument("regular scheme: n must be >= 1");
    return;
  }
  if (const auto* ir = std::get_if<IrregularScheme>(&s)) {
    if (ir->intervals.empty())
      throw std::invalid_argument("irregular scheme: empty interval list");
    for (double d : ir->intervals)
      if (!(d > 0.0))
        throw std::invalid_argument(
            "irregular scheme: intervals must be > 0");
    return;
  }
  const auto& p = std::get<PowerDecayScheme>(s);
  if (!(p.coefficient > 0.0))
    throw std::invalid_argument("power-decay scheme: coefficient must be > 0");
  if (!(p.alpha >= 1.0 / 3.0 && p.alpha <= 1.0))
    throw std::invalid_argument(
        "power-decay scheme: alpha must lie in [1/3, 1]");
  if (p.n < 1)
    throw std::invalid_argument("power-decay scheme: n must be >= 1");
}

std::vector<double> scheme_intervals(const SamplingScheme& s) {
  validate_scheme(s);
  if (const auto* r = std::get_if<RegularScheme>(&s))
    return std::vector<double>(static_cast<std::size_t>(r->n), r->delta);
  if (const auto* ir = std::get_if<IrregularScheme>(&s)) return ir->intervals;
  const auto& p = std::get<PowerDecayScheme>(s);
  std::vector<double> out(static_cast<std::size_t>(p.n));
  for (std::int64_t k = 1; k <= p.n; ++k)
    out[static_cast<std::size_t>(k - 1)] =
        p.coefficient * std::pow(static_cast<double>(k), -p.alpha);
  return out;
}

std::int64_t scheme_size(const SamplingScheme& s) {
  if (const auto* r = std::get_if<RegularScheme>(&s)) return r->n;
  if (const auto* ir = std::get_if<IrregularScheme>(&s))
    return static_cast<std::int64_t>(ir->intervals.size());
  return std::get<PowerDecayScheme>(s).n;
}

IncrementSeries::IncrementSeries(std::vector<double> values,
                                 std::vector<double> intervals)
    : values_(std::move(values)), intervals_(std::move(intervals)) {
  if (values_.size() != intervals_.size() || values_.empty())
    throw std::invalid_argument(
        "increment series: values and intervals must match and be nonempty");
  for (double d : intervals_)
    if (!(d > 0.0))
      throw std::invalid_argument("increment series: intervals must be > 0");
  regular_ = std::all_of(intervals_.begin(), intervals_.end(),
                         [&](double d) { return d == intervals_.front(); });
  if (regular_) {
    delta_bar_ = intervals_.front();
    delta_sq_bar_ = delta_bar_ * delta_bar_;
  } else {
    delta_bar_ = mean_of(intervals_);
    std::vector<double> sq(intervals_.size());
    std::transform(intervals_.begin(), intervals_.end(), sq.begin(),
                   [](double d) { return d * d; });
    delta_sq_bar_ = mean_of(sq);
  }
}

void IncrementSeries::to_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "delta,z\n";
  for (std::size_t i = 0; i < values_.size(); ++i)
    out << intervals_[i] << "," << values_[i] << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

IncrementSeries IncrementSeries::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::vector<double> values, intervals;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double d, z;
    if (!(ss >> d >> z)) {
      if (lineno == 1) continue;  // header
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected 'delta,z'");
    }
    intervals.push_back(d);
    values.push_back(z);
  }
  return IncrementSeries(std::move(values), std::move(intervals));
}

IncrementSeries sample_increments(const Model& model, const SamplingScheme& s,
                                  RngStream& rng) {
  std::vector<double> intervals = scheme_intervals(s);
  std::vector<double> values(intervals.size());
  for (std::size_t k = 0; k < intervals.size(); ++k)
    values[k] = model.sample_increment(rng, intervals[k]);
  return IncrementSeries(std::move(values), std::move(intervals));
}

IncrementSeries sample_increments(const Model& model, const SamplingScheme& s,
                                  std::uint64_t seed) {
  RngStream rng(splitmix64(seed));
  return sample_increments(model, s, rng);
}

}  // namespace levyest
