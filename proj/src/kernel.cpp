#include "levyest/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "levyest/quadrature.hpp"

namespace levyest {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double gaussian_pdf(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

double cauchy_pdf(double t) { return 1.0 / (std::numbers::pi * (1.0 + t * t)); }

// Scaled family density (1/s) u(t/s) without the intermediate division,
// written per family for accuracy at large |t|.
double family_scaled(BaseFamily f, double s, double t) {
  switch (f) {
    case BaseFamily::gaussian:
      return gaussian_pdf(t / s) / s;
    case BaseFamily::cauchy:
      return s / (std::numbers::pi * (s * s + t * t));
    default:
      throw std::logic_error("family_scaled: tabulated base");
  }
}

unsigned long long binomial(int n, int k) {
  unsigned long long c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// sinc(z) = sin(z)/z with the even series used near 0.
double sinc(double z) {
  if (std::abs(z) < 1e-4) {
    const double z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

// Golden-section maximum refinement of f on [a, b] (f unimodal there).
double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 90 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return std::max(f1, f2);
}

// Uniform-grid Catmull-Rom interpolation with zero extension.
double cubic_interp(const std::vector<double>& v, double lo, double step,
                    double x) {
  const double pos = (x - lo) / step;
  if (pos < 1.0 || pos > static_cast<double>(v.size()) - 3.0) {
    // Fall back to linear near the edges, zero outside.
    if (pos < 0.0 || pos > static_cast<double>(v.size()) - 1.0) return 0.0;
    const auto i = static_cast<std::size_t>(pos);
    const double s = pos - static_cast<double>(i);
    if (i + 1 >= v.size()) return v.back();
    return (1.0 - s) * v[i] + s * v[i + 1];
  }
  const auto i = static_cast<std::size_t>(pos);
  const double s = pos - static_cast<double>(i);
  const double m0 = v[i - 1], m1 = v[i], m2 = v[i + 1], m3 = v[i + 2];
  const double a0 = -0.5 * m0 + 1.5 * m1 - 1.5 * m2 + 0.5 * m3;
  const double a1 = m0 - 2.5 * m1 + 2.0 * m2 - 0.5 * m3;
  const double a2 = -0.5 * m0 + 0.5 * m2;
  return ((a0 * s + a1) * s + a2) * s + m1;
}

}  // namespace

BaseDensity BaseDensity::gaussian() {
  BaseDensity b;
  b.family_ = BaseFamily::gaussian;
  return b;
}

BaseDensity BaseDensity::cauchy() {
  BaseDensity b;
  b.family_ = BaseFamily::cauchy;
  return b;
}

BaseDensity BaseDensity::tabulated(std::vector<double> x,
                                   std::vector<double> y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument(
        "tabulated base: need matching abscissa/value columns, >= 3 rows");
  const double step = x[1] - x[0];
  if (!(step > 0.0))
    throw std::invalid_argument("tabulated base: abscissae must increase");
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double d = x[i] - x[i - 1];
    if (std::abs(d - step) > 1e-9 * step)
      throw std::invalid_argument(
          "tabulated base: abscissae must be uniformly spaced");
  }
  for (double v : y)
    if (!(v >= 0.0))
      throw std::invalid_argument("tabulated base: negative density value");
  if (y.front() != 0.0 || y.back() != 0.0)
    throw std::invalid_argument(
        "tabulated base: density must start and end at 0");
  // With zero endpoints the interpolant integral is exactly step * sum(y).
  double sum = 0.0;
  for (double v : y) sum += v;
  if (std::abs(sum * step - 1.0) > 1e-8)
    throw std::invalid_argument(
        "tabulated base: density must integrate to 1 (got " +
        std::to_string(sum * step) + ")");
  BaseDensity b;
  b.family_ = BaseFamily::tabulated;
  b.tab_x_ = std::move(x);
  b.tab_y_ = std::move(y);
  b.tab_step_ = step;
  return b;
}

BaseDensity BaseDensity::tabulated_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open base table: " + path);
  std::vector<double> xs, ys;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x >> y)) {
      if (lineno == 1) continue;  // header row
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected two numeric columns");
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  BaseDensity b = tabulated(std::move(xs), std::move(ys));
  b.source_ = path;
  return b;
}

double BaseDensity::operator()(double t) const {
  switch (family_) {
    case BaseFamily::gaussian:
      return gaussian_pdf(t);
    case BaseFamily::cauchy:
      return cauchy_pdf(t);
    case BaseFamily::tabulated: {
      if (t < tab_x_.front() || t > tab_x_.back()) return 0.0;
      const double pos = (t - tab_x_.front()) / tab_step_;
      auto i = static_cast<std::size_t>(pos);
      if (i + 1 >= tab_x_.size()) return tab_y_.back();
      const double s = pos - static_cast<double>(i);
      return (1.0 - s) * tab_y_[i] + s * tab_y_[i + 1];
    }
  }
  return 0.0;
}

std::complex<double> BaseDensity::fourier(double xi) const {
  switch (family_) {
    case BaseFamily::gaussian:
      return {std::exp(-0.5 * xi * xi), 0.0};
    case BaseFamily::cauchy:
      return {std::exp(-std::abs(xi)), 0.0};
    case BaseFamily::tabulated: {
      // Zero-ended uniform table = sum of hat functions; the transform of a
      // hat of half-width w at x_i is w sinc^2(xi w / 2) e^{i xi x_i}.
      const double w = tab_step_;
      const double shape = w * sinc(0.5 * xi * w) * sinc(0.5 * xi * w);
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t i = 0; i < tab_x_.size(); ++i) {
        if (tab_y_[i] == 0.0) continue;
        acc += tab_y_[i] *
               std::complex<double>{std::cos(xi * tab_x_[i]),
                                    std::sin(xi * tab_x_[i])};
      }
      return shape * acc;
    }
  }
  return {0.0, 0.0};
}

double BaseDensity::convolution_scale(int k) const {
  if (k < 1) throw std::invalid_argument("convolution_scale: k >= 1 required");
  switch (family_) {
    case BaseFamily::gaussian:
      return std::sqrt(static_cast<double>(k));
    case BaseFamily::cauchy:
      return static_cast<double>(k);
    case BaseFamily::tabulated:
      throw std::invalid_argument(
          "tabulated base has no convolution closure; use rule=literal");
  }
  return 1.0;
}

double BaseDensity::tail_radius() const {
  switch (family_) {
    case BaseFamily::gaussian:
      return 9.0;
    case BaseFamily::cauchy:
      return 1e6;  // heavy tails: no practical cutoff, callers must transform
    case BaseFamily::tabulated:
      return std::max(std::abs(tab_x_.front()), std::abs(tab_x_.back()));
  }
  return 9.0;
}

KernelSpec build_kernel(const BaseDensity& base, int order, ScalingRule rule) {
  if (order < 1 || order > 20)
    throw std::invalid_argument("build_kernel: order must be in [1, 20]");
  if (rule == ScalingRule::convolution_power && !base.has_convolution_closure())
    throw std::invalid_argument(
        "build_kernel: convolution_power needs a base with a convolution "
        "closure (gaussian or cauchy); tabulated bases support rule=literal "
        "only");
  KernelSpec k;
  k.base_ = base;
  k.order_ = order;
  k.rule_ = rule;
  k.terms_.reserve(order);
  for (int j = 1; j <= order; ++j) {
    const double w = static_cast<double>(binomial(order, j)) *
                     ((j % 2 == 1) ? 1.0 : -1.0);
    const double s = (rule == ScalingRule::literal)
                         ? static_cast<double>(j)
                         : base.convolution_scale(j);
    k.terms_.push_back({w, s});
  }
  k.norms_ = kernel_norms(k);
  return k;
}

double eval_kernel(const KernelSpec& k, double x) {
  double v = 0.0;
  if (k.base().family() == BaseFamily::tabulated) {
    for (const auto& t : k.terms()) v += t.weight / t.scale * k.base()(x / t.scale);
    return v;
  }
  for (const auto& t : k.terms())
    v += t.weight * family_scaled(k.base().family(), t.scale, x);
  return v;
}

double eval_scaled(const KernelSpec& k, double h, double x) {
  if (!(h > 0.0)) throw std::invalid_argument("eval_scaled: h must be > 0");
  return eval_kernel(k, x / h) / h;
}

std::complex<double> kernel_fourier(const KernelSpec& k, double xi) {
  std::complex<double> v{0.0, 0.0};
  for (const auto& t : k.terms()) v += t.weight * k.base().fourier(t.scale * xi);
  return v;
}

KernelNorms kernel_norms(const KernelSpec& k) {
  KernelNorms n;
  auto abs_k = [&k](double x) { return std::abs(eval_kernel(k, x)); };
  auto sq_k = [&k](double x) {
    const double v = eval_kernel(k, x);
    return v * v;
  };
  n.l1 = quad::integrate_line(abs_k, 1e-11, 1e-11).value;
  n.l2 = std::sqrt(quad::integrate_line(sq_k, 1e-12, 1e-12).value);
  // Sup norm: coarse scan of the scaled support, then golden-section.
  double smax = 1.0;
  for (const auto& t : k.terms()) smax = std::max(smax, t.scale);
  double radius = 10.0 * smax;
  if (k.base().family() == BaseFamily::tabulated)
    radius = k.base().tail_radius() * smax;
  const double step = 1e-3 * smax;
  const int m = static_cast<int>(std::ceil(radius / step));
  double best = abs_k(0.0);
  int best_i = 0;
  for (int i = -m; i <= m; ++i) {
    const double v = abs_k(static_cast<double>(i) * step);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  n.linf = golden_max(abs_k, (best_i - 1) * step, (best_i + 1) * step);
  n.linf = std::max(n.linf, best);
  return n;
}

std::string KernelSpec::record() const {
  std::ostringstream ss;
  ss << "base=" << to_string(base_.family()) << " order=" << order_
     << " rule=" << to_string(rule_);
  if (base_.family() == BaseFamily::tabulated && !base_.source().empty())
    ss << " table=" << base_.source();
  return ss.str();
}

KernelSpec kernel_from_record(const std::string& record) {
  std::istringstream ss(record);
  std::string tok, base_name = "gaussian", rule_name = "convolution_power",
                   table;
  int order = 2;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("kernel record: expected key=value, got '" +
                                  tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "base")
      base_name = val;
    else if (key == "order") {
      try {
        order = std::stoi(val);
      } catch (const std::exception&) {
        throw std::invalid_argument("kernel record: bad order '" + val + "'");
      }
    } else if (key == "rule")
      rule_name = val;
    else if (key == "table")
      table = val;
    else
      throw std::invalid_argument("kernel record: unknown key '" + key + "'");
  }
  BaseDensity base = BaseDensity::gaussian();
  if (base_name == "gaussian")
    base = BaseDensity::gaussian();
  else if (base_name == "cauchy")
    base = BaseDensity::cauchy();
  else if (base_name == "tabulated") {
    if (table.empty())
      throw std::invalid_argument("kernel record: tabulated base needs table=");
    base = BaseDensity::tabulated_from_csv(table);
  } else {
    throw std::invalid_argument("kernel record: unknown base '" + base_name +
                                "'");
  }
  ScalingRule rule;
  if (rule_name == "literal")
    rule = ScalingRule::literal;
  else if (rule_name == "convolution_power")
    rule = ScalingRule::convolution_power;
  else
    throw std::invalid_argument("kernel record: unknown rule '" + rule_name +
                                "'");
  return build_kernel(base, order, rule);
}

ConvolvedKernel convolve_kernels(const KernelSpec& k, double h1, double h2,
                                 int grid_size) {
  return detail_make_convolved(k, h1, h2, grid_size, false);
}

ConvolvedKernel convolve_kernels_numeric(const KernelSpec& k, double h1,
                                         double h2, int grid_size) {
  return detail_make_convolved(k, h1, h2, grid_size, true);
}

ConvolvedKernel detail_make_convolved(const KernelSpec& k, double h1,
                                      double h2, int grid_size,
                                      bool force_numeric) {
  if (!(h1 > 0.0) || !(h2 > 0.0))
    throw std::invalid_argument("convolve_kernels: bandwidths must be > 0");
  if (grid_size < 9)
    throw std::invalid_argument("convolve_kernels: grid_size too small");
  // Canonical argument order makes the profile bitwise symmetric in (h1, h2).
  const double a = std::min(h1, h2);
  const double b = std::max(h1, h2);
  ConvolvedKernel c;
  c.family_ = k.base().family();
  if (k.base().has_convolution_closure() && !force_numeric) {
    c.analytic_ = true;
    for (const auto& ti : k.terms()) {
      for (const auto& tj : k.terms()) {
        const double w = ti.weight * tj.weight;
        double s;
        if (c.family_ == BaseFamily::gaussian) {
          const double sa = a * ti.scale, sb = b * tj.scale;
          s = std::sqrt(sa * sa + sb * sb);
        } else {
          s = a * ti.scale + b * tj.scale;
        }
        c.terms_.push_back({w, s});
      }
    }
    return c;
  }
  // Numeric path: profile sampled on a uniform grid, cubic interpolation.
  c.analytic_ = false;
  c.base_ = std::make_shared<BaseDensity>(k.base());
  double smax = 1.0;
  for (const auto& t : k.terms()) smax = std::max(smax, t.scale);
  const double reach =
      (c.family_ == BaseFamily::cauchy) ? 60.0 : k.base().tail_radius();
  const double w_half = reach * smax * (a + b);
  const int n = grid_size;
  c.grid_lo_ = -w_half;
  c.grid_step_ = 2.0 * w_half / (n - 1);
  c.grid_values_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = c.grid_lo_ + i * c.grid_step_;
    auto integrand = [&](double y) {
      return eval_scaled(k, a, y) * eval_scaled(k, b, x - y);
    };
    c.grid_values_[i] = quad::integrate_line(integrand, 1e-11, 1e-11).value;
  }
  return c;
}

double ConvolvedKernel::operator()(double x) const {
  if (analytic_) {
    double v = 0.0;
    for (const auto& t : terms_) v += t.weight * family_scaled(family_, t.scale, x);
    return v;
  }
  return cubic_interp(grid_values_, grid_lo_, grid_step_, x);
}

const char* to_string(BaseFamily f) {
  switch (f) {
    case BaseFamily::gaussian:
      return "gaussian";
    case BaseFamily::cauchy:
      return "cauchy";
    case BaseFamily::tabulated:
      return "tabulated";
  }
  return "?";
}

const char* to_string(ScalingRule r) {
  return r == ScalingRule::literal ? "literal" : "convolution_power";
}

}  // namespace levyest
