#include "levyest/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>

namespace levyest {
namespace {

// Flat index of the unordered pair (i, j), i <= j, in a packed triangle.
std::size_t tri_index(std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return j * (j + 1) / 2 + i;
}

}  // namespace

BandwidthGrid::BandwidthGrid(std::vector<double> values, std::string rule)
    : values_(std::move(values)), rule_(std::move(rule)) {
  if (values_.empty())
    throw std::invalid_argument("bandwidth grid: empty candidate set");
  double prev = 0.0;
  for (double h : values_) {
    if (!(h > prev))
      throw std::invalid_argument(
          "bandwidth grid: values must be strictly increasing and positive");
    if (h > 1.0)
      throw std::invalid_argument("bandwidth grid: values must lie in (0, 1]");
    prev = h;
  }
}

BandwidthGrid BandwidthGrid::theory(std::size_t m) {
  if (m < 1) throw std::invalid_argument("bandwidth grid: M must be >= 1");
  std::vector<double> v(m);
  for (std::size_t j = 1; j <= m; ++j)
    v[j - 1] = static_cast<double>(j) / static_cast<double>(m);
  return BandwidthGrid(std::move(v), "theory");
}

BandwidthGrid BandwidthGrid::simulation(std::size_t m) {
  if (m < 1) throw std::invalid_argument("bandwidth grid: M must be >= 1");
  std::vector<double> v(m);
  for (std::size_t j = 1; j <= m; ++j)
    v[j - 1] = static_cast<double>(j) / static_cast<double>(2 * m);
  return BandwidthGrid(std::move(v), "simulation");
}

BandwidthGrid BandwidthGrid::explicit_values(std::vector<double> values) {
  return BandwidthGrid(std::move(values), "explicit");
}

std::size_t BandwidthGrid::default_m(double n_delta_bar) {
  if (!(n_delta_bar > 0.0))
    throw std::invalid_argument("bandwidth grid: n*delta_bar must be > 0");
  const double m = std::floor(2.0 * std::cbrt(n_delta_bar));
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

std::string to_string(C0Mode mode) {
  switch (mode) {
    case C0Mode::oracle: return "oracle";
    case C0Mode::empirical: return "empirical";
    case C0Mode::manual: return "manual";
  }
  throw std::logic_error("unknown C0 mode");
}

FourierNorms empirical_fourier_norms(const IncrementSeries& data,
                                     double quadrature_step) {
  if (quadrature_step < 0.0)
    throw std::invalid_argument("empirical norms: negative quadrature step");
  const double ndb = data.n_delta_bar();
  if (!(ndb > 0.0))
    throw std::invalid_argument("empirical norms: n*delta_bar must be > 0");

  // Integration limit 1/h with the reference bandwidth h = (n Dbar)^{-1/3}.
  const double u_max = std::cbrt(ndb);
  double max_abs = 0.0;
  for (double z : data.values()) max_abs = std::max(max_abs, std::abs(z));
  const double step0 = quadrature_step > 0.0
                           ? quadrature_step
                           : 1.0 / (4.0 * std::max(1.0, max_abs));
  const auto n_iv = static_cast<std::size_t>(
      std::max(1.0, std::ceil(2.0 * u_max / step0)));
  if (n_iv > 50'000'000)
    throw std::invalid_argument("empirical norms: quadrature step too small");
  const double step = 2.0 * u_max / static_cast<double>(n_iv);
  const std::size_t nodes = n_iv + 1;

  // S1(u) = sum Z e^{iuZ}, S2(u) = sum Z^2 e^{iuZ}, accumulated per
  // observation with a phase recurrence along the u grid (one complex
  // multiply per node instead of a trig call).
  std::vector<std::complex<double>> s1(nodes), s2(nodes);
  for (double z : data.values()) {
    if (z == 0.0) continue;
    std::complex<double> cur = std::polar(1.0, -u_max * z);
    const std::complex<double> rot = std::polar(1.0, step * z);
    const double z2 = z * z;
    for (std::size_t t = 0; t < nodes; ++t) {
      s1[t] += z * cur;
      s2[t] += z2 * cur;
      cur *= rot;
    }
  }

  double acc_deriv = 0.0, acc_l2 = 0.0;
  for (std::size_t t = 0; t < nodes; ++t) {
    const double w = (t == 0 || t + 1 == nodes) ? 0.5 : 1.0;
    acc_deriv += w * std::abs(s2[t]);
    acc_l2 += w * std::norm(s1[t]);
  }
  FourierNorms out;
  out.deriv_l1 = step * acc_deriv / ndb;
  out.l2_sq = step * acc_l2 / (ndb * ndb);
  return out;
}

double compute_c0(const AdaptiveConfig& config, const IncrementSeries& data,
                  const KernelSpec& kernel,
                  const std::optional<Model>& model) {
  if (!(config.c > 0.0))
    throw std::invalid_argument("adaptive config: c must be > 0");

  if (config.c0_mode == C0Mode::manual) {
    if (!(config.manual_c0 > 0.0))
      throw std::invalid_argument("adaptive config: manual C0 must be > 0");
    return config.manual_c0;
  }

  FourierNorms norms;
  if (config.c0_mode == C0Mode::oracle) {
    if (!model)
      throw std::invalid_argument("C0 oracle mode: a model is required");
    const auto analytic = model->analytic_fourier_norms();
    if (!analytic)
      throw std::invalid_argument(
          "C0 oracle mode: model '" + model->name() +
          "' has no closed-form Fourier norms; use empirical or manual mode");
    norms = *analytic;
  } else {
    norms = empirical_fourier_norms(data, config.quadrature_step);
  }

  const double sum = norms.deriv_l1 + norms.l2_sq;
  if (!(sum > 0.0))
    throw degenerate_c0_error(
        "degenerate C0: the plug-in Fourier norms vanished (all-zero data?)");
  const double l2 = kernel.norms().l2;
  return config.c / (2.0 * std::numbers::pi) * (l2 * l2) * sum;
}

double variance_term(double c0, std::int64_t n, double delta_bar, double h) {
  if (!(c0 > 0.0)) throw std::invalid_argument("variance term: C0 must be > 0");
  if (!(h > 0.0)) throw std::invalid_argument("variance term: h must be > 0");
  const double ndb = delta_bar * static_cast<double>(n);
  if (!(ndb > 1.0))
    throw std::domain_error(
        "insufficient observation time: n*delta_bar must exceed 1");
  return c0 * std::log(ndb) / (ndb * h);
}

double bias_proxy_a(const IncrementSeries& data, const KernelSpec& kernel,
                    const BandwidthGrid& grid, double x0, double h,
                    const std::vector<double>& v_table) {
  if (v_table.size() != grid.size())
    throw std::invalid_argument("bias proxy: V table does not match the grid");
  double a = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double hp = grid.values()[j];
    const double d = estimate_pair(data, kernel, h, hp, x0) -
                     estimate_point(data, kernel, hp, x0).value;
    const double term = d * d - v_table[j];
    if (term > a) a = term;
  }
  return a;
}

std::vector<SelectionTrace> adaptive_curve(const IncrementSeries& data,
                                           const KernelSpec& kernel,
                                           const AdaptiveConfig& config,
                                           const std::vector<double>& points,
                                           const std::optional<Model>& model) {
  if (points.empty()) return {};
  const double c0 = compute_c0(config, data, kernel, model);

  const auto& hs = config.grid.values();
  const std::size_t m = hs.size();
  const std::size_t np = points.size();
  std::vector<double> v(m);
  for (std::size_t j = 0; j < m; ++j)
    v[j] = variance_term(c0, data.size(), data.delta_bar(), hs[j]);

  // Shared estimate tables: one curve per single bandwidth and one per
  // unordered bandwidth pair, each evaluated at every requested point.
  std::vector<std::vector<double>> single(m);
  std::vector<std::vector<double>> pairs(m * (m + 1) / 2);

  std::unique_ptr<CurveEngine> engine;
  if (config.path == CurvePath::fft ||
      (config.path == CurvePath::automatic && np >= 8)) {
    CurveOptions opts;
    opts.path = config.path;
    opts.min_bins = config.min_bins;
    auto candidate =
        std::make_unique<CurveEngine>(data, points, hs.front(), opts);
    if (candidate->fft_active()) engine = std::move(candidate);
  }

  if (engine) {
    for (std::size_t j = 0; j < m; ++j)
      single[j] = engine->curve(
          [&kernel, h = hs[j]](double t) { return eval_scaled(kernel, h, t); });
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i <= j; ++i) {
        const ConvolvedKernel prof = convolve_kernels(kernel, hs[i], hs[j]);
        pairs[tri_index(i, j)] =
            engine->curve([&prof](double t) { return prof(t); });
      }
  } else {
    for (std::size_t j = 0; j < m; ++j) {
      single[j].resize(np);
      for (std::size_t p = 0; p < np; ++p)
        single[j][p] = estimate_point(data, kernel, hs[j], points[p]).value;
    }
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i <= j; ++i) {
        auto& row = pairs[tri_index(i, j)];
        row.resize(np);
        for (std::size_t p = 0; p < np; ++p)
          row[p] = estimate_pair(data, kernel, hs[i], hs[j], points[p]);
      }
  }

  std::vector<SelectionTrace> out(np);
  for (std::size_t p = 0; p < np; ++p) {
    SelectionTrace& tr = out[p];
    tr.x0 = points[p];
    tr.c0 = c0;
    tr.rows.resize(m);
    std::size_t best = 0;
    for (std::size_t i = 0; i < m; ++i) {
      double a = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double d = pairs[tri_index(i, j)][p] - single[j][p];
        const double term = d * d - v[j];
        if (term > a) a = term;
      }
      SelectionRow& row = tr.rows[i];
      row.h = hs[i];
      row.v = v[i];
      row.a = a;
      row.criterion = a + v[i];
      if (row.criterion < tr.rows[best].criterion) best = i;
    }
    tr.rows[best].chosen = true;
    tr.h_hat = hs[best];
    tr.estimate = single[best][p];
    if (tr.x0 != 0.0) tr.levy_value = tr.estimate / tr.x0;
  }
  return out;
}

SelectionTrace select_bandwidth(const IncrementSeries& data,
                                const KernelSpec& kernel,
                                const AdaptiveConfig& config, double x0,
                                const std::optional<Model>& model) {
  return adaptive_curve(data, kernel, config, {x0}, model).front();
}

}  // namespace levyest
