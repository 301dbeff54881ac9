#include "levyest/estimator.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levyest {

namespace {

bool uniform_spacing(const std::vector<double>& pts, double* spacing) {
  if (pts.size() < 2) return false;
  const double d = pts[1] - pts[0];
  if (!(d > 0.0)) return false;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const double di = pts[i + 1] - pts[i];
    if (std::abs(di - d) > 1e-9 * std::max(1.0, std::abs(d))) return false;
  }
  *spacing = d;
  return true;
}

int next_pow2(long long n) {
  int f = 1;
  while (f < n) f *= 2;
  return f;
}

}  // namespace

double weighted_profile_sum(const std::vector<double>& positions,
                            const std::vector<double>& weights,
                            const std::function<double(double)>& profile,
                            double x0) {
  if (positions.size() != weights.size())
    throw std::invalid_argument(
        "weighted_profile_sum: positions/weights size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < positions.size(); ++k)
    s += weights[k] * profile(x0 - positions[k]);
  return s;
}

PointEstimate estimate_point(const IncrementSeries& data, const KernelSpec& k,
                             double h, double x0) {
  if (!(h > 0.0)) throw std::invalid_argument("estimate_point: h must be > 0");
  auto profile = [&](double t) { return eval_scaled(k, h, t); };
  const double s =
      weighted_profile_sum(data.values(), data.values(), profile, x0);
  PointEstimate p;
  p.x0 = x0;
  p.h = h;
  p.value = s / data.n_delta_bar();
  if (x0 != 0.0) p.levy_value = p.value / x0;
  return p;
}

double estimate_pair(const IncrementSeries& data, const KernelSpec& k,
                     double h1, double h2, double x0) {
  ConvolvedKernel prof = convolve_kernels(k, h1, h2);
  auto profile = [&](double t) { return prof(t); };
  const double s =
      weighted_profile_sum(data.values(), data.values(), profile, x0);
  return s / data.n_delta_bar();
}

std::complex<double> estimate_fourier(const IncrementSeries& data,
                                      const KernelSpec& k, double h,
                                      double u) {
  if (!(h > 0.0))
    throw std::invalid_argument("estimate_fourier: h must be > 0");
  std::complex<double> s{0.0, 0.0};
  for (double z : data.values())
    s += z * std::complex<double>{std::cos(u * z), std::sin(u * z)};
  return kernel_fourier(k, u * h) * s / data.n_delta_bar();
}

CurveEngine::CurveEngine(const IncrementSeries& data,
                         std::vector<double> points, double min_scale,
                         const CurveOptions& opts)
    : data_(&data), points_(std::move(points)) {
  if (points_.empty())
    throw std::invalid_argument("curve engine: no evaluation points");
  if (!(min_scale > 0.0))
    throw std::invalid_argument("curve engine: min_scale must be > 0");
  if (opts.path == CurvePath::direct) return;

  double d = 0.0;
  const bool uniform = uniform_spacing(points_, &d);
  if (!uniform) {
    if (opts.path == CurvePath::fft)
      throw std::invalid_argument(
          "curve engine: fft path needs a uniform ascending grid of >= 2 "
          "points");
    return;
  }

  const auto [zmin_it, zmax_it] =
      std::minmax_element(data.values().begin(), data.values().end());
  const double zmin = *zmin_it, zmax = *zmax_it;
  const double lo = std::min(zmin, points_.front());
  const double hi = std::max(zmax, points_.back());
  const double span = std::max(hi - lo, d);

  double target = std::min(min_scale / 8.0,
                           span / static_cast<double>(opts.min_bins));
  target = std::min(target, d);
  const int m = std::max(1, static_cast<int>(std::ceil(d / target)));
  const double w = d / m;

  const double origin = points_.front();
  const long long j_data_lo =
      static_cast<long long>(std::floor((zmin - origin) / w)) - 2;
  const long long j_data_hi =
      static_cast<long long>(std::ceil((zmax - origin) / w)) + 2;
  const long long j_eval_hi =
      static_cast<long long>(points_.size() - 1) * m;
  const long long j_lo = std::min(j_data_lo, 0LL);
  const long long j_hi = std::max(j_data_hi, j_eval_hi);
  const long long n_nodes = j_hi - j_lo + 1;
  if (n_nodes > opts.max_nodes) {
    if (opts.path == CurvePath::fft)
      throw std::invalid_argument(
          "curve engine: fft lattice exceeds max_nodes; widen the pitch or "
          "use the direct path");
    return;
  }

  origin_ = origin;
  pitch_ = w;
  j_lo_ = j_lo;
  stride_ = m;
  n_nodes_ = static_cast<int>(n_nodes);
  fft_size_ = next_pow2(2 * n_nodes);

  // Cubic (4-point Lagrange) binning of the increment weights.
  std::vector<double> coeffs(static_cast<std::size_t>(n_nodes_), 0.0);
  for (double z : data.values()) {
    const double t = (z - origin_) / w - static_cast<double>(j_lo_);
    const double jf = std::floor(t);
    const auto j = static_cast<long long>(jf);
    const double s = t - jf;
    const double sm = s - 1.0, sp = s + 1.0, s2 = s - 2.0;
    const double wm1 = -s * sm * s2 / 6.0;
    const double w0 = sp * sm * s2 / 2.0;
    const double w1 = -sp * s * s2 / 2.0;
    const double w2 = sp * s * sm / 6.0;
    coeffs[static_cast<std::size_t>(j - 1)] += z * wm1;
    coeffs[static_cast<std::size_t>(j)] += z * w0;
    coeffs[static_cast<std::size_t>(j + 1)] += z * w1;
    coeffs[static_cast<std::size_t>(j + 2)] += z * w2;
  }

  std::vector<std::complex<double>> buf(static_cast<std::size_t>(fft_size_),
                                        {0.0, 0.0});
  for (int i = 0; i < n_nodes_; ++i) buf[static_cast<std::size_t>(i)] = coeffs[static_cast<std::size_t>(i)];
  coeff_spectrum_.resize(static_cast<std::size_t>(fft_size_));
  Eigen::FFT<double> fft;
  fft.fwd(coeff_spectrum_, buf);
  fft_active_ = true;
}

std::vector<double> CurveEngine::curve_direct(
    const std::function<double(double)>& profile) const {
  std::vector<double> out(points_.size());
  const double scale = 1.0 / data_->n_delta_bar();
  for (std::size_t i = 0; i < points_.size(); ++i)
    out[i] = scale * weighted_profile_sum(data_->values(), data_->values(),
                                          profile, points_[i]);
  return out;
}

std::vector<double> CurveEngine::curve(
    const std::function<double(double)>& profile) const {
  if (!fft_active_) return curve_direct(profile);

  const auto F = static_cast<std::size_t>(fft_size_);
  std::vector<std::complex<double>> kbuf(F, {0.0, 0.0});
  kbuf[0] = profile(0.0);
  for (int l = 1; l < n_nodes_; ++l) {
    kbuf[static_cast<std::size_t>(l)] = profile(l * pitch_);
    kbuf[F - static_cast<std::size_t>(l)] = profile(-l * pitch_);
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> kspec(F);
  fft.fwd(kspec, kbuf);
  for (std::size_t i = 0; i < F; ++i) kspec[i] *= coeff_spectrum_[i];
  std::vector<std::complex<double>> conv(F);
  fft.inv(conv, kspec);

  std::vector<double> out(points_.size());
  const double scale = 1.0 / data_->n_delta_bar();
  for (std::size_t e = 0; e < points_.size(); ++e) {
    const long long idx = static_cast<long long>(e) * stride_ - j_lo_;
    out[e] = scale * conv[static_cast<std::size_t>(idx)].real();
  }
  return out;
}

std::vector<PointEstimate> estimate_curve(const IncrementSeries& data,
                                          const KernelSpec& k, double h,
                                          const std::vector<double>& points,
                                          const CurveOptions& opts) {
  if (!(h > 0.0)) throw std::invalid_argument("estimate_curve: h must be > 0");
  if (points.empty()) return {};
  std::vector<double> vals;
  if (points.size() == 1 || opts.path == CurvePath::direct) {
    CurveOptions direct = opts;
    direct.path = CurvePath::direct;
    CurveEngine eng(data, points, h, direct);
    vals = eng.curve([&](double t) { return eval_scaled(k, h, t); });
  } else {
    CurveEngine eng(data, points, h, opts);
    vals = eng.curve([&](double t) { return eval_scaled(k, h, t); });
  }
  std::vector<PointEstimate> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i].x0 = points[i];
    out[i].h = h;
    out[i].value = vals[i];
    if (points[i] != 0.0) out[i].levy_value = vals[i] / points[i];
  }
  return out;
}

}  // namespace levyest
