#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "levyest/adaptive.hpp"
#include "levyest/estimator.hpp"
#include "levyest/kernel.hpp"
#include "levyest/models.hpp"
#include "levyest/rng.hpp"

using namespace levyest;

namespace {

KernelSpec conv2() {
  return build_kernel(BaseDensity::gaussian(), 2,
                      ScalingRule::convolution_power);
}

IncrementSeries fixed_series(std::uint64_t seed, int n, double delta) {
  RngStream rng(seed);
  std::vector<double> z(n), d(n, delta);
  for (auto& v : z) v = std::abs(rng.normal()) * 0.6 + 0.05;
  return IncrementSeries(std::move(z), std::move(d));
}

// Independent nested-loop reference for the selection rule.
struct BruteSelection {
  std::vector<double> v, a, criterion;
  std::size_t best = 0;
};

BruteSelection brute_select(const IncrementSeries& data, const KernelSpec& k,
                            const std::vector<double>& hs, double c0,
                            double x0) {
  BruteSelection r;
  const double ndb = data.n_delta_bar();
  const std::size_t m = hs.size();
  r.v.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    r.v[i] = c0 * std::log(ndb) / (ndb * hs[i]);
  r.a.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double d = estimate_pair(data, k, hs[i], hs[j], x0) -
                       estimate_point(data, k, hs[j], x0).value;
      r.a[i] = std::max(r.a[i], std::max(d * d - r.v[j], 0.0));
    }
  r.criterion.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    r.criterion[i] = r.a[i] + r.v[i];
    if (r.criterion[i] < r.criterion[r.best]) r.best = i;
  }
  return r;
}

}  // namespace

TEST_CASE("bandwidth grids: built-in rules, default M, validation") {
  auto t = BandwidthGrid::theory(4);
  CHECK(t.values() == std::vector<double>{0.25, 0.5, 0.75, 1.0});
  CHECK(t.rule() == "theory");
  auto s = BandwidthGrid::simulation(4);
  CHECK(s.values() == std::vector<double>{0.125, 0.25, 0.375, 0.5});
  CHECK(s.rule() == "simulation");

  CHECK(BandwidthGrid::default_m(2500.0) == 27);  // floor(2 * 2500^(1/3))
  CHECK(BandwidthGrid::default_m(10.0) == 4);
  CHECK(BandwidthGrid::default_m(0.01) == 1);  // clamped to a usable grid

  CHECK_THROWS_AS(BandwidthGrid::theory(0), std::invalid_argument);
  CHECK_THROWS_AS(BandwidthGrid::explicit_values({}), std::invalid_argument);
  CHECK_THROWS_AS(BandwidthGrid::explicit_values({0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(BandwidthGrid::explicit_values({0.5, 1.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(BandwidthGrid::explicit_values({-0.1, 0.5}),
                  std::invalid_argument);
  CHECK(BandwidthGrid::explicit_values({0.1, 0.7}).rule() == "explicit");
}

TEST_CASE("variance term: formula, monotonicity, exact linearity in C0") {
  // C0=1, n=100, delta=0.1, h=0.5 -> log(10)/5.
  CHECK(variance_term(1.0, 100, 0.1, 0.5) ==
        doctest::Approx(std::log(10.0) / 5.0).epsilon(1e-15));
  CHECK(variance_term(1.0, 100, 0.1, 0.2) > variance_term(1.0, 100, 0.1, 0.5));
  CHECK(variance_term(2.0, 100, 0.1, 0.5) ==
        2.0 * variance_term(1.0, 100, 0.1, 0.5));
  CHECK_THROWS_AS(variance_term(1.0, 10, 0.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(variance_term(1.0, 100, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("C0: oracle arithmetic, manual passthrough, error paths") {
  auto k1 = build_kernel(BaseDensity::gaussian(), 1, ScalingRule::literal);
  auto data = fixed_series(11, 30, 0.1);
  AdaptiveConfig cfg;
  cfg.c = 0.1;

  cfg.c0_mode = C0Mode::oracle;
  // Gamma(1,1): both Fourier norms equal pi, so
  // C0 = (0.1/2pi) ||K||_2^2 (2pi) = 0.1 / sqrt(4 pi).
  const double c0 =
      compute_c0(cfg, data, k1, Model::gamma_process(1.0, 1.0));
  CHECK(c0 == doctest::Approx(0.1 / std::sqrt(4.0 * std::numbers::pi))
                  .epsilon(1e-9));
  CHECK(c0 == doctest::Approx(0.028209479177).epsilon(1e-8));

  CHECK_THROWS_AS(compute_c0(cfg, data, k1), std::invalid_argument);
  CHECK_THROWS_AS(compute_c0(cfg, data, k1, Model::sqrt_jump()),
                  std::invalid_argument);

  cfg.c0_mode = C0Mode::manual;
  cfg.manual_c0 = 0.375;
  CHECK(compute_c0(cfg, data, k1) == 0.375);
  cfg.manual_c0 = 0.0;
  CHECK_THROWS_AS(compute_c0(cfg, data, k1), std::invalid_argument);

  cfg.c0_mode = C0Mode::empirical;
  cfg.c = -1.0;
  CHECK_THROWS_AS(compute_c0(cfg, data, k1), std::invalid_argument);
}

TEST_CASE("empirical norms match a direct trigonometric oracle") {
  auto data = fixed_series(12, 50, 0.1);
  const double step_req = 0.05;
  auto got = empirical_fourier_norms(data, step_req);

  const double ndb = data.n_delta_bar();
  const double u_max = std::cbrt(ndb);
  const auto n_iv =
      static_cast<std::size_t>(std::ceil(2.0 * u_max / step_req));
  const double step = 2.0 * u_max / static_cast<double>(n_iv);
  double acc1 = 0.0, acc2 = 0.0;
  for (std::size_t t = 0; t <= n_iv; ++t) {
    const double u = -u_max + step * static_cast<double>(t);
    std::complex<double> s1{0.0, 0.0}, s2{0.0, 0.0};
    for (double z : data.values()) {
      const auto e = std::polar(1.0, u * z);
      s1 += z * e;
      s2 += z * z * e;
    }
    const double w = (t == 0 || t == n_iv) ? 0.5 : 1.0;
    acc1 += w * std::abs(s2);
    acc2 += w * std::norm(s1);
  }
  CHECK(got.deriv_l1 == doctest::Approx(step * acc1 / ndb).epsilon(1e-10));
  CHECK(got.l2_sq ==
        doctest::Approx(step * acc2 / (ndb * ndb)).epsilon(1e-10));
}

TEST_CASE("empirical norms on gamma data approach the closed forms") {
  // Both norms are pi for this model. n*delta = 1e4 with a small delta: the
  // modulus of the noisy Fourier sum inflates the first norm by ~14%, and a
  // coarser delta adds a (1+delta) factor on top, so the split matters.
  auto model = Model::gamma_process(1.0, 1.0);
  FourierNorms mean;
  for (std::uint64_t seed : {2024, 2025}) {
    auto data = sample_increments(model, RegularScheme{0.02, 500000}, seed);
    auto norms = empirical_fourier_norms(data);
    mean.deriv_l1 += norms.deriv_l1 / 2.0;
    mean.l2_sq += norms.l2_sq / 2.0;
  }
  CHECK(std::abs(mean.deriv_l1 - std::numbers::pi) < 0.15 * std::numbers::pi);
  CHECK(std::abs(mean.l2_sq - std::numbers::pi) < 0.15 * std::numbers::pi);
}

TEST_CASE("degenerate data: all-zero increments cannot calibrate C0") {
  IncrementSeries zeros({0.0, 0.0, 0.0, 0.0}, {0.5, 0.5, 0.5, 0.5});
  AdaptiveConfig cfg;
  cfg.c0_mode = C0Mode::empirical;
  auto k = conv2();
  CHECK_THROWS_AS(compute_c0(cfg, zeros, k), degenerate_c0_error);
  CHECK_THROWS_AS(select_bandwidth(zeros, k, cfg, 0.5), degenerate_c0_error);
}

TEST_CASE("bias proxy matches the nested-loop oracle on a 20-point dataset") {
  auto k = conv2();
  auto data = fixed_series(13, 20, 0.1);
  auto grid = BandwidthGrid::explicit_values({0.2, 0.45, 0.8});
  const double c0 = 0.02;
  auto brute = brute_select(data, k, grid.values(), c0, 0.7);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a =
        bias_proxy_a(data, k, grid, 0.7, grid.values()[i], brute.v);
    CHECK(a >= 0.0);
    CHECK(std::abs(a - brute.a[i]) <= 1e-12 * std::max(1.0, brute.a[i]));
  }

  // Singleton grid: one-term supremum, still nonnegative.
  auto single = BandwidthGrid::explicit_values({0.45});
  const double a1 = bias_proxy_a(data, k, single, 0.7, 0.45, {brute.v[1]});
  const double d = estimate_pair(data, k, 0.45, 0.45, 0.7) -
                   estimate_point(data, k, 0.45, 0.7).value;
  CHECK(a1 == doctest::Approx(std::max(d * d - brute.v[1], 0.0)));

  CHECK_THROWS_AS(bias_proxy_a(data, k, grid, 0.7, 0.45, {1.0}),
                  std::invalid_argument);
}

TEST_CASE("bandwidth selection agrees with brute force and breaks ties low") {
  auto k = conv2();
  auto data = fixed_series(14, 50, 0.1);
  AdaptiveConfig cfg;
  cfg.grid = BandwidthGrid::explicit_values({0.15, 0.3, 0.45, 0.6, 0.9});
  cfg.c0_mode = C0Mode::manual;
  cfg.manual_c0 = 0.03;

  for (double x0 : {0.2, 0.5, 0.9, 1.4}) {
    auto tr = select_bandwidth(data, k, cfg, x0);
    auto brute = brute_select(data, k, cfg.grid.values(), cfg.manual_c0, x0);
    CHECK(tr.h_hat == cfg.grid.values()[brute.best]);
    REQUIRE(tr.rows.size() == 5);
    int chosen_count = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(std::abs(tr.rows[i].a - brute.a[i]) <=
            1e-12 * std::max(1.0, std::abs(brute.a[i])));
      CHECK(tr.rows[i].v == doctest::Approx(brute.v[i]).epsilon(1e-14));
      CHECK(tr.rows[i].criterion >= tr.rows[brute.best].criterion);
      chosen_count += tr.rows[i].chosen ? 1 : 0;
    }
    CHECK(chosen_count == 1);
    CHECK(tr.estimate ==
          estimate_point(data, k, tr.h_hat, x0).value);
    if (x0 != 0.0) CHECK(*tr.levy_value == tr.estimate / x0);
  }

  // Inflating C0 makes V dominate, pushing the choice to the largest h.
  cfg.manual_c0 = 0.03e6;
  CHECK(select_bandwidth(data, k, cfg, 0.5).h_hat == 0.9);

  // Singleton grid returns its only candidate.
  cfg.manual_c0 = 0.03;
  cfg.grid = BandwidthGrid::explicit_values({0.4});
  CHECK(select_bandwidth(data, k, cfg, 0.5).h_hat == 0.4);
}

TEST_CASE("adaptive curve: elementwise agreement and empty input") {
  auto k = conv2();
  auto data = fixed_series(15, 50, 0.1);
  AdaptiveConfig cfg;
  cfg.grid = BandwidthGrid::simulation(5);
  cfg.c0_mode = C0Mode::manual;
  cfg.manual_c0 = 0.03;

  CHECK(adaptive_curve(data, k, cfg, {}).empty());

  std::vector<double> pts = {0.1, 0.4, 0.7, 1.0, 1.3};
  auto traces = adaptive_curve(data, k, cfg, pts);
  REQUIRE(traces.size() == pts.size());
  for (std::size_t p = 0; p < pts.size(); ++p) {
    auto solo = select_bandwidth(data, k, cfg, pts[p]);
    CHECK(traces[p].x0 == pts[p]);
    CHECK(traces[p].h_hat == solo.h_hat);
    CHECK(traces[p].estimate == solo.estimate);
  }
}

TEST_CASE("fft-backed selection matches the direct tables") {
  auto k = conv2();
  auto data = fixed_series(16, 200, 0.05);
  std::vector<double> pts(12);
  for (int i = 0; i < 12; ++i) pts[i] = 0.1 + 0.12 * i;

  AdaptiveConfig cfg;
  cfg.grid = BandwidthGrid::simulation(6);
  cfg.c0_mode = C0Mode::manual;
  cfg.manual_c0 = 0.03;
  cfg.path = CurvePath::direct;
  auto direct = adaptive_curve(data, k, cfg, pts);
  cfg.path = CurvePath::fft;
  auto fast = adaptive_curve(data, k, cfg, pts);

  REQUIRE(fast.size() == direct.size());
  for (std::size_t p = 0; p < pts.size(); ++p) {
    CHECK(fast[p].h_hat == direct[p].h_hat);
    CHECK(std::abs(fast[p].estimate - direct[p].estimate) <=
          1e-6 * std::max(1.0, std::abs(direct[p].estimate)));
    for (std::size_t i = 0; i < cfg.grid.size(); ++i)
      CHECK(std::abs(fast[p].rows[i].a - direct[p].rows[i].a) <=
            1e-6 * std::max(1.0, direct[p].rows[i].a));
  }
}

TEST_CASE("empirical C0 concentrates across replications") {
  auto model = Model::gamma_process(1.0, 1.0);
  auto k = conv2();
  AdaptiveConfig cfg;
  cfg.c0_mode = C0Mode::empirical;
  cfg.c = 0.1;

  std::vector<double> c0s;
  for (int rep = 0; rep < 50; ++rep) {
    auto data = sample_increments(model, RegularScheme{0.2, 50000},
                                  9000 + static_cast<std::uint64_t>(rep));
    c0s.push_back(compute_c0(cfg, data, k));
  }
  double mean = 0.0;
  for (double v : c0s) mean += v;
  mean /= static_cast<double>(c0s.size());
  double var = 0.0;
  for (double v : c0s) var += (v - mean) * (v - mean);
  var /= static_cast<double>(c0s.size() - 1);
  CHECK(mean > 0.0);
  CHECK(std::sqrt(var) / mean < 0.2);
}
