#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include "levyest/models.hpp"
#include "levyest/quadrature.hpp"
#include "levyest/rng.hpp"

using namespace levyest;

namespace {

// Numeric Fourier transform of true_g, independent of any closed form.
std::complex<double> g_fourier_oracle(const Model& m, double u, double lo,
                                      double hi) {
  const double re =
      quad::integrate([&](double x) { return m.true_g(x) * std::cos(u * x); },
                      lo, hi, 1e-11, 1e-11, 6000)
          .value;
  const double im =
      quad::integrate([&](double x) { return m.true_g(x) * std::sin(u * x); },
                      lo, hi, 1e-11, 1e-11, 6000)
          .value;
  return {re, im};
}

struct Moments {
  double mean;
  double mean_se;
  double m2;
  double mean_abs;
  double zero_frac;
};

Moments sample_moments(const Model& m, double dt, int n, std::uint64_t seed) {
  RngStream rng(seed);
  double s = 0.0, s2 = 0.0, sa = 0.0;
  int zeros = 0;
  for (int i = 0; i < n; ++i) {
    const double z = m.sample_increment(rng, dt);
    s += z;
    s2 += z * z;
    sa += std::abs(z);
    if (z == 0.0) ++zeros;
  }
  Moments out;
  out.mean = s / n;
  const double var = s2 / n - out.mean * out.mean;
  out.mean_se = std::sqrt(std::max(var, 0.0) / n);
  out.m2 = s2 / n;
  out.mean_abs = sa / n;
  out.zero_frac = static_cast<double>(zeros) / n;
  return out;
}

}  // namespace

TEST_CASE("true_g spot values") {
  auto ex1 = Model::sqrt_jump();
  CHECK(ex1.true_g(2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ex1.true_g(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(ex1.true_g(2.0 + 1e-12) == 0.0);
  CHECK(ex1.true_g(0.0) == 0.0);
  CHECK(ex1.true_g(-0.3) == 0.0);

  auto g11 = Model::gamma_process(1.0, 1.0);
  CHECK(g11.true_g(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(g11.true_g(-0.2) == 0.0);
  auto g23 = Model::gamma_process(2.0, 3.0);
  CHECK(g23.true_g(0.5) == doctest::Approx(2.0 * std::exp(-1.5)).epsilon(1e-15));

  auto mer = Model::merton(2.0, 0.3);
  // g(jump_sd) = intensity * exp(-1/2) / sqrt(2 pi)
  CHECK(mer.true_g(0.3) ==
        doctest::Approx(2.0 * std::exp(-0.5) * 0.3989422804014327).epsilon(1e-14));
  CHECK(mer.true_g(-0.3) == doctest::Approx(-mer.true_g(0.3)).epsilon(1e-14));

  // Variance gamma against the independent C e^{-Mx}/x (x>0) jump form with
  // C = 1/nu, M = B - drift/vol^2, G = B + drift/vol^2.
  const double theta = -0.1436, sigma = 0.1213, nu = 0.1686;
  auto vg = Model::variance_gamma(theta, sigma, nu);
  const double b =
      std::sqrt(2.0 / nu + theta * theta / (sigma * sigma)) / sigma;
  const double c = 1.0 / nu;
  const double big_m = b - theta / (sigma * sigma);
  const double big_g = b + theta / (sigma * sigma);
  for (double x : {0.05, 0.3}) {
    // x N(x) with N(x) = C e^{-Mx}/x for x > 0, C e^{-G|x|}/|x| for x < 0.
    CHECK(vg.true_g(x) == doctest::Approx(c * std::exp(-big_m * x)).epsilon(1e-12));
    CHECK(vg.true_g(-x) ==
          doctest::Approx(-c * std::exp(-big_g * x)).epsilon(1e-12));
  }
  CHECK(vg.true_g(0.0) == 0.0);
}

TEST_CASE("closed-form g functionals agree with quadrature of true_g") {
  auto check_ints = [](const Model& m, double lo, double hi) {
    const double ig =
        quad::integrate([&](double x) { return m.true_g(x); }, lo, hi, 1e-11,
                        1e-11, 6000)
            .value;
    const double il1 =
        quad::integrate([&](double x) { return std::abs(m.true_g(x)); }, lo,
                        hi, 1e-11, 1e-11, 6000)
            .value;
    CHECK(m.g_integral() == doctest::Approx(ig).epsilon(1e-8));
    CHECK(m.g_l1() == doctest::Approx(il1).epsilon(1e-8));
  };
  check_ints(Model::sqrt_jump(), 1e-14, 2.0);
  check_ints(Model::gamma_process(1.0, 1.0), 0.0, 60.0);
  check_ints(Model::gamma_process(2.5, 4.0), 0.0, 30.0);
  check_ints(Model::merton(2.0, 0.3), -4.0, 4.0);
  check_ints(Model::variance_gamma(-0.1436, 0.1213, 0.1686), -3.0, 3.0);
}

TEST_CASE("merton transform: derivation fixes the jump_sd power") {
  // g*(u) must equal i * intensity * jump_sd^2 * u * exp(-jump_sd^2 u^2 / 2):
  // quadratic, not linear, in jump_sd. The numeric transform of true_g
  // decides between the two candidate formulas.
  const double lam = 2.0, d = 0.3;
  auto mer = Model::merton(lam, d);
  for (double u : {0.7, 1.9, 4.2}) {
    const auto num = g_fourier_oracle(mer, u, -4.0, 4.0);
    const double sq_form = lam * d * d * u * std::exp(-0.5 * d * d * u * u);
    const double lin_form = lam * d * u * std::exp(-0.5 * d * d * u * u);
    CHECK(std::abs(num.real()) < 1e-9);
    CHECK(num.imag() == doctest::Approx(sq_form).epsilon(1e-8));
    CHECK(std::abs(num.imag() - lin_form) > 1e-2);  // wrong power is far off
  }
}

TEST_CASE("analytic fourier norms match quadrature oracles") {
  // gamma(1,1): both norms equal pi.
  auto g11 = Model::gamma_process(1.0, 1.0);
  auto f11 = g11.analytic_fourier_norms();
  REQUIRE(f11.has_value());
  CHECK(f11->deriv_l1 == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(f11->l2_sq == doctest::Approx(std::numbers::pi).epsilon(1e-14));

  // Parseval oracle: ||g*||_2^2 = 2 pi ||g||_2^2.
  auto parseval = [](const Model& m, double lo, double hi) {
    return 2.0 * std::numbers::pi *
           quad::integrate(
               [&](double x) {
                 const double v = m.true_g(x);
                 return v * v;
               },
               lo, hi, 1e-12, 1e-12, 6000)
               .value;
  };
  CHECK(f11->l2_sq == doctest::Approx(parseval(g11, 0.0, 60.0)).epsilon(1e-9));

  auto g24 = Model::gamma_process(2.0, 4.0);
  auto f24 = g24.analytic_fourier_norms();
  CHECK(f24->l2_sq == doctest::Approx(parseval(g24, 0.0, 20.0)).epsilon(1e-9));
  CHECK(f24->deriv_l1 ==
        doctest::Approx(std::numbers::pi * 2.0 / 4.0).epsilon(1e-14));

  auto mer = Model::merton(2.0, 0.3);
  auto fm = mer.analytic_fourier_norms();
  REQUIRE(fm.has_value());
  CHECK(fm->l2_sq == doctest::Approx(parseval(mer, -4.0, 4.0)).epsilon(1e-9));
  // |(g*)'(u)| = lam d^2 |1 - d^2 u^2| exp(-d^2 u^2/2); integrate directly.
  const double lam = 2.0, d = 0.3;
  const double deriv_l1_oracle =
      quad::integrate(
          [&](double u) {
            return lam * d * d * std::abs(1.0 - d * d * u * u) *
                   std::exp(-0.5 * d * d * u * u);
          },
          -80.0, 80.0, 1e-11, 1e-11, 6000)
          .value;
  CHECK(fm->deriv_l1 == doctest::Approx(deriv_l1_oracle).epsilon(1e-9));
  CHECK(fm->deriv_l1 ==
        doctest::Approx(4.0 * lam * d * std::exp(-0.5)).epsilon(1e-14));

  CHECK(!Model::sqrt_jump().analytic_fourier_norms().has_value());
  CHECK(!Model::variance_gamma(-0.1, 0.12, 0.17).analytic_fourier_norms());
}

TEST_CASE("sampler moments match the laws they claim") {
  // gamma(1,1): E Z = dt, Var Z = dt.
  {
    auto m = Model::gamma_process(1.0, 1.0);
    auto mo = sample_moments(m, 0.05, 200000, 991);
    CHECK(std::abs(mo.mean - 0.05) < 3.0 * mo.mean_se);
    CHECK(mo.m2 == doctest::Approx(0.05 + 0.05 * 0.05).epsilon(0.02));
  }
  // sqrt_jump: unit intensity pins P(Z=0) = exp(-dt); E Z = (2/3) dt;
  // E Z^2 = 0.8 dt + (2 dt/3)^2 since int x^2 N = 4/5.
  {
    auto m = Model::sqrt_jump();
    const double dt = 0.05;
    auto mo = sample_moments(m, dt, 200000, 992);
    CHECK(std::abs(mo.mean - 2.0 / 3.0 * dt) < 3.0 * mo.mean_se);
    CHECK(mo.zero_frac == doctest::Approx(std::exp(-dt)).epsilon(0.002));
    CHECK(mo.m2 == doctest::Approx(0.8 * dt + std::pow(2.0 * dt / 3.0, 2))
                       .epsilon(0.03));
  }
  // merton(2, 0.3): P(Z=0) = exp(-2 dt); E Z = 0; E Z^2 = 2 dt 0.09.
  {
    auto m = Model::merton(2.0, 0.3);
    const double dt = 0.05;
    auto mo = sample_moments(m, dt, 200000, 993);
    CHECK(std::abs(mo.mean) < 3.0 * mo.mean_se);
    CHECK(mo.zero_frac == doctest::Approx(std::exp(-2.0 * dt)).epsilon(0.002));
    CHECK(mo.m2 == doctest::Approx(2.0 * dt * 0.09).epsilon(0.03));
  }
  // merton intensity 0: increments identically zero.
  {
    auto m = Model::merton(0.0, 0.3);
    RngStream rng(5);
    for (int i = 0; i < 100; ++i) CHECK(m.sample_increment(rng, 0.05) == 0.0);
  }
  // variance gamma: E Z = drift dt, Var Z = (vol^2 + drift^2 nu) dt.
  {
    const double theta = -0.1436, sigma = 0.1213, nu = 0.1686;
    auto m = Model::variance_gamma(theta, sigma, nu);
    const double dt = 0.05;
    auto mo = sample_moments(m, dt, 200000, 994);
    CHECK(std::abs(mo.mean - theta * dt) < 3.0 * mo.mean_se);
    const double var = (sigma * sigma + theta * theta * nu) * dt;
    CHECK(mo.m2 - mo.mean * mo.mean == doctest::Approx(var).epsilon(0.03));
  }
}

TEST_CASE("small-interval moment identities hold for every model") {
  // mean(Z)/dt near int g, and E|Z| <= 2 dt ||g||_1 with sampling slack.
  const double dt = 0.01;
  const int n = 50000;
  std::uint64_t seed = 1234;
  for (const auto& m :
       {Model::sqrt_jump(), Model::gamma_process(1.0, 1.0),
        Model::merton(2.0, 0.3), Model::variance_gamma(-0.1436, 0.1213, 0.1686)}) {
    auto mo = sample_moments(m, dt, n, seed++);
    CHECK(std::abs(mo.mean / dt - m.g_integral()) < 3.0 * mo.mean_se / dt);
    CHECK(mo.mean_abs <= 2.0 * dt * m.g_l1() * 1.05);
  }
}

TEST_CASE("schemes: construction, validation, interval lists") {
  SamplingScheme reg = RegularScheme{0.05, 4};
  auto iv = scheme_intervals(reg);
  REQUIRE(iv.size() == 4);
  for (double d : iv) CHECK(d == 0.05);

  SamplingScheme pd = PowerDecayScheme{0.1, 0.5, 3};
  auto pv = scheme_intervals(pd);
  CHECK(pv[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(pv[1] == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(pv[2] == doctest::Approx(0.1 / std::sqrt(3.0)).epsilon(1e-15));

  CHECK_THROWS_AS(validate_scheme(SamplingScheme(RegularScheme{0.0, 4})),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_scheme(SamplingScheme(RegularScheme{0.1, 0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_scheme(SamplingScheme(PowerDecayScheme{0.1, 0.2, 5})),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_scheme(SamplingScheme(PowerDecayScheme{0.1, 1.2, 5})),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      validate_scheme(SamplingScheme(IrregularScheme{{0.1, -0.1}})),
      std::invalid_argument);
  CHECK_THROWS_AS(validate_scheme(SamplingScheme(IrregularScheme{{}})),
                  std::invalid_argument);
}

TEST_CASE("increment series bookkeeping") {
  IncrementSeries s({0.1, -0.2, 0.3}, {0.05, 0.05, 0.05});
  CHECK(s.regular());
  CHECK(s.delta_bar() == 0.05);  // exact, not merely close
  CHECK(s.delta_sq_bar() == 0.05 * 0.05);
  CHECK(s.n_delta_bar() == doctest::Approx(0.15).epsilon(1e-15));

  IncrementSeries ir({1.0, 2.0}, {0.1, 0.3});
  CHECK(!ir.regular());
  CHECK(ir.delta_bar() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(ir.delta_sq_bar() == doctest::Approx(0.05).epsilon(1e-15));

  CHECK_THROWS_AS(IncrementSeries({1.0}, {0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(IncrementSeries({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(IncrementSeries({1.0}, {0.0}), std::invalid_argument);
}

TEST_CASE("sampling is deterministic in (seed, scheme) and csv round-trips") {
  auto m = Model::gamma_process(1.0, 1.0);
  SamplingScheme reg = RegularScheme{0.05, 1000};
  auto a = sample_increments(m, reg, std::uint64_t{42});
  auto b = sample_increments(m, reg, std::uint64_t{42});
  REQUIRE(a.size() == b.size());
  for (std::int64_t i = 0; i < a.size(); ++i)
    CHECK(a.values()[i] == b.values()[i]);

  auto c = sample_increments(m, reg, std::uint64_t{43});
  bool any_diff = false;
  for (std::int64_t i = 0; i < a.size(); ++i)
    any_diff = any_diff || (a.values()[i] != c.values()[i]);
  CHECK(any_diff);

  // Replication streams are independent of thread scheduling by design:
  // stream(i) depends only on (master, i).
  auto r0 = RngStream::for_replication(7, 0);
  auto r1 = RngStream::for_replication(7, 1);
  auto r0b = RngStream::for_replication(7, 0);
  CHECK(r0.uniform() == r0b.uniform());
  CHECK(r0.uniform() != r1.uniform());

  const std::string path = "test_increments.csv";
  a.to_csv(path);
  auto back = IncrementSeries::from_csv(path);
  REQUIRE(back.size() == a.size());
  for (std::int64_t i = 0; i < a.size(); ++i) {
    CHECK(back.values()[i] == a.values()[i]);
    CHECK(back.intervals()[i] == a.intervals()[i]);
  }
  CHECK(back.delta_bar() == a.delta_bar());
  std::remove(path.c_str());
}
