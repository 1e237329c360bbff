#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "afrelay/scaling.hpp"

#include <boost/math/special_functions/digamma.hpp>

#include <cmath>

using namespace afrelay;
using namespace afrelay::scaling;
using network::MuLognormal;
using network::PowerConstant;
using network::PowerGeometric;
using numerics::Rational;

namespace {

NetworkConfig unit_config(std::size_t d, GainKind gain) {
  NetworkConfig cfg;
  cfg.d = d;
  cfg.n = 60;
  cfg.gain = gain;
  return cfg;
}

double psi(double x) { return boost::math::digamma(x); }

}  // namespace

TEST_CASE("fixed gain closed form at unit parameters") {
  auto r = exponents_closed_form(unit_config(4, GainKind::fixed));
  CHECK(r.method == ExponentMethod::closed_form_fixed);
  CHECK(r.L_value == doctest::Approx(std::log(1.0 / 8)).epsilon(1e-15));
  const double psi4 = 11.0 / 6 - 0.57721566490153286;
  CHECK(r.lambda_H[0] == doctest::Approx(0.5 * (std::log(1.0 / 8) + psi4)).epsilon(1e-15));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(r.lambda_Q[i] == std::max(0.0, r.lambda_H[i]));
    CHECK(r.lambda_gamma[i] == std::min(0.0, 2 * r.lambda_H[i]));
  }
}

TEST_CASE("spectrum gaps do not depend on gain, mu or power") {
  for (GainKind gain : {GainKind::fixed, GainKind::variable})
    for (std::size_t d : {1u, 2u, 3u, 5u, 8u})
      for (double mu : {0.3, 1.0, 4.0}) {
        auto cfg = unit_config(d, gain);
        cfg.mu = network::MuConstant{mu};
        cfg.power = PowerConstant{2.5};
        auto r = exponents_closed_form(cfg);
        for (std::size_t i = 1; i < d; ++i)
          CHECK(r.lambda_H[i - 1] - r.lambda_H[i] == doctest::Approx(1.0 / (2.0 * static_cast<double>(d - i))).epsilon(1e-13));
      }
}

TEST_CASE("variable gain quadrature matches monte carlo") {
  // E log(v^2 mu) with |H|_F^2 ~ mu Gamma(d^2, 1), by 10^7 direct draws.
  const std::size_t d = 3;
  const double mu = 1, p = 1, n0 = 1;
  auto r = exponents_closed_form(unit_config(d, GainKind::variable));
  CHECK(r.method == ExponentMethod::quadrature_variable);
  numerics::Rng rng(77);
  const int draws = 10000000;
  double s = 0;
  const double D = static_cast<double>(d);
  for (int k = 0; k < draws; ++k) {
    double f2 = 0;
    for (std::size_t e = 0; e < d * d; ++e) f2 += numerics::abs2(numerics::sample_complex_gaussian(mu, rng));
    s += std::log(p / ((p / D) * f2 + D * n0) * mu);
  }
  const double mc = s / draws;
  CHECK(std::abs(r.L_value - mc) / std::abs(mc) < 5e-4);
}

TEST_CASE("geometric schedules") {
  auto cfg = unit_config(4, GainKind::fixed);
  cfg.power = PowerGeometric{1.0, 3.0};
  CHECK(exponents_closed_form(cfg).L_value == doctest::Approx(std::log(3.0 / 4)).epsilon(1e-15));
  CHECK(growth_rate(cfg) == doctest::Approx(std::log(3.0)));
  cfg.gain = GainKind::variable;
  CHECK(exponents_closed_form(cfg).L_value == doctest::Approx(std::log(3.0) + std::log(4.0) - psi(16)).epsilon(1e-14));
  cfg.power = PowerGeometric{1.0, 0.5};
  CHECK_THROWS_AS(exponents_closed_form(cfg), ConfigError);
  CHECK_THROWS_AS(growth_rate(cfg), ConfigError);
  cfg.power = PowerGeometric{1.0, 1.0};
  CHECK(exponents_closed_form(cfg).L_value == doctest::Approx(exponents_closed_form(unit_config(4, GainKind::variable)).L_value));
}

TEST_CASE("finite horizon average approaches the limit") {
  auto cfg = unit_config(3, GainKind::fixed);
  cfg.power = PowerGeometric{1.0, 2.0};
  const double limit = exponents_closed_form(cfg).L_value;
  const double e100 = std::abs(L_horizon(cfg, 100) - limit);
  const double e1000 = std::abs(L_horizon(cfg, 1000) - limit);
  CHECK(e1000 < e100);
  CHECK(e1000 < 1e-2);
}

TEST_CASE("log-normal mu uses monte carlo") {
  auto cfg = unit_config(3, GainKind::variable);
  cfg.mu = MuLognormal{0.0, 1.0};
  auto r = exponents_closed_form(cfg);
  CHECK(r.method == ExponentMethod::monte_carlo_variable);
  CHECK(r.L_stderr > 0);
  cfg.gain = GainKind::fixed;
  auto f = exponents_closed_form(cfg);
  CHECK(f.method == ExponentMethod::monte_carlo_fixed);
  CHECK(to_string(f.method) == "monte-carlo-fixed");
}

TEST_CASE("power correction terms") {
  CHECK(fixed_power_correction(1) == doctest::Approx(0.57721566490153286).epsilon(1e-15));
  CHECK(variable_power_correction(1) == doctest::Approx(0.0));
  for (std::size_t d = 1; d <= 64; ++d) {
    CHECK(fixed_power_correction(d) >= 0);
    CHECK(variable_power_correction(d) >= -1e-15);
    CHECK(fixed_power_correction(d) >= variable_power_correction(d));
  }
  auto b = power_growth_bounds(-1.0, -1.0, 4);
  CHECK(b.fixed == 0);
  CHECK(b.variable == 0);
  b = power_growth_bounds(0.1, 0.1, 4);
  CHECK(b.fixed == doctest::Approx(0.2 + std::log(4.0) - psi(4)));
  CHECK(b.variable == doctest::Approx(0.2 + psi(16) - psi(4) - std::log(4.0)));
}

TEST_CASE("upper bounds") {
  // Fixed gain, constant power, vanishing noise: the bound is attained.
  auto cfg = unit_config(4, GainKind::fixed);
  cfg.n0 = 1e-12;
  auto r = exponents_closed_form(cfg);
  auto ub = lyap_upper_bounds(cfg);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(r.lambda_H[i] <= ub[i]);
    CHECK(ub[i] - r.lambda_H[i] < 1e-11);
  }
  // Variable gain bound with rho = 0.
  auto v = lyap_upper_bounds(GainKind::variable, 3, 0.0);
  for (std::size_t j = 1; j <= 3; ++j)
    CHECK(v[j - 1] == doctest::Approx(0.5 * (std::log(3.0) - psi(9) + psi(static_cast<double>(4 - j)))));
}

TEST_CASE("variable gain bound gap shrinks with power") {
  double prev = std::numeric_limits<double>::infinity();
  for (double p : {1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6}) {
    auto cfg = unit_config(3, GainKind::variable);
    cfg.power = PowerConstant{p};
    cfg.p0 = p;
    auto r = exponents_closed_form(cfg);
    auto ub = lyap_upper_bounds(cfg);
    const double gap = ub[0] - r.lambda_H[0];
    CHECK(gap >= 0);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("lyapunov differences") {
  auto a = lyapunov_difference(0.3, 0.1);
  CHECK(a.phi == 0);
  CHECK(a.regime == DifferenceRegime::both_nonneg);
  auto b = lyapunov_difference(-0.1, -0.4);
  CHECK(b.phi == doctest::Approx(0.6));
  CHECK(b.regime == DifferenceRegime::both_nonpos);
  auto c = lyapunov_difference(0.2, -0.3);
  CHECK(c.phi == doctest::Approx(0.6));
  CHECK(c.regime == DifferenceRegime::straddling);
  CHECK_THROWS_AS(lyapunov_difference(0.1, 0.2), std::invalid_argument);

  // 0 <= phi <= 2 (lambda_i - lambda_j), with equality where the regimes say.
  for (double li = -2; li <= 2; li += 0.125)
    for (double lj = -2; lj <= li; lj += 0.125) {
      auto diff = lyapunov_difference(li, lj);
      const double upper = 2 * (li - lj);
      CHECK(diff.phi >= 0);
      CHECK(diff.phi <= upper + 1e-15);
      if (lj >= 0) CHECK(diff.phi == 0);
      if (li <= 0) CHECK(diff.phi == doctest::Approx(upper));
      if (li > 0 && lj < 0) CHECK(diff.phi < upper);
    }
}

TEST_CASE("harmonic spread") {
  CHECK(phi_bar_exact(4, 1, 2) == Rational(1, 3));
  CHECK(phi_bar_exact(4, 1, 4) == Rational(11, 6));
  CHECK_THROWS_AS(phi_bar_exact(4, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(phi_bar_exact(4, 1, 5), std::invalid_argument);
  for (std::size_t d = 2; d <= 40; ++d)
    for (std::size_t i = 1; i < d; ++i)
      for (std::size_t j = i + 1; j <= d; ++j) {
        const Rational v = phi_bar_exact(d, i, j);
        CHECK(v >= Rational(j - i, d - i));
        CHECK(v <= Rational(j - i, d - j + 1));
      }
  // (j - i)/d + O(1/d^2): d^2 times the remainder stays bounded.
  for (std::size_t i : {1u, 2u})
    for (std::size_t j : {3u, 5u}) {
      double worst = 0;
      for (std::size_t d : {16u, 64u, 256u}) {
        const double dd = static_cast<double>(d);
        const double rem = phi_bar_exact(d, i, j).convert_to<double>() - static_cast<double>(j - i) / dd;
        worst = std::max(worst, std::abs(rem) * dd * dd);
      }
      CHECK(worst < 2.0 * static_cast<double>(j * j));
    }
}

TEST_CASE("difference report follows the exponents") {
  auto r = exponents_closed_form(unit_config(4, GainKind::fixed));
  auto rep = difference_report(r);
  CHECK(rep.phi_bar[0][3] == doctest::Approx(11.0 / 6));
  // All exponents negative here, so phi equals phi_bar.
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      CHECK(rep.regime[i][j] == DifferenceRegime::both_nonpos);
      CHECK(rep.phi[i][j] == doctest::Approx(rep.phi_bar[i][j]).epsilon(1e-13));
    }
}

TEST_CASE("antenna scaling regimes") {
  CHECK(scaling_regime(AntennaGrowth::superlinear) == ScalingRegime::vanishing);
  CHECK(scaling_regime(AntennaGrowth::linear) == ScalingRegime::bounded);
  CHECK(scaling_regime(AntennaGrowth::sublinear) == ScalingRegime::divergent);
  CHECK(scaling_regime(AntennaGrowth::constant, DifferenceRegime::straddling) == ScalingRegime::divergent);
  CHECK(scaling_regime(AntennaGrowth::constant, DifferenceRegime::both_nonneg) == ScalingRegime::vanishing);
  CHECK_THROWS_AS(parse_antenna_growth("cubic"), std::invalid_argument);
}

TEST_CASE("predicted nu slopes") {
  // d = 3 with every exponent non-positive: adjacent slope 1/(d - i).
  auto r = exponents_closed_form(unit_config(3, GainKind::fixed));
  CHECK(predict_nu_slope(r, 1, 2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(predict_nu_slope(r, 2, 3) == doctest::Approx(1.0).epsilon(1e-14));

  // Straddling pair: -2 lambda_{i+1} <= 1/(d-i).
  auto s = exponents_from_L(3, -psi(3) + 0.2, ExponentMethod::closed_form_fixed);
  REQUIRE(s.lambda_H[0] > 0);
  REQUIRE(s.lambda_H[1] < 0);
  CHECK(predict_nu_slope(s, 1, 2) == doctest::Approx(-2 * s.lambda_H[1]));
  CHECK(predict_nu_slope(s, 1, 2) <= 0.5);

  // lambda_1 = 0: nu_{1,i} grows at H_{d-1} - H_{d-i}.
  for (std::size_t d : {3u, 4u, 6u}) {
    auto z = exponents_from_L(d, -psi(static_cast<double>(d)), ExponentMethod::closed_form_fixed);
    for (std::size_t i = 2; i <= d; ++i)
      CHECK(predict_nu_slope(z, 1, i) == doctest::Approx(phi_bar_exact(d, 1, i).convert_to<double>()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(predict_nu_slope(r, 2, 2), std::invalid_argument);
}

TEST_CASE("stream cost") {
  CHECK(stream_cost(4, 1, 10) == doctest::Approx(std::exp(10.0 / 3)));
  for (std::size_t i = 2; i < 6; ++i) CHECK(stream_cost(6, i, 10) > stream_cost(6, i - 1, 10));
  CHECK(stream_cost(100000, 1, 10) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(stream_cost(4, 4, 10), std::invalid_argument);
}

TEST_CASE("power growth design") {
  DesignRequest req;
  req.d = 4;
  req.n0 = 0;
  auto exact = design_power_growth(req);
  CHECK(exact.growth == doctest::Approx(4.0 * std::exp(-psi(4))).epsilon(1e-14));

  req.n0 = 1;
  req.horizon = 2000;
  auto fixed = design_power_growth(req);
  CHECK(std::abs(fixed.lambda_at_growth) < 1e-10);
  CHECK(std::log(fixed.asymptotic_growth) == doctest::Approx(std::log(4.0) - psi(4)).epsilon(1e-14));
  CHECK(std::abs(std::log(fixed.growth) - (std::log(4.0) - psi(4))) < 0.01);
  req.horizon = 200;
  auto shorter = design_power_growth(req);
  CHECK(std::abs(std::log(shorter.growth) - std::log(fixed.asymptotic_growth)) >
        std::abs(std::log(fixed.growth) - std::log(fixed.asymptotic_growth)));

  // Closed-form exponent at the designed growth is zero in the limit.
  NetworkConfig cfg = unit_config(4, GainKind::fixed);
  cfg.power = PowerGeometric{1.0, fixed.asymptotic_growth};
  CHECK(std::abs(exponents_closed_form(cfg).lambda_H[0]) < 1e-14);

  req.horizon = 2000;
  req.gain = GainKind::variable;
  auto variable = design_power_growth(req);
  CHECK(variable.growth <= fixed.growth);
  CHECK(std::abs(variable.lambda_at_growth) < 1e-10);

  // Heavy noise over a short horizon: no growth in the bracket reaches zero.
  req.gain = GainKind::fixed;
  req.n0 = 1e6;
  req.horizon = 5;
  CHECK_THROWS_AS(design_power_growth(req), std::domain_error);
}
