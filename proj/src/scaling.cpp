#include "afrelay/scaling.hpp"

#include "afrelay/numerics/quadrature.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace afrelay::scaling {

using numerics::digamma_int;

namespace {

// Parameters of the per-hop term log(alpha^2 mu) in the n -> infinity limit:
// log(p_j/p_{j-1}) and n0/p_{j-1}.
struct PowerLimit {
  double log_ratio = 0;
  double noise = 0;
};

std::optional<PowerLimit> power_limit(const NetworkConfig& cfg) {
  if (const auto* c = std::get_if<network::PowerConstant>(&cfg.power)) return PowerLimit{0.0, cfg.n0 / c->value};
  if (const auto* g = std::get_if<network::PowerGeometric>(&cfg.power)) {
    if (g->growth < 1)
      throw ConfigError("power_schedule.geometric", "decaying power makes the exponent diverge to -infinity");
    if (g->growth == 1) return PowerLimit{0.0, cfg.n0 / g->p0};
    return PowerLimit{std::log(g->growth), 0.0};
  }
  return std::nullopt;
}

PowerLimit power_at_hop(const NetworkConfig& cfg, std::size_t j) {
  const double lp = cfg.log_power(j - 1);
  return {cfg.log_power(j) - lp, std::exp(std::log(cfg.n0) - lp)};
}

double dd(std::size_t d) { return static_cast<double>(d); }

// E log(alpha^2 mu) for one hop with known mu.
double hop_term(GainKind gain, std::size_t d, double mu, const PowerLimit& p, const numerics::GammaRule* rule) {
  const double D = dd(d);
  if (gain == GainKind::fixed) return p.log_ratio + std::log(mu) - std::log(D * mu + D * p.noise);
  // |H|_F^2 = mu G with G ~ Gamma(d^2, 1).
  if (p.noise == 0) return p.log_ratio + std::log(D) - digamma_int<double>(static_cast<std::int64_t>(d * d));
  const double q = D * p.noise;
  const double e = rule->expect([&](double g) { return std::log(mu * g / D + q); });
  return p.log_ratio + std::log(mu) - e;
}

struct MeanWithError {
  double mean = 0;
  double std_error = 0;
};

// Monte Carlo over log-normal mu; hops cycle through 1..horizon when the
// power schedule has no closed-form limit.
MeanWithError lognormal_average(const NetworkConfig& cfg, const network::MuLognormal& ln,
                                const std::optional<PowerLimit>& limit, std::size_t horizon,
                                const numerics::GammaRule* rule, const LimitOptions& opt) {
  numerics::Rng rng(opt.monte_carlo_seed);
  const std::size_t draws = opt.monte_carlo_draws;
  double sum = 0, sum2 = 0;
  for (std::size_t k = 0; k < draws; ++k) {
    const double mu = numerics::sample_lognormal(ln.a, ln.b, rng);
    const PowerLimit p = limit ? *limit : power_at_hop(cfg, k % horizon + 1);
    const double v = hop_term(cfg.gain, cfg.d, mu, p, rule);
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(draws);
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

std::optional<numerics::GammaRule> rule_for(const NetworkConfig& cfg, const LimitOptions& opt) {
  if (cfg.gain != GainKind::variable) return std::nullopt;
  return numerics::gamma_rule(dd(cfg.d * cfg.d), opt.quadrature_nodes);
}

}  // namespace

std::string to_string(ExponentMethod m) {
  switch (m) {
    case ExponentMethod::closed_form_fixed:
      return "closed-form-fixed";
    case ExponentMethod::quadrature_variable:
      return "quadrature-variable";
    case ExponentMethod::monte_carlo_variable:
      return "monte-carlo-variable";
    case ExponentMethod::monte_carlo_fixed:
      return "monte-carlo-fixed";
  }
  return "unknown";
}

ExponentReport exponents_from_L(std::size_t d, double L, ExponentMethod method, double L_stderr) {
  ExponentReport r;
  r.L_value = L;
  r.L_stderr = L_stderr;
  r.method = method;
  for (std::size_t i = 1; i <= d; ++i) {
    const double lam = 0.5 * (L + digamma_int<double>(static_cast<std::int64_t>(d - i + 1)));
    r.lambda_H.push_back(lam);
    r.lambda_Q.push_back(std::max(0.0, lam));
    r.lambda_gamma.push_back(std::min(0.0, 2 * lam));
  }
  return r;
}

double L_horizon(const NetworkConfig& cfg, std::size_t horizon, const LimitOptions& opt) {
  if (horizon < 1) throw std::invalid_argument("L_horizon: horizon must be >= 1");
  const auto rule = rule_for(cfg, opt);
  const numerics::GammaRule* rp = rule ? &*rule : nullptr;
  if (const auto* ln = std::get_if<network::MuLognormal>(&cfg.mu))
    return lognormal_average(cfg, *ln, std::nullopt, horizon, rp, opt).mean;
  double s = 0;
  for (std::size_t j = 1; j <= horizon; ++j) s += hop_term(cfg.gain, cfg.d, cfg.mu_at(j), power_at_hop(cfg, j), rp);
  return s / static_cast<double>(horizon);
}

ExponentReport exponents_closed_form(const NetworkConfig& cfg, const LimitOptions& opt) {
  cfg.validate();
  const auto limit = power_limit(cfg);
  const auto rule = rule_for(cfg, opt);
  const numerics::GammaRule* rp = rule ? &*rule : nullptr;
  const bool variable = cfg.gain == GainKind::variable;

  if (const auto* ln = std::get_if<network::MuLognormal>(&cfg.mu)) {
    auto avg = lognormal_average(cfg, *ln, limit, cfg.n, rp, opt);
    return exponents_from_L(cfg.d, avg.mean,
                            variable ? ExponentMethod::monte_carlo_variable : ExponentMethod::monte_carlo_fixed,
                            avg.std_error);
  }
  const ExponentMethod method = variable ? ExponentMethod::quadrature_variable : ExponentMethod::closed_form_fixed;
  if (limit && std::holds_alternative<network::MuConstant>(cfg.mu))
    return exponents_from_L(cfg.d, hop_term(cfg.gain, cfg.d, cfg.mu_at(1), *limit, rp), method);
  // List schedules only define a finite horizon.
  return exponents_from_L(cfg.d, L_horizon(cfg, cfg.n, opt), method);
}

double growth_rate(const NetworkConfig& cfg) {
  if (std::holds_alternative<network::PowerConstant>(cfg.power)) return 0.0;
  if (const auto* g = std::get_if<network::PowerGeometric>(&cfg.power)) {
    if (g->growth < 1) throw ConfigError("power_schedule.geometric", "decaying power has no finite exponent");
    return std::log(g->growth);
  }
  return (cfg.log_power(cfg.n) - cfg.log_power(0)) / static_cast<double>(cfg.n);
}

double fixed_power_correction(std::size_t d) { return std::log(dd(d)) - digamma_int<double>(static_cast<std::int64_t>(d)); }

double variable_power_correction(std::size_t d) {
  return digamma_int<double>(static_cast<std::int64_t>(d * d)) - digamma_int<double>(static_cast<std::int64_t>(d)) -
         std::log(dd(d));
}

PowerGrowthBounds power_growth_bounds(double lambda_fixed_1, double lambda_variable_1, std::size_t d) {
  if (d < 1) throw std::invalid_argument("power_growth_bounds: d must be >= 1");
  return {std::max(2 * lambda_fixed_1 + fixed_power_correction(d), 0.0),
          std::max(2 * lambda_variable_1 + variable_power_correction(d), 0.0)};
}

PowerGrowthBounds power_growth_bounds(const NetworkConfig& cfg, const LimitOptions& opt) {
  NetworkConfig f = cfg, v = cfg;
  f.gain = GainKind::fixed;
  v.gain = GainKind::variable;
  return power_growth_bounds(exponents_closed_form(f, opt).lambda_H.front(),
                             exponents_closed_form(v, opt).lambda_H.front(), cfg.d);
}

std::vector<double> lyap_upper_bounds(GainKind gain, std::size_t d, double rho) {
  std::vector<double> out;
  const double shift = gain == GainKind::fixed
                           ? -std::log(dd(d))
                           : std::log(dd(d)) - digamma_int<double>(static_cast<std::int64_t>(d * d));
  for (std::size_t j = 1; j <= d; ++j)
    out.push_back(0.5 * (rho + shift + digamma_int<double>(static_cast<std::int64_t>(d - j + 1))));
  return out;
}

std::vector<double> lyap_upper_bounds(const NetworkConfig& cfg) {
  cfg.validate();
  return lyap_upper_bounds(cfg.gain, cfg.d, growth_rate(cfg));
}

std::string to_string(DifferenceRegime r) {
  switch (r) {
    case DifferenceRegime::both_nonneg:
      return "both-nonneg";
    case DifferenceRegime::both_nonpos:
      return "both-nonpos";
    case DifferenceRegime::straddling:
      return "straddling";
  }
  return "unknown";
}

Difference lyapunov_difference(double lambda_i, double lambda_j) {
  if (lambda_i < lambda_j) throw std::invalid_argument("lyapunov_difference: need lambda_i >= lambda_j (i < j)");
  if (lambda_j >= 0) return {0.0, DifferenceRegime::both_nonneg};
  if (lambda_i <= 0) return {2 * (lambda_i - lambda_j), DifferenceRegime::both_nonpos};
  return {-2 * lambda_j, DifferenceRegime::straddling};
}

Rational phi_bar_exact(std::size_t d, std::size_t i, std::size_t j) {
  if (!(1 <= i && i < j && j <= d)) throw std::invalid_argument("phi_bar_exact: need 1 <= i < j <= d");
  return numerics::harmonic(d - i) - numerics::harmonic(d - j);
}

DifferenceReport difference_report(const ExponentReport& report) {
  const std::size_t d = report.lambda_H.size();
  DifferenceReport out;
  out.phi.assign(d, std::vector<double>(d, 0.0));
  out.phi_bar.assign(d, std::vector<double>(d, 0.0));
  out.regime.assign(d, std::vector<DifferenceRegime>(d, DifferenceRegime::both_nonneg));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      auto diff = lyapunov_difference(report.lambda_H[i], report.lambda_H[j]);
      out.phi[i][j] = diff.phi;
      out.regime[i][j] = diff.regime;
      out.phi_bar[i][j] = phi_bar_exact(d, i + 1, j + 1).convert_to<double>();
    }
  return out;
}

std::string to_string(ScalingRegime r) {
  switch (r) {
    case ScalingRegime::vanishing:
      return "vanishing";
    case ScalingRegime::bounded:
      return "bounded";
    case ScalingRegime::divergent:
      return "divergent";
  }
  return "unknown";
}

AntennaGrowth parse_antenna_growth(const std::string& s) {
  if (s == "constant") return AntennaGrowth::constant;
  if (s == "sublinear") return AntennaGrowth::sublinear;
  if (s == "linear") return AntennaGrowth::linear;
  if (s == "superlinear") return AntennaGrowth::superlinear;
  throw std::invalid_argument("antenna growth must be constant|sublinear|linear|superlinear, got '" + s + "'");
}

ScalingRegime scaling_regime(AntennaGrowth growth, std::optional<DifferenceRegime> pair) {
  if (pair == DifferenceRegime::both_nonneg) return ScalingRegime::vanishing;
  switch (growth) {
    case AntennaGrowth::superlinear:
      return ScalingRegime::vanishing;
    case AntennaGrowth::linear:
      return ScalingRegime::bounded;
    case AntennaGrowth::constant:
    case AntennaGrowth::sublinear:
      return ScalingRegime::divergent;
  }
  return ScalingRegime::divergent;
}

double predict_nu_slope(const ExponentReport& report, std::size_t i, std::size_t j) {
  const std::size_t d = report.lambda_H.size();
  if (!(1 <= i && i < j && j <= d)) throw std::invalid_argument("predict_nu_slope: need 1 <= i < j <= d");
  return lyapunov_difference(report.lambda_H[i - 1], report.lambda_H[j - 1]).phi;
}

double stream_cost(std::size_t d, std::size_t i, double n) {
  if (!(1 <= i && i < d)) throw std::invalid_argument("stream_cost: need 1 <= i < d");
  return std::exp(n / static_cast<double>(d - i));
}

DesignResult design_power_growth(const DesignRequest& req, const LimitOptions& opt) {
  const std::size_t d = req.d;
  const std::size_t i = req.target_index;
  if (d < 1 || i < 1 || i > d) throw std::invalid_argument("design_power_growth: need 1 <= i <= d");
  if (!(req.mu > 0) || !(req.n0 >= 0) || !(req.p0 > 0) || req.horizon < 1)
    throw std::invalid_argument("design_power_growth: need mu > 0, n0 >= 0, p0 > 0, horizon >= 1");
  const double psi_i = digamma_int<double>(static_cast<std::int64_t>(d - i + 1));
  const double log_asym = req.gain == GainKind::fixed
                              ? std::log(dd(d)) - psi_i
                              : digamma_int<double>(static_cast<std::int64_t>(d * d)) - std::log(dd(d)) - psi_i;
  DesignResult out;
  out.asymptotic_growth = std::exp(log_asym);
  if (req.n0 == 0) {
    // Without noise every hop contributes the same term, so the limit is exact.
    out.growth = out.asymptotic_growth;
    out.lambda_at_growth = 0;
    return out;
  }

  std::optional<numerics::GammaRule> rule;
  if (req.gain == GainKind::variable) rule = numerics::gamma_rule(dd(d * d), opt.quadrature_nodes);
  auto lambda_at = [&](double g) {
    double s = 0;
    double log_p = std::log(req.p0);
    for (std::size_t j = 1; j <= req.horizon; ++j) {
      PowerLimit p{std::log(g), std::exp(std::log(req.n0) - log_p)};
      s += hop_term(req.gain, d, req.mu, p, rule ? &*rule : nullptr);
      log_p += std::log(g);
    }
    return 0.5 * (s / static_cast<double>(req.horizon) + psi_i);
  };

  double lo = 1, hi = 4 * dd(d);
  const double f_lo = lambda_at(lo), f_hi = lambda_at(hi);
  if (!(f_lo <= 0 && f_hi >= 0)) {
    std::ostringstream msg;
    msg << "no growth rate in [1, " << hi << "] zeroes exponent " << i << "; attainable range is [" << f_lo << ", "
        << f_hi << "]";
    throw std::domain_error(msg.str());
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lambda_at(mid) < 0 ? lo : hi) = mid;
  }
  out.growth = 0.5 * (lo + hi);
  out.lambda_at_growth = lambda_at(out.growth);
  return out;
}

}  // namespace afrelay::scaling
