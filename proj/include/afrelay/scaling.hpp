#pragma once

#include "afrelay/network.hpp"
#include "afrelay/numerics/special.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace afrelay::scaling {

using network::GainKind;
using network::NetworkConfig;
using numerics::Rational;

enum class ExponentMethod { closed_form_fixed, quadrature_variable, monte_carlo_variable, monte_carlo_fixed };

std::string to_string(ExponentMethod m);

struct ExponentReport {
  std::vector<double> lambda_H;      // descending
  std::vector<double> lambda_Q;      // max(0, lambda_H)
  std::vector<double> lambda_gamma;  // min(0, 2 lambda_H)
  double L_value = 0;                // lim (1/n) sum log(alpha_j^2 mu_j)
  double L_stderr = 0;               // nonzero only for Monte Carlo
  ExponentMethod method = ExponentMethod::closed_form_fixed;
};

struct LimitOptions {
  std::size_t quadrature_nodes = 64;
  std::size_t monte_carlo_draws = 400000;
  std::uint64_t monte_carlo_seed = 0x5eed;
};

/// Exponents from ½(L + psi(d-i+1)).
ExponentReport exponents_closed_form(const NetworkConfig& cfg, const LimitOptions& opt = {});

/// Builds a report from a given L (shared by the closed form and callers that
/// compute L themselves).
ExponentReport exponents_from_L(std::size_t d, double L, ExponentMethod method, double L_stderr = 0);

/// L as the average over hops 1..horizon instead of the limit.
double L_horizon(const NetworkConfig& cfg, std::size_t horizon, const LimitOptions& opt = {});

/// lim (1/n) log(p_n/p_0). Throws ConfigError for a decaying geometric schedule.
double growth_rate(const NetworkConfig& cfg);

/// log d - psi(d) and psi(d^2) - psi(d) - log d.
double fixed_power_correction(std::size_t d);
double variable_power_correction(std::size_t d);

struct PowerGrowthBounds {
  double fixed = 0;
  double variable = 0;
};

PowerGrowthBounds power_growth_bounds(double lambda_fixed_1, double lambda_variable_1, std::size_t d);
/// Evaluates the top exponent of cfg under both gain strategies.
PowerGrowthBounds power_growth_bounds(const NetworkConfig& cfg, const LimitOptions& opt = {});

/// Upper bounds on lambda_H,j, j = 1..d, for the given strategy and power growth rate.
std::vector<double> lyap_upper_bounds(GainKind gain, std::size_t d, double rho);
std::vector<double> lyap_upper_bounds(const NetworkConfig& cfg);

enum class DifferenceRegime { both_nonneg, both_nonpos, straddling };

std::string to_string(DifferenceRegime r);

struct Difference {
  double phi = 0;
  DifferenceRegime regime = DifferenceRegime::both_nonneg;
};

/// Requires lambda_i >= lambda_j.
Difference lyapunov_difference(double lambda_i, double lambda_j);

/// H_{d-i} - H_{d-j}, 1 <= i < j <= d.
Rational phi_bar_exact(std::size_t d, std::size_t i, std::size_t j);

struct DifferenceReport {
  // Indexed [i-1][j-1]; only entries with i < j are meaningful.
  std::vector<std::vector<double>> phi;
  std::vector<std::vector<double>> phi_bar;
  std::vector<std::vector<DifferenceRegime>> regime;
};

DifferenceReport difference_report(const ExponentReport& report);

enum class AntennaGrowth { constant, sublinear, linear, superlinear };
enum class ScalingRegime { vanishing, bounded, divergent };

std::string to_string(ScalingRegime r);
AntennaGrowth parse_antenna_growth(const std::string& s);

/// Behaviour of n * phi_{i,j} as n grows with d = d(n). `pair` is the sign
/// regime of (lambda_i, lambda_j) when known; two non-negative exponents have
/// phi = 0 and never diverge.
ScalingRegime scaling_regime(AntennaGrowth growth, std::optional<DifferenceRegime> pair = std::nullopt);

/// Predicted exponential growth rate of nu_{i,j,n} = c_{n,i}/c_{n,j} (1-based i < j).
double predict_nu_slope(const ExponentReport& report, std::size_t i, std::size_t j);

/// exp(n / (d - i)).
double stream_cost(std::size_t d, std::size_t i, double n);

struct DesignRequest {
  std::size_t d = 1;
  double mu = 1;
  double n0 = 1;
  double p0 = 1;
  GainKind gain = GainKind::fixed;
  std::size_t target_index = 1;
  std::size_t horizon = 1000;
};

struct DesignResult {
  double growth = 1;           // g, with p_j = p0 g^j
  double asymptotic_growth = 1;  // root of the n -> infinity limit
  double lambda_at_growth = 0;   // horizon-average exponent at g
};

/// Geometric growth g in [1, 4d] making the target exponent vanish on the
/// horizon average. Throws std::domain_error with the attainable range if no
/// root lies in the bracket.
DesignResult design_power_growth(const DesignRequest& req, const LimitOptions& opt = {});

}  // namespace afrelay::scaling
