#pragma once

#include "afrelay/errors.hpp"
#include "afrelay/numerics/linalg.hpp"
#include "afrelay/numerics/random.hpp"
#include "afrelay/rds.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace afrelay::network {

using numerics::BigFloat;
using numerics::Matrix;
using numerics::PrecisionConfig;
using numerics::Rng;
using numerics::Vector;

enum class GainKind { fixed, variable };

struct MuConstant {
  double value = 1;
};
struct MuList {
  std::vector<double> values;  // mu_1 .. mu_n
};
struct MuLognormal {
  double a = 0;
  double b = 1;
};
using MuSchedule = std::variant<MuConstant, MuList, MuLognormal>;

struct PowerConstant {
  double value = 1;  // p_j for j >= 1
};
struct PowerGeometric {
  double p0 = 1;
  double growth = 1;  // p_j = p0 * growth^j
};
struct PowerList {
  std::vector<double> values;  // p_0 .. p_n
};
using PowerSchedule = std::variant<PowerConstant, PowerGeometric, PowerList>;

enum class SourceKind { gaussian, unit_modulus };

struct NetworkConfig {
  std::size_t d = 1;
  std::size_t n = 1;
  GainKind gain = GainKind::fixed;
  MuSchedule mu = MuConstant{};
  PowerSchedule power = PowerConstant{};
  double n0 = 1;
  double p0 = 1;
  std::uint64_t seed = 0;
  PrecisionConfig precision{};
  SourceKind source = SourceKind::gaussian;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  /// log p_j, j = 0..n (geometric schedules extend past n).
  double log_power(std::size_t j) const;
  /// mu_j for deterministic schedules; throws for log-normal.
  double mu_at(std::size_t j) const;
  bool random_mu() const { return std::holds_alternative<MuLognormal>(mu); }
};

std::string to_string(GainKind g);
GainKind parse_gain(const std::string& s);

/// sqrt(p_j / (p_{j-1} d mu_j + d n0)).
double gain_fixed(double p_j, double p_jm1, std::size_t d, double mu_j, double n0);

/// sqrt(p_j / ((p_{j-1}/d) |H_j|_F^2 + d n0)).
template <class Real>
Real gain_variable(double p_j, double p_jm1, std::size_t d, const Matrix<Real>& H, double n0);

/// Squared gain for hop j >= 1, written in terms of p_j/p_{j-1} and
/// n0/p_{j-1} so geometric schedules never overflow.
template <class Real>
Real gain_squared(const NetworkConfig& cfg, std::size_t j, double mu_j, const Matrix<Real>& H);

template <class Real>
struct HopDraw {
  Matrix<Real> H;
  Vector<Real> Z;  // V / sqrt(n0)
  Real alpha = 0;
  double mu = 1;
};

/// Draw order per hop: mu (if random), H row by row, then Z.
template <class Real>
HopDraw<Real> draw_hop(const NetworkConfig& cfg, std::size_t j, Rng& rng);

/// X_0 with i.i.d. zero-mean entries of power p0/d.
template <class Real>
Vector<Real> draw_source(const NetworkConfig& cfg, Rng& rng);

/// R_I and R_N as unit-Frobenius representatives with log scale factors.
/// R_N starts at 0 so that the first hop yields n0 I.
template <class Real>
class CovariancePair {
 public:
  static CovariancePair initial(std::size_t d, double p0);

  /// R_I <- a^2 H R_I H^H, R_N <- n0 I + a^2 H R_N H^H.
  void step(const Matrix<Real>& H, const Real& alpha, double n0);

  /// log E_i(R_I R_N^-1), descending, by Cholesky whitening.
  std::vector<Real> eigen_snr() const;

  Matrix<Real> RI() const;  // unscaled (may overflow for long chains)
  Matrix<Real> RN() const;

  const Matrix<Real>& RI_hat() const { return ri_hat_; }
  const Matrix<Real>& RN_hat() const { return rn_hat_; }
  Real logscale_I() const { return log_i_; }
  Real logscale_N() const { return log_n_; }
  bool information_vanished() const { return ri_zero_; }
  bool noise_empty() const { return rn_zero_; }

 private:
  Matrix<Real> ri_hat_, rn_hat_;
  Real log_i_ = 0, log_n_ = 0;
  bool ri_zero_ = false;
  bool rn_zero_ = true;
};

/// Double-precision SNR route. Keeps the information product as
/// Q diag(e^scale) B with Q unitary and B unit upper triangular, and solves
/// the SNR eigenproblem as a graded one, so eigenvalues spread over hundreds
/// of orders of magnitude keep their relative accuracy.
class FactoredState {
 public:
  FactoredState(std::size_t d, double p0);
  void step(const Matrix<double>& H, double alpha, double n0);
  std::vector<double> eigen_snr() const;

 private:
  Matrix<double> frame_;
  std::vector<double> scale_;
  Matrix<double> upper_;
  double log_i_ = 0;
  CovariancePair<double> noise_;
};

enum class SnrRoute { covariance, factored };

struct TrajectoryRecord {
  std::size_t hop = 0;
  std::vector<double> log_snr;       // descending
  std::vector<double> capacity;      // nats
  std::vector<double> log_capacity;  // log c, accurate when c underflows
  double total_capacity = 0;
  double log_power_X = 0;  // log |X_n|^2
  double log_power_I = 0;  // log |I_n|^2
};

/// log(1 + e^x) and log(log(1 + e^x)) without overflow or underflow.
double capacity_from_log_snr(double log_snr);
double log_capacity_from_log_snr(double log_snr);

struct SimulationOptions {
  std::optional<SnrRoute> route;  // default: factored for double, covariance otherwise
};

/// One seeded realization of the chain, hops 1..n. The generator is seeded
/// from cfg.seed; the Real type must match cfg.precision (see simulate()).
template <class Real>
std::vector<TrajectoryRecord> simulate_trajectory(const NetworkConfig& cfg, const SimulationOptions& opt = {});

/// Dispatches on cfg.precision, installing the big-float precision if needed.
std::vector<TrajectoryRecord> simulate(const NetworkConfig& cfg, const SimulationOptions& opt = {});

/// alpha_j H_j as a matrix process (the information component).
template <class Real>
rds::MatrixProcess<Real> information_process(const NetworkConfig& cfg);

/// X_n = alpha_n (H_n X_{n-1} + V_n) as an affine system.
template <class Real>
rds::AffineSystem<Real> signal_system(const NetworkConfig& cfg);

}  // namespace afrelay::network
