#include "afrelay/network.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

namespace afrelay::network {

using numerics::RealTraits;

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0; }

double power_ratio(const NetworkConfig& cfg, std::size_t j) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PowerConstant>) {
          return j == 1 ? s.value / cfg.p0 : 1.0;
        } else if constexpr (std::is_same_v<T, PowerGeometric>) {
          return s.growth;
        } else {
          if (j >= s.values.size()) throw std::out_of_range("power list shorter than requested hop");
          return s.values[j] / s.values[j - 1];
        }
      },
      cfg.power);
}

// n0 / p_{j-1}
double noise_over_power(const NetworkConfig& cfg, std::size_t j) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PowerConstant>) {
          return j == 1 ? cfg.n0 / cfg.p0 : cfg.n0 / s.value;
        } else if constexpr (std::is_same_v<T, PowerGeometric>) {
          return std::exp(std::log(cfg.n0) - std::log(s.p0) - static_cast<double>(j - 1) * std::log(s.growth));
        } else {
          if (j - 1 >= s.values.size()) throw std::out_of_range("power list shorter than requested hop");
          return cfg.n0 / s.values[j - 1];
        }
      },
      cfg.power);
}

}  // namespace

std::string to_string(GainKind g) { return g == GainKind::fixed ? "fixed" : "variable"; }

GainKind parse_gain(const std::string& s) {
  if (s == "fixed") return GainKind::fixed;
  if (s == "variable") return GainKind::variable;
  throw ConfigError("gain", "expected 'fixed' or 'variable', got '" + s + "'");
}

void NetworkConfig::validate() const {
  if (d < 1) throw ConfigError("d", "must be >= 1");
  if (n < 1) throw ConfigError("n", "must be >= 1");
  if (!positive_finite(n0)) throw ConfigError("n0", "must be > 0");
  if (!positive_finite(p0)) throw ConfigError("p0", "must be > 0");
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MuConstant>) {
          if (!positive_finite(s.value)) throw ConfigError("mu_schedule.constant", "must be > 0");
        } else if constexpr (std::is_same_v<T, MuList>) {
          if (s.values.size() != n)
            throw ConfigError("mu_schedule.list", "needs n = " + std::to_string(n) + " entries, got " +
                                                      std::to_string(s.values.size()));
          for (double v : s.values)
            if (!positive_finite(v)) throw ConfigError("mu_schedule.list", "entries must be > 0");
        } else {
          if (!std::isfinite(s.a)) throw ConfigError("mu_schedule.lognormal", "a must be finite");
          if (!positive_finite(s.b)) throw ConfigError("mu_schedule.lognormal", "b must be > 0");
        }
      },
      mu);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PowerConstant>) {
          if (!positive_finite(s.value)) throw ConfigError("power_schedule.constant", "must be > 0");
        } else if constexpr (std::is_same_v<T, PowerGeometric>) {
          if (!positive_finite(s.p0)) throw ConfigError("power_schedule.geometric", "p0 must be > 0");
          if (!positive_finite(s.growth)) throw ConfigError("power_schedule.geometric", "growth must be > 0");
          if (std::abs(s.p0 - p0) > 1e-12 * p0)
            throw ConfigError("power_schedule.geometric", "p0 must equal the source power p0");
        } else {
          if (s.values.size() != n + 1)
            throw ConfigError("power_schedule.list", "needs n + 1 = " + std::to_string(n + 1) + " entries (p_0..p_n)");
          for (double v : s.values)
            if (!positive_finite(v)) throw ConfigError("power_schedule.list", "entries must be > 0");
          if (std::abs(s.values.front() - p0) > 1e-12 * p0)
            throw ConfigError("power_schedule.list", "first entry must equal the source power p0");
        }
      },
      power);
  try {
    precision.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("precision", e.what());
  }
}

double NetworkConfig::log_power(std::size_t j) const {
  if (j == 0) return std::log(p0);
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PowerConstant>) {
          return std::log(s.value);
        } else if constexpr (std::is_same_v<T, PowerGeometric>) {
          return std::log(s.p0) + static_cast<double>(j) * std::log(s.growth);
        } else {
          if (j >= s.values.size()) throw std::out_of_range("power list shorter than requested hop");
          return std::log(s.values[j]);
        }
      },
      power);
}

double NetworkConfig::mu_at(std::size_t j) const {
  if (j < 1) throw std::out_of_range("mu is indexed from hop 1");
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MuConstant>) {
          return s.value;
        } else if constexpr (std::is_same_v<T, MuList>) {
          if (j > s.values.size()) throw std::out_of_range("mu list shorter than requested hop");
          return s.values[j - 1];
        } else {
          throw std::logic_error("mu_at: log-normal schedule has no deterministic value");
        }
      },
      mu);
}

double gain_fixed(double p_j, double p_jm1, std::size_t d, double mu_j, double n0) {
  if (!(p_j > 0) || !(p_jm1 > 0) || d < 1 || !(mu_j > 0) || !(n0 >= 0))
    throw std::invalid_argument("gain_fixed: powers and mu must be > 0, n0 >= 0");
  const double dd = static_cast<double>(d);
  return std::sqrt(p_j / (p_jm1 * dd * mu_j + dd * n0));
}

template <class Real>
Real gain_variable(double p_j, double p_jm1, std::size_t d, const Matrix<Real>& H, double n0) {
  using std::sqrt;
  if (!(p_j > 0) || !(p_jm1 > 0) || d < 1 || !(n0 >= 0))
    throw std::invalid_argument("gain_variable: powers must be > 0, n0 >= 0");
  const Real dd = Real(static_cast<double>(d));
  const Real den = Real(p_jm1) / dd * H.frobenius_norm2() + dd * Real(n0);
  if (!(den > 0)) throw std::invalid_argument("gain_variable: zero channel with zero noise");
  return sqrt(Real(p_j) / den);
}

template <class Real>
Real gain_squared(const NetworkConfig& cfg, std::size_t j, double mu_j, const Matrix<Real>& H) {
  const Real dd = Real(static_cast<double>(cfg.d));
  const Real ratio = Real(power_ratio(cfg, j));
  const Real noise = dd * Real(noise_over_power(cfg, j));
  if (cfg.gain == GainKind::fixed) return ratio / (dd * Real(mu_j) + noise);
  return ratio / (H.frobenius_norm2() / dd + noise);
}

template <class Real>
HopDraw<Real> draw_hop(const NetworkConfig& cfg, std::size_t j, Rng& rng) {
  using std::sqrt;
  HopDraw<Real> hop;
  if (const auto* ln = std::get_if<MuLognormal>(&cfg.mu)) {
    hop.mu = numerics::sample_lognormal(ln->a, ln->b, rng);
  } else {
    hop.mu = cfg.mu_at(j);
  }
  hop.H = numerics::sample_gaussian_matrix<Real>(cfg.d, cfg.d, hop.mu, rng);
  hop.Z = numerics::sample_gaussian_vector<Real>(cfg.d, 1.0, rng);
  hop.alpha = sqrt(gain_squared<Real>(cfg, j, hop.mu, hop.H));
  return hop;
}

template <class Real>
Vector<Real> draw_source(const NetworkConfig& cfg, Rng& rng) {
  const double per_entry = cfg.p0 / static_cast<double>(cfg.d);
  if (cfg.source == SourceKind::gaussian) return numerics::sample_gaussian_vector<Real>(cfg.d, per_entry, rng);
  std::uniform_real_distribution<double> angle(0.0, 2 * std::acos(-1.0));
  Vector<Real> x(cfg.d);
  const double r = std::sqrt(per_entry);
  for (auto& v : x) {
    double t = angle(rng);
    v = numerics::Complex<Real>(Real(r * std::cos(t)), Real(r * std::sin(t)));
  }
  return x;
}

// ---------------------------------------------------------------------------

template <class Real>
CovariancePair<Real> CovariancePair<Real>::initial(std::size_t d, double p0) {
  using std::log;
  using std::sqrt;
  CovariancePair c;
  c.ri_hat_ = Matrix<Real>::identity(d);
  const Real rt = sqrt(Real(static_cast<double>(d)));
  c.ri_hat_ *= Real(1) / rt;
  c.log_i_ = log(Real(p0)) + log(rt);
  c.rn_hat_ = Matrix<Real>(d, d);
  c.log_n_ = -RealTraits<Real>::infinity();
  c.rn_zero_ = true;
  return c;
}

template <class Real>
void CovariancePair<Real>::step(const Matrix<Real>& H, const Real& alpha, double n0) {
  using std::exp;
  using std::log;
  using std::max;
  using std::sqrt;
  const std::size_t d = H.rows();
  const Matrix<Real> Ha = H.adjoint();
  const bool dead = !(alpha > 0);
  const Real log_a2 = dead ? Real(0) : Real(2 * log(alpha));

  if (!ri_zero_) {
    Matrix<Real> T = numerics::hermitian_part(H * ri_hat_ * Ha);
    const Real f = T.frobenius_norm();
    if (dead || !(f > 0)) {
      ri_zero_ = true;
      ri_hat_ = Matrix<Real>(d, d);
      log_i_ = -RealTraits<Real>::infinity();
    } else {
      T *= Real(1) / f;
      ri_hat_ = std::move(T);
      log_i_ += log_a2 + log(f);
    }
  }

  const Real log_n0 = log(Real(n0));
  std::optional<Matrix<Real>> carried;
  Real log_carried = 0;
  if (!rn_zero_ && !dead) {
    Matrix<Real> T = numerics::hermitian_part(H * rn_hat_ * Ha);
    const Real t = T.frobenius_norm();
    if (t > 0) {
      log_carried = log_a2 + log_n_ + log(t);
      T *= Real(1) / t;
      carried = std::move(T);
    }
  }
  if (!carried) {
    rn_hat_ = Matrix<Real>::identity(d);
    const Real rt = sqrt(Real(static_cast<double>(d)));
    rn_hat_ *= Real(1) / rt;
    log_n_ = log_n0 + log(rt);
  } else {
    const Real m = max(log_n0, log_carried);
    Matrix<Real> M = *carried;
    M *= exp(log_carried - m);
    const Real diag = exp(log_n0 - m);
    for (std::size_t i = 0; i < d; ++i) M(i, i).re += diag;
    const Real f = M.frobenius_norm();
    M *= Real(1) / f;
    rn_hat_ = std::move(M);
    log_n_ = m + log(f);
  }
  rn_zero_ = false;
}

template <class Real>
std::vector<Real> CovariancePair<Real>::eigen_snr() const {
  using std::log;
  const std::size_t d = ri_hat_.rows();
  if (rn_zero_) throw std::logic_error("eigen_snr: noise covariance not yet formed (no hops)");
  if (ri_zero_) return std::vector<Real>(d, -RealTraits<Real>::infinity());
  Matrix<Real> L;
  try {
    L = numerics::cholesky(rn_hat_);
  } catch (const NotPositiveDefinite& e) {
    throw PrecisionEscalation(std::string("noise covariance lost positive definiteness: ") + e.what());
  }
  auto eig = numerics::eig_hermitian(numerics::whiten(ri_hat_, L));
  std::vector<Real> out;
  out.reserve(d);
  for (const auto& v : eig.values) {
    if (!(v > 0)) throw PrecisionEscalation("whitened information covariance has a non-positive eigenvalue");
    out.push_back(log(v) + log_i_ - log_n_);
  }
  return out;
}

template <class Real>
Matrix<Real> CovariancePair<Real>::RI() const {
  using std::exp;
  if (ri_zero_) return Matrix<Real>(ri_hat_.rows(), ri_hat_.cols());
  Matrix<Real> m = ri_hat_;
  m *= exp(log_i_);
  return m;
}

template <class Real>
Matrix<Real> CovariancePair<Real>::RN() const {
  using std::exp;
  if (rn_zero_) return Matrix<Real>(rn_hat_.rows(), rn_hat_.cols());
  Matrix<Real> m = rn_hat_;
  m *= exp(log_n_);
  return m;
}

// ---------------------------------------------------------------------------

FactoredState::FactoredState(std::size_t d, double p0)
    : frame_(Matrix<double>::identity(d)),
      scale_(d, 0.0),
      upper_(Matrix<double>::identity(d)),
      log_i_(std::log(p0)),
      noise_(CovariancePair<double>::initial(d, p0)) {}

void FactoredState::step(const Matrix<double>& H, double alpha, double n0) {
  if (!(alpha > 0)) throw std::invalid_argument("FactoredState: gain must be > 0");
  const std::size_t d = scale_.size();
  auto qr = numerics::qr_decompose(H * frame_);
  Matrix<double> next(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const double rii = qr.R(i, i).re;
    for (std::size_t k = i; k < d; ++k) {
      const numerics::Complex<double> coef = qr.R(i, k) * (std::exp(scale_[k] - scale_[i]) / rii);
      for (std::size_t c = k; c < d; ++c) next(i, c) += coef * upper_(k, c);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    next(i, i) = numerics::Complex<double>(1.0);
    scale_[i] += std::log(qr.R(i, i).re);
  }
  upper_ = std::move(next);
  frame_ = std::move(qr.Q);
  log_i_ += 2 * std::log(alpha);
  noise_.step(H, alpha, n0);
}

std::vector<double> FactoredState::eigen_snr() const {
  const std::size_t d = scale_.size();
  Matrix<double> K;
  try {
    K = numerics::cholesky(noise_.RN_hat());
  } catch (const NotPositiveDefinite& e) {
    throw PrecisionEscalation(std::string("noise covariance lost positive definiteness: ") + e.what());
  }
  auto qr = numerics::qr_decompose(numerics::solve_lower(K, frame_));
  Matrix<double> C1(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = i; k < d; ++k) C1(i, k) = qr.R(i, k) * std::exp(scale_[k] - scale_[i]);
  Matrix<double> C = C1 * upper_;
  Matrix<double> A = C * C.adjoint();
  std::vector<double> sc(scale_);
  std::vector<double> rd(d);
  for (std::size_t i = 0; i < d; ++i) {
    rd[i] = std::sqrt(A(i, i).re);
    sc[i] += std::log(rd[i]);
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) A(i, j) = A(i, j) * (1.0 / (rd[i] * rd[j]));
  for (std::size_t i = 0; i < d; ++i) A(i, i) = numerics::Complex<double>(1.0);
  std::vector<double> logs;
  try {
    logs = numerics::graded_log_eigenvalues(numerics::hermitian_part(A), sc);
  } catch (const NotPositiveDefinite& e) {
    throw PrecisionEscalation(std::string("graded SNR eigenproblem lost definiteness: ") + e.what());
  }
  for (auto& v : logs) v += log_i_ - noise_.logscale_N();
  return logs;
}

// ---------------------------------------------------------------------------

double capacity_from_log_snr(double x) {
  if (x > 35) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double log_capacity_from_log_snr(double x) {
  if (x == -std::numeric_limits<double>::infinity()) return x;
  // log(log1p(e^x)) = x + log1p(-e^x/2 + ...) for very negative x.
  if (x < -30) return x - std::exp(x) / 2;
  return std::log(capacity_from_log_snr(x));
}

namespace {

template <class Real>
Real normalize(Vector<Real>& v) {
  using std::sqrt;
  const Real nv = sqrt(numerics::norm2(v));
  if (!(nv > 0)) throw std::runtime_error("signal vector collapsed to zero");
  for (auto& x : v) x /= nv;
  return nv;
}

}  // namespace

template <class Real>
std::vector<TrajectoryRecord> simulate_trajectory(const NetworkConfig& cfg, const SimulationOptions& opt) {
  using std::log;
  using std::sqrt;
  cfg.validate();
  const std::size_t d = cfg.d;
  const SnrRoute route =
      opt.route.value_or(std::is_same_v<Real, double> ? SnrRoute::factored : SnrRoute::covariance);
  if constexpr (!std::is_same_v<Real, double>) {
    if (route == SnrRoute::factored) throw std::invalid_argument("the factored SNR route is double-only");
  }

  Rng rng(cfg.seed);
  Vector<Real> info = draw_source<Real>(cfg, rng);
  Vector<Real> lifted(d + 1);
  for (std::size_t i = 0; i < d; ++i) lifted[i] = info[i];
  lifted[d] = numerics::Complex<Real>(sqrt(Real(cfg.n0)));
  Real log_info = log(normalize(info));
  Real log_lifted = log(normalize(lifted));

  auto cov = CovariancePair<Real>::initial(d, cfg.p0);
  std::optional<FactoredState> factored;
  if constexpr (std::is_same_v<Real, double>) {
    if (route == SnrRoute::factored) factored.emplace(d, cfg.p0);
  }

  std::vector<TrajectoryRecord> out;
  out.reserve(cfg.n);
  for (std::size_t j = 1; j <= cfg.n; ++j) {
    HopDraw<Real> hop = draw_hop<Real>(cfg, j, rng);

    Vector<Real> ni = hop.H * info;
    for (auto& v : ni) v *= hop.alpha;
    log_info += log(normalize(ni));
    info = std::move(ni);

    Vector<Real> top(d);
    for (std::size_t i = 0; i < d; ++i) top[i] = lifted[i];
    Vector<Real> nl = hop.H * top;
    nl.resize(d + 1);
    for (std::size_t i = 0; i < d; ++i) nl[i] = (nl[i] + hop.Z[i] * lifted[d].re) * hop.alpha;
    nl[d] = lifted[d];
    log_lifted += log(normalize(nl));
    lifted = std::move(nl);
    Real top_norm2 = 0;
    for (std::size_t i = 0; i < d; ++i) top_norm2 += numerics::abs2(lifted[i]);

    TrajectoryRecord rec;
    rec.hop = j;
    std::vector<Real> snr;
    if constexpr (std::is_same_v<Real, double>) {
      if (factored) {
        factored->step(hop.H, hop.alpha, cfg.n0);
        snr = factored->eigen_snr();
      }
    }
    if (!factored) {
      cov.step(hop.H, hop.alpha, cfg.n0);
      snr = cov.eigen_snr();
    }
    for (const auto& s : snr) {
      const double x = numerics::to_double(s);
      rec.log_snr.push_back(x);
      rec.capacity.push_back(capacity_from_log_snr(x));
      rec.log_capacity.push_back(log_capacity_from_log_snr(x));
      rec.total_capacity += rec.capacity.back();
    }
    rec.log_power_I = numerics::to_double(2 * log_info);
    rec.log_power_X = numerics::to_double(2 * log_lifted + log(top_norm2));
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<TrajectoryRecord> simulate(const NetworkConfig& cfg, const SimulationOptions& opt) {
  cfg.validate();
  if (!cfg.precision.is_big()) return simulate_trajectory<double>(cfg, opt);
  std::optional<numerics::BigFloatPrecision> guard;
  if (BigFloat::default_precision() != cfg.precision.digits + numerics::BigFloatPrecision::kGuardDigits)
    guard.emplace(cfg.precision.digits);
  return simulate_trajectory<BigFloat>(cfg, opt);
}

template <class Real>
rds::MatrixProcess<Real> information_process(const NetworkConfig& cfg) {
  cfg.validate();
  rds::MatrixProcess<Real> p;
  p.dimension = cfg.d;
  p.draw = [cfg](std::size_t step, Rng& rng) {
    HopDraw<Real> hop = draw_hop<Real>(cfg, step + 1, rng);
    hop.H *= hop.alpha;
    return hop.H;
  };
  return p;
}

template <class Real>
rds::AffineSystem<Real> signal_system(const NetworkConfig& cfg) {
  using std::sqrt;
  cfg.validate();
  rds::AffineSystem<Real> s;
  s.dimension = cfg.d;
  s.sign_symmetric = true;
  s.draw = [cfg](std::size_t step, Rng& rng) {
    HopDraw<Real> hop = draw_hop<Real>(cfg, step + 1, rng);
    rds::AffineDraw<Real> out;
    out.A = hop.H;
    out.A *= hop.alpha;
    out.R = hop.Z;
    const Real scale = hop.alpha * sqrt(Real(cfg.n0));
    for (auto& v : out.R) v *= scale;
    return out;
  };
  return s;
}

#define AFRELAY_INSTANTIATE(Real)                                                                             \
  template Real gain_variable<Real>(double, double, std::size_t, const Matrix<Real>&, double);              \
  template Real gain_squared<Real>(const NetworkConfig&, std::size_t, double, const Matrix<Real>&);         \
  template HopDraw<Real> draw_hop<Real>(const NetworkConfig&, std::size_t, Rng&);                            \
  template Vector<Real> draw_source<Real>(const NetworkConfig&, Rng&);                                       \
  template class CovariancePair<Real>;                                                                       \
  template std::vector<TrajectoryRecord> simulate_trajectory<Real>(const NetworkConfig&,                     \
                                                                   const SimulationOptions&);                \
  template rds::MatrixProcess<Real> information_process<Real>(const NetworkConfig&);                         \
  template rds::AffineSystem<Real> signal_system<Real>(const NetworkConfig&);

AFRELAY_INSTANTIATE(double)
AFRELAY_INSTANTIATE(BigFloat)

#undef AFRELAY_INSTANTIATE

}  // namespace afrelay::network
