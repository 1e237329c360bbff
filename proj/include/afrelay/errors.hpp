#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace afrelay {

/// QR found a column whose residual norm vanished after orthogonalization.
class DegenerateFactorization : public std::runtime_error {
 public:
  explicit DegenerateFactorization(std::size_t column)
      : std::runtime_error("degenerate factorization at column " + std::to_string(column)), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

class NotPositiveDefinite : public std::runtime_error {
 public:
  explicit NotPositiveDefinite(std::size_t pivot)
      : std::runtime_error("matrix not positive definite at pivot " + std::to_string(pivot)), pivot_(pivot) {}
  std::size_t pivot() const { return pivot_; }

 private:
  std::size_t pivot_;
};

class NotHermitian : public std::invalid_argument {
 public:
  explicit NotHermitian(double asymmetry)
      : std::invalid_argument("matrix not Hermitian (relative asymmetry " + std::to_string(asymmetry) + ")"),
        asymmetry_(asymmetry) {}
  double asymmetry() const { return asymmetry_; }

 private:
  double asymmetry_;
};

/// The working precision can no longer represent the covariance recursion;
/// rerun with the big-float backend.
class PrecisionEscalation : public std::runtime_error {
 public:
  explicit PrecisionEscalation(const std::string& what)
      : std::runtime_error(what + "; rerun with --precision big:<digits>") {}
};

/// Invalid experiment configuration. `field()` is the dotted path of the
/// offending field, e.g. "power_schedule.geometric".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace afrelay
