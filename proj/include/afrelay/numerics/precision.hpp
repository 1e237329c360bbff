#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace afrelay::numerics {

/// Software float used by the big-float backend. Precision is the process-wide
/// MPFR default, set through BigFloatPrecision before any values are created.
using BigFloat = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                               boost::multiprecision::et_off>;

struct PrecisionConfig {
  enum class Backend { native_double, big_float };

  Backend backend = Backend::native_double;
  unsigned digits = 100;

  static PrecisionConfig native() { return {}; }
  static PrecisionConfig big(unsigned digits = 100) { return {Backend::big_float, digits}; }

  bool is_big() const { return backend == Backend::big_float; }

  /// Throws std::invalid_argument when digits < 16 for the big-float backend.
  void validate() const;

  /// "double" or "big:<digits>".
  std::string to_string() const;
  static PrecisionConfig parse(const std::string& text);
};

/// RAII guard that sets the MPFR default precision (decimal digits plus guard
/// digits) and restores the previous value on destruction. The setting is
/// global in this Boost version, so set it before fanning out worker threads.
class BigFloatPrecision {
 public:
  explicit BigFloatPrecision(unsigned digits);
  ~BigFloatPrecision();
  BigFloatPrecision(const BigFloatPrecision&) = delete;
  BigFloatPrecision& operator=(const BigFloatPrecision&) = delete;

  static constexpr unsigned kGuardDigits = 8;

 private:
  unsigned previous_;
};

inline BigFloatPrecision::BigFloatPrecision(unsigned digits) : previous_(BigFloat::default_precision()) {
  BigFloat::default_precision(digits + kGuardDigits);
}

inline BigFloatPrecision::~BigFloatPrecision() { BigFloat::default_precision(previous_); }

template <class Real>
struct RealTraits;

template <>
struct RealTraits<double> {
  static double epsilon() { return std::numeric_limits<double>::epsilon(); }
  static unsigned digits() { return 16; }
  static double from_double(double x) { return x; }
  static double to_double(double x) { return x; }
  static bool is_finite(double x) { return std::isfinite(x); }
  static double infinity() { return std::numeric_limits<double>::infinity(); }
};

template <>
struct RealTraits<BigFloat> {
  static BigFloat epsilon() { return std::numeric_limits<BigFloat>::epsilon(); }
  static unsigned digits() { return BigFloat::default_precision() - BigFloatPrecision::kGuardDigits; }
  static BigFloat from_double(double x) { return BigFloat(x); }
  static double to_double(const BigFloat& x) { return x.convert_to<double>(); }
  static bool is_finite(const BigFloat& x) { return boost::multiprecision::isfinite(x); }
  static BigFloat infinity() { return std::numeric_limits<BigFloat>::infinity(); }
};

template <class Real>
double to_double(const Real& x) {
  return RealTraits<Real>::to_double(x);
}

}  // namespace afrelay::numerics
