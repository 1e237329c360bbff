#include "afrelay/numerics/special.hpp"

#include <cctype>
#include <string>

namespace afrelay::numerics {

Rational harmonic(std::uint64_t k) {
  Rational s = 0;
  for (std::uint64_t j = 1; j <= k; ++j) s += Rational(1, j);
  return s;
}

void PrecisionConfig::validate() const {
  if (backend == Backend::big_float && digits < 16)
    throw std::invalid_argument("big-float precision needs at least 16 digits, got " + std::to_string(digits));
}

std::string PrecisionConfig::to_string() const {
  if (backend == Backend::native_double) return "double";
  return "big:" + std::to_string(digits);
}

PrecisionConfig PrecisionConfig::parse(const std::string& text) {
  if (text == "double") return native();
  const std::string prefix = "big:";
  if (text.rfind(prefix, 0) == 0) {
    std::string rest = text.substr(prefix.size());
    if (rest.empty() || rest.size() > 6) throw std::invalid_argument("bad precision '" + text + "'");
    for (char c : rest)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("bad precision '" + text + "'");
    PrecisionConfig p = big(static_cast<unsigned>(std::stoul(rest)));
    p.validate();
    return p;
  }
  throw std::invalid_argument("precision must be 'double' or 'big:<digits>', got '" + text + "'");
}

}  // namespace afrelay::numerics
