#include "afrelay/rds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace afrelay::rds {

std::string to_string(SpectrumMethod m) {
  switch (m) {
    case SpectrumMethod::closed_form:
      return "closed-form";
    case SpectrumMethod::qr_estimate:
      return "qr-estimate";
  }
  return "unknown";
}

void summarize_batches(LyapunovSpectrum& s) {
  const std::size_t batches = s.batch_means.size();
  if (batches < 2) throw std::invalid_argument("summarize_batches: need at least two batches");
  const std::size_t d = s.batch_means.front().size();
  std::vector<double> mean(d, 0.0), se(d, 0.0);
  for (const auto& row : s.batch_means)
    for (std::size_t i = 0; i < d; ++i) mean[i] += row[i];
  for (auto& m : mean) m /= static_cast<double>(batches);
  for (const auto& row : s.batch_means)
    for (std::size_t i = 0; i < d; ++i) se[i] += (row[i] - mean[i]) * (row[i] - mean[i]);
  for (auto& v : se) v = std::sqrt(v / static_cast<double>(batches - 1) / static_cast<double>(batches));

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mean[a] > mean[b]; });
  s.exponents.resize(d);
  s.std_error.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    s.exponents[k] = mean[order[k]];
    s.std_error[k] = se[order[k]];
  }
  for (auto& row : s.batch_means) {
    std::vector<double> sorted(d);
    for (std::size_t k = 0; k < d; ++k) sorted[k] = row[order[k]];
    row = std::move(sorted);
  }
}

LyapunovSpectrum merge_spectra(const std::vector<LyapunovSpectrum>& parts) {
  if (parts.empty()) throw std::invalid_argument("merge_spectra: nothing to merge");
  LyapunovSpectrum out;
  out.method = parts.front().method;
  const std::size_t d = parts.front().exponents.size();
  for (const auto& p : parts) {
    if (p.exponents.size() != d) throw std::invalid_argument("merge_spectra: dimension mismatch");
    out.batch_means.insert(out.batch_means.end(), p.batch_means.begin(), p.batch_means.end());
    out.steps_used += p.steps_used;
    out.restarts += p.restarts;
  }
  summarize_batches(out);
  return out;
}

}  // namespace afrelay::rds
