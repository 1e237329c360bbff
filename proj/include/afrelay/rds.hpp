#pragma once

#include "afrelay/numerics/linalg.hpp"
#include "afrelay/numerics/random.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace afrelay::rds {

using numerics::Matrix;
using numerics::Rng;
using numerics::Vector;

/// i.i.d. (up to a positive per-step scalar) random d x d matrices.
template <class Real>
struct MatrixProcess {
  std::size_t dimension = 0;
  std::function<Matrix<Real>(std::size_t step, Rng&)> draw;
};

template <class Real>
struct AffineDraw {
  Matrix<Real> A;
  Vector<Real> R;
};

/// X_n = A_n X_{n-1} + R_n. A and R are drawn jointly so that they may share
/// randomness (the relay chain's noise term does).
template <class Real>
struct AffineSystem {
  std::size_t dimension = 0;
  std::function<AffineDraw<Real>(std::size_t step, Rng&)> draw;
  bool sign_symmetric = true;  // R and -R have the same law
};

enum class SpectrumMethod { closed_form, qr_estimate };

std::string to_string(SpectrumMethod m);

struct LyapunovSpectrum {
  std::vector<double> exponents;   // descending
  std::vector<double> std_error;   // batch-means standard error per exponent
  std::vector<std::vector<double>> batch_means;  // [batch][index]
  std::size_t steps_used = 0;
  std::size_t restarts = 0;
  SpectrumMethod method = SpectrumMethod::qr_estimate;
};

struct EstimateOptions {
  std::size_t steps = 0;
  std::size_t renorm_period = 1;
  std::size_t batches = 20;
};

/// Fills exponents and std_error from batch_means, then sorts indices so the
/// exponents descend.
void summarize_batches(LyapunovSpectrum& s);

/// Pools replicas: exponents are recomputed from the union of all batch means.
LyapunovSpectrum merge_spectra(const std::vector<LyapunovSpectrum>& parts);

namespace detail {

template <class Real>
Matrix<Real> random_frame(std::size_t d, Rng& rng) {
  for (;;) {
    try {
      return numerics::qr_decompose(numerics::sample_gaussian_matrix<Real>(d, d, 1.0, rng)).Q;
    } catch (const DegenerateFactorization&) {
    }
  }
}

}  // namespace detail

/// Benettin QR estimate of the full Lyapunov spectrum of A_n ... A_1.
///
/// The frame starts at the identity, so block-triangular processes keep their
/// structure exactly through every factorization. Exponents are sorted.
template <class Real>
LyapunovSpectrum estimate_spectrum(const MatrixProcess<Real>& proc, const EstimateOptions& opt, Rng& rng) {
  using std::log;
  const std::size_t d = proc.dimension;
  if (d == 0) throw std::invalid_argument("estimate_spectrum: dimension must be positive");
  if (opt.renorm_period < 1) throw std::invalid_argument("estimate_spectrum: renorm_period must be >= 1");
  if (opt.steps < 10 * d) throw std::invalid_argument("estimate_spectrum: need at least 10*d steps");
  const std::size_t periods = opt.steps / opt.renorm_period;
  const std::size_t batches = std::min(opt.batches, periods);
  if (batches < 2) throw std::invalid_argument("estimate_spectrum: too few renormalization periods for batching");
  const std::size_t per_batch = periods / batches;

  LyapunovSpectrum out;
  out.method = SpectrumMethod::qr_estimate;
  out.batch_means.assign(batches, std::vector<double>(d, 0.0));
  std::vector<std::size_t> batch_steps(batches, 0);

  Matrix<Real> Q = Matrix<Real>::identity(d);
  std::size_t step = 0;
  for (std::size_t period = 0; period < batches * per_batch; ++period) {
    Matrix<Real> M = Q;
    for (std::size_t k = 0; k < opt.renorm_period; ++k) {
      Matrix<Real> A = proc.draw(step++, rng);
      if (A.rows() != d || A.cols() != d) throw std::invalid_argument("estimate_spectrum: draw has wrong shape");
      M = A * M;
    }
    const std::size_t b = period / per_batch;
    try {
      auto qr = numerics::qr_decompose(M);
      for (std::size_t i = 0; i < d; ++i) out.batch_means[b][i] += numerics::to_double(log(qr.R(i, i).re));
      batch_steps[b] += opt.renorm_period;
      Q = std::move(qr.Q);
    } catch (const DegenerateFactorization&) {
      // The period's growth is unrecoverable; continue from a fresh frame.
      ++out.restarts;
      Q = detail::random_frame<Real>(d, rng);
    }
  }
  for (std::size_t b = 0; b < batches; ++b) {
    if (batch_steps[b] == 0) throw std::runtime_error("estimate_spectrum: every period in a batch degenerated");
    for (auto& v : out.batch_means[b]) v /= static_cast<double>(batch_steps[b]);
    out.steps_used += batch_steps[b];
  }
  summarize_batches(out);
  return out;
}

/// Block lift [[A, R], [0, a]] acting on (X, 1).
template <class Real>
MatrixProcess<Real> lift_affine(const AffineSystem<Real>& sys, Real a_value) {
  const std::size_t d = sys.dimension;
  MatrixProcess<Real> out;
  out.dimension = d + 1;
  out.draw = [sys, a_value, d](std::size_t step, Rng& rng) {
    AffineDraw<Real> draw = sys.draw(step, rng);
    if (draw.A.rows() != d || draw.A.cols() != d || draw.R.size() != d)
      throw std::invalid_argument("lift_affine: draw dimension mismatch");
    Matrix<Real> L(d + 1, d + 1);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) L(i, j) = draw.A(i, j);
      L(i, d) = draw.R[i];
    }
    L(d, d) = numerics::Complex<Real>(a_value);
    return L;
  };
  return out;
}

struct TopExponent {
  double exponent = 0;
  double std_error = 0;
  std::size_t steps = 0;
};

/// (1/n) log |X_n| for the affine recursion, with X kept as a unit vector and
/// its log norm accumulated separately.
template <class Real>
TopExponent affine_top_exponent(const AffineSystem<Real>& sys, const Vector<Real>& x0, std::size_t steps,
                                Rng& rng, std::size_t batches = 20) {
  using std::exp;
  using std::log;
  using std::sqrt;
  const std::size_t d = sys.dimension;
  if (x0.size() != d) throw std::invalid_argument("affine_top_exponent: initial state has wrong size");
  if (steps < batches || batches < 2) throw std::invalid_argument("affine_top_exponent: too few steps");
  Real n0 = numerics::norm2(x0);
  if (!(n0 > 0)) throw std::invalid_argument("affine_top_exponent: initial state must be nonzero");

  Real logn = log(n0) / 2;
  Vector<Real> x = x0;
  for (auto& v : x) v /= sqrt(n0);

  const std::size_t per_batch = steps / batches;
  std::vector<double> incr(batches, 0.0);
  for (std::size_t step = 0; step < batches * per_batch; ++step) {
    AffineDraw<Real> draw = sys.draw(step, rng);
    Vector<Real> y = draw.A * x;
    const Real shrink = exp(-logn);
    for (std::size_t i = 0; i < d; ++i) y[i] += draw.R[i] * shrink;
    const Real ny = sqrt(numerics::norm2(y));
    if (!(ny > 0)) throw std::runtime_error("affine_top_exponent: state collapsed to zero");
    for (auto& v : y) v /= ny;
    x = std::move(y);
    const Real dl = log(ny);
    logn += dl;
    incr[step / per_batch] += numerics::to_double(dl);
  }
  TopExponent out;
  out.steps = batches * per_batch;
  out.exponent = numerics::to_double(logn) / static_cast<double>(out.steps);
  // Batch means of the per-step increments; the start term is O(1/n) and
  // left out of the error estimate.
  double mean = 0;
  for (auto& v : incr) {
    v /= static_cast<double>(per_batch);
    mean += v;
  }
  mean /= static_cast<double>(batches);
  double ss = 0;
  for (double v : incr) ss += (v - mean) * (v - mean);
  out.std_error = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  return out;
}

}  // namespace afrelay::rds
