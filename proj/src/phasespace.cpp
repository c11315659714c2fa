/**
 * Copyright 2026 psw authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "psw/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "psw/errors.hpp"
#include "psw/parallel.hpp"

namespace psw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
// Displaced tails below this are treated as exact zeros (rounding noise).
constexpr double kProvablyZeroTail = 64.0 * kEps;
// Multiplier for the floating-point part of the series error bound.
constexpr double kRoundingFactor = 16.0;

/// Walks the diagonals of the displaced-Fock matrix for x = |alpha|^2 > 0.
///
/// For each offset d it runs the normalized associated-Laguerre three-term
/// recurrence
///   l_{k+1} = [(2k+d+1-x) l_k - sqrt(k(k+d)) l_{k-1}] / sqrt((k+1)(k+1+d)),
/// where l_k = sqrt(k!/(k+d)!) x^{d/2} e^{-x/2} L_k^{(d)}(x) is exactly
/// |<k+d|D(alpha)|k>| up to sign, so every iterate is bounded by 1.  The
/// seed is assembled in log space (log-gamma) and carries a scale exponent
/// whenever it falls below the representable range.
///
/// kmax_of(d) limits how far each diagonal is walked; emit(d, k, l) receives
/// the true (unscaled) value.
template <typename KMaxFn, typename EmitFn>
void walk_displaced_diagonals(double x, int size, KMaxFn&& kmax_of,
                              EmitFn&& emit) {
  for (int d = 0; d < size; ++d) {
    const int kmax = std::min(kmax_of(d), size - 1 - d);
    if (kmax < 0) continue;
    const double log_seed =
        d == 0 ? -0.5 * x
               : 0.5 * (d * std::log(x) - std::lgamma(d + 1.0)) - 0.5 * x;
    double shift = 0.0;
    if (log_seed < -650.0) shift = log_seed + 600.0;
    double scale = shift == 0.0 ? 1.0 : std::exp(shift);

    double prev = 0.0;
    double cur = std::exp(log_seed - shift);
    emit(d, 0, cur * scale);
    for (int k = 0; k < kmax; ++k) {
      const double next = ((2.0 * k + d + 1.0 - x) * cur -
                           std::sqrt(double(k) * (k + d)) * prev) /
                          std::sqrt((k + 1.0) * (k + 1.0 + d));
      prev = cur;
      cur = next;
      if (std::abs(cur) > 1e280) {
        cur *= 1e-280;
        prev *= 1e-280;
        shift += std::log(1e280);
        scale = std::exp(shift);
      }
      emit(d, k + 1, cur * scale);
    }
  }
}

constexpr int kAllK = std::numeric_limits<int>::max();

}  // namespace

SParam::SParam(double s_value) : s(s_value), eta(2.0 / (1.0 - s_value)) {
  if (!std::isfinite(s_value) || !(s_value < 1.0)) {
    throw ConfigError("ordering parameter s must be finite and < 1");
  }
}

SParam SParam::split(double k) const {
  if (!(k > 0.0 && k < 1.0)) {
    throw ConfigError("split parameter k must lie in the open interval (0, 1)");
  }
  return SParam(1.0 - (1.0 - s) / k);
}

SParam SParam::from_efficiency(double eta_det) {
  if (!(eta_det > 0.0 && eta_det <= 1.0)) {
    throw ConfigError("detector efficiency must lie in (0, 1]");
  }
  return SParam(1.0 - 2.0 / eta_det);
}

void PhaseGrid::validate() const {
  if (!std::isfinite(re_min) || !std::isfinite(re_max) ||
      !std::isfinite(im_min) || !std::isfinite(im_max)) {
    throw ConfigError("grid bounds must be finite");
  }
  if (n_re < 1 || n_im < 1) throw ConfigError("grid sizes must be >= 1");
  if (n_re > 1 && !(re_max > re_min)) {
    throw ConfigError("re_max must exceed re_min for n_re > 1");
  }
  if (n_im > 1 && !(im_max > im_min)) {
    throw ConfigError("im_max must exceed im_min for n_im > 1");
  }
}

double PhaseGrid::max_abs_alpha() const {
  double m = 0.0;
  for (double re : {re_min, re_max}) {
    for (double im : {im_min, im_max}) {
      m = std::max(m, std::abs(Complex{re, im}));
    }
  }
  return m;
}

Eigen::MatrixXcd displaced_fock_matrix(Complex alpha, int size) {
  if (size < 1) throw ConfigError("matrix size must be >= 1");
  if (alpha == Complex{0.0, 0.0}) return Eigen::MatrixXcd::Identity(size, size);
  const double x = std::norm(alpha);
  const Complex phase_up = alpha / std::abs(alpha);
  const Complex phase_lo = -std::conj(alpha) / std::abs(alpha);
  Eigen::MatrixXcd out(size, size);
  int cur_d = -1;
  Complex pu = 1.0, pl = 1.0;
  walk_displaced_diagonals(
      x, size, [](int) { return kAllK; },
      [&](int d, int k, double ell) {
        if (d != cur_d) {
          if (d > 0) {
            pu *= phase_up;
            pl *= phase_lo;
          }
          cur_d = d;
        }
        out(k + d, k) = ell * pu;
        if (d > 0) out(k, k + d) = ell * pl;
      });
  return out;
}

namespace {

/// (D(alpha)^dag psi)_n without materializing the matrix.
Eigen::VectorXcd displaced_apply_adjoint(Complex alpha,
                                         const Eigen::VectorXcd& psi) {
  const int size = static_cast<int>(psi.size());
  if (alpha == Complex{0.0, 0.0}) return psi;
  int mmax = size - 1;
  while (mmax > 0 && psi(mmax) == Complex{0.0, 0.0}) --mmax;
  const double x = std::norm(alpha);
  const Complex cu = std::conj(alpha / std::abs(alpha));
  const Complex cl = std::conj(-std::conj(alpha) / std::abs(alpha));
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(size);
  int cur_d = -1;
  Complex pu = 1.0, pl = 1.0;
  walk_displaced_diagonals(
      x, size, [&](int d) { return std::min(size - 1 - d, mmax); },
      [&](int d, int k, double ell) {
        if (d != cur_d) {
          if (d > 0) {
            pu *= cu;
            pl *= cl;
          }
          cur_d = d;
        }
        if (d == 0) {
          acc(k) += ell * psi(k);
          return;
        }
        if (k + d <= mmax) acc(k) += ell * pu * psi(k + d);
        acc(k + d) += ell * pl * psi(k);
      });
  return acc;
}

/// d_n = sum_m w_m |<m|D(alpha)|n>|^2 for non-negative weights w.
Eigen::VectorXd displaced_diag_weights(Complex alpha,
                                       const Eigen::VectorXd& w) {
  const int size = static_cast<int>(w.size());
  if (alpha == Complex{0.0, 0.0}) return w;
  int mmax = size - 1;
  while (mmax > 0 && w(mmax) == 0.0) --mmax;
  const double x = std::norm(alpha);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(size);
  walk_displaced_diagonals(
      x, size, [&](int d) { return std::min(size - 1 - d, mmax); },
      [&](int d, int k, double ell) {
        const double e2 = ell * ell;
        if (d == 0) {
          acc(k) += e2 * w(k);
          return;
        }
        if (k + d <= mmax) acc(k) += e2 * w(k + d);
        acc(k + d) += e2 * w(k);
      });
  return acc;
}

}  // namespace

double poisson_tail(double lambda, int cutoff) {
  if (lambda <= 0.0 || cutoff < 0) return lambda <= 0.0 ? 0.0 : 1.0;
  int n = cutoff + 1;
  double log_term = n * std::log(lambda) - lambda - std::lgamma(n + 1.0);
  double term = std::exp(log_term);
  double tail = 0.0;
  for (int iter = 0; iter < 1000000; ++iter) {
    tail += term;
    ++n;
    term *= lambda / n;
    if (term < tail * 1e-18 + 1e-300) break;
  }
  return tail;
}

int suggest_cutoff(double lambda, double tol) {
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  int n = std::max(1, static_cast<int>(std::ceil(lambda)));
  while (poisson_tail(lambda, n) > tol) ++n;
  return n;
}

DisplacedDiag displaced_diag_full(const FockState& state, Complex alpha,
                                  double tail_tol) {
  const int n = state.dim();
  const double lambda = std::norm(alpha);
  if (poisson_tail(lambda, state.cutoff()) > tail_tol) {
    std::ostringstream msg;
    msg << "displacement |alpha|^2 = " << lambda << " too large for cutoff "
        << state.cutoff();
    throw CutoffError(msg.str());
  }
  DisplacedDiag out;
  switch (state.structure) {
    case StateStructure::Pure:
      out.d = displaced_apply_adjoint(alpha, state.amps).cwiseAbs2();
      break;
    case StateStructure::Diagonal: {
      const Eigen::VectorXd w = state.rho.diagonal().real().cwiseMax(0.0);
      out.d = displaced_diag_weights(alpha, w);
      break;
    }
    case StateStructure::General: {
      const Eigen::MatrixXcd dm = displaced_fock_matrix(alpha, n);
      const Eigen::MatrixXcd m = state.rho * dm;
      out.d = dm.conjugate().cwiseProduct(m).colwise().sum().real();
      break;
    }
  }
  out.d = out.d.cwiseMax(0.0);
  out.spill = std::max(0.0, 1.0 - out.d.sum());
  if (out.spill > tail_tol) {
    std::ostringstream msg;
    msg << "displaced tail mass " << out.spill << " at alpha = (" << alpha.real()
        << ", " << alpha.imag() << ") exceeds tolerance " << tail_tol
        << "; increase the cutoff";
    throw CutoffError(msg.str());
  }
  return out;
}

Eigen::VectorXd displaced_diag(const FockState& state, Complex alpha,
                               double tail_tol) {
  return displaced_diag_full(state, alpha, tail_tol).d;
}

double geometric_series(const Eigen::VectorXd& d, double g) {
  double sum = 0.0;
  for (int n = static_cast<int>(d.size()) - 1; n >= 0; --n) {
    sum = sum * g + d(n);
  }
  return sum;
}

PointValue eval_s_from_diag(const DisplacedDiag& dd, const SParam& s,
                            double s_max) {
  if (s.s > s_max) {
    std::ostringstream msg;
    msg << "s = " << s.s << " exceeds the evaluation limit s_max = " << s_max;
    throw IllConditionedError(msg.str());
  }
  const double g = 1.0 - s.eta;
  const double abs_g = std::abs(g);
  double tail_term = dd.spill;
  if (abs_g > 1.0) {
    // Alternating, exponentially growing terms: only valid when the series
    // is finite, i.e. the displaced tail is zero up to rounding.
    if (dd.spill > kProvablyZeroTail) {
      std::ostringstream msg;
      msg << "s = " << s.s << " gives |1 - eta| = " << abs_g
          << " > 1 and the displaced tail " << dd.spill
          << " is not provably zero";
      throw IllConditionedError(msg.str());
    }
    tail_term = 0.0;
  }
  const double pref = s.eta / kPi;
  const double sum = geometric_series(dd.d, g);
  const double sum_abs = g >= 0.0 ? sum : geometric_series(dd.d, abs_g);
  PointValue out;
  out.value = pref * sum;
  out.err_bound = pref * tail_term +
                  pref * sum_abs * kRoundingFactor * kEps *
                      static_cast<double>(dd.d.size());
  return out;
}

PointValue eval_s(const FockState& state, Complex alpha, const SParam& s,
                  const EvalOptions& opt) {
  return eval_s_from_diag(displaced_diag_full(state, alpha, opt.tail_tol), s,
                          opt.s_max);
}

double eval_s_gaussian(const GaussianSpec& spec, Complex alpha,
                       const SParam& s) {
  const Eigen::Matrix2d sigma =
      spec.cov - (s.s / 4.0) * Eigen::Matrix2d::Identity();
  const double det = sigma.determinant();
  if (!(sigma(0, 0) > 0.0) || !(det > 0.0)) {
    std::ostringstream msg;
    msg << "cov - (s/4) I is not positive definite at s = " << s.s;
    throw PreconditionError(msg.str());
  }
  const double dx = alpha.real() - spec.mean.real();
  const double dy = alpha.imag() - spec.mean.imag();
  const double quad = (sigma(1, 1) * dx * dx - 2.0 * sigma(0, 1) * dx * dy +
                       sigma(0, 0) * dy * dy) /
                      det;
  return std::exp(-0.5 * quad) / (2.0 * kPi * std::sqrt(det));
}

namespace {

/// Rethrows a precondition failure with the grid coordinates attached,
/// preserving the error type.
[[noreturn]] void rethrow_at(const PreconditionError& e, Complex alpha) {
  std::ostringstream msg;
  msg << "at alpha = (" << alpha.real() << ", " << alpha.imag() << "): "
      << e.what();
  if (dynamic_cast<const CutoffError*>(&e)) throw CutoffError(msg.str());
  if (dynamic_cast<const IllConditionedError*>(&e)) {
    throw IllConditionedError(msg.str());
  }
  throw PreconditionError(msg.str());
}

template <typename PointFn>
DistributionField scan_impl(const PhaseGrid& grid, const SParam& s,
                            unsigned threads, PointFn&& point) {
  grid.validate();
  DistributionField field{grid, s, Eigen::MatrixXd(grid.n_im, grid.n_re), 0.0};
  std::vector<double> errs(grid.n_points(), 0.0);
  parallel_for(grid.n_points(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Complex alpha = grid.alpha_at(idx);
      PointValue pv;
      try {
        pv = point(alpha);
      } catch (const PreconditionError& e) {
        rethrow_at(e, alpha);
      }
      field.values(static_cast<int>(idx) / grid.n_re,
                   static_cast<int>(idx) % grid.n_re) = pv.value;
      errs[idx] = pv.err_bound;
    }
  });
  field.err_bound = *std::max_element(errs.begin(), errs.end());
  return field;
}

}  // namespace

DistributionField scan(const FockState& state, const PhaseGrid& grid,
                       const SParam& s, const EvalOptions& opt,
                       unsigned threads) {
  grid.validate();
  // Fail fast at the grid extremes before the full sweep.
  for (double re : {grid.re_min, grid.re_max}) {
    for (double im : {grid.im_min, grid.im_max}) {
      try {
        eval_s(state, {re, im}, s, opt);
      } catch (const PreconditionError& e) {
        rethrow_at(e, {re, im});
      }
    }
  }
  return scan_impl(grid, s, threads,
                   [&](Complex alpha) { return eval_s(state, alpha, s, opt); });
}

DistributionField scan(const GaussianSpec& spec, const PhaseGrid& grid,
                       const SParam& s, unsigned threads) {
  validate_gaussian(spec);
  return scan_impl(grid, s, threads, [&](Complex alpha) {
    return PointValue{eval_s_gaussian(spec, alpha, s), 0.0};
  });
}

}  // namespace psw
