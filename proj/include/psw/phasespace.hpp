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
#pragma once

#include <Eigen/Dense>

#include "psw/states.hpp"

namespace psw {

/// Tolerance on the probability mass pushed past the cutoff by displacement.
inline constexpr double kDisplacedTailTol = 1e-6;

/// Largest s accepted on the Fock evaluation path; s -> 1 approaches the
/// singular P function and the series loses all meaning well before that.
inline constexpr double kDefaultSMax = 0.7;

/// Ordering parameter s < 1 together with the derived eta_s = 2 / (1 - s).
///
/// The convention is fixed so that the vacuum Wigner function (s = 0) is
/// (2/pi) exp(-2|alpha|^2) with alpha = x + i p.
struct SParam {
  double s;
  double eta;

  explicit SParam(double s_value);

  /// The split ordering s_k = 1 - (1 - s)/k for k in (0, 1).
  SParam split(double k) const;

  static SParam wigner() { return SParam(0.0); }
  static SParam husimi() { return SParam(-1.0); }
  /// Ordering sampled by a zero-count measurement of efficiency eta.
  static SParam from_efficiency(double eta_det);
};

/// Uniform rectangular grid over phase space, endpoints included.
struct PhaseGrid {
  double re_min = 0.0, re_max = 0.0;
  double im_min = 0.0, im_max = 0.0;
  int n_re = 1, n_im = 1;

  void validate() const;
  std::size_t n_points() const {
    return static_cast<std::size_t>(n_re) * static_cast<std::size_t>(n_im);
  }
  double step_re() const { return n_re > 1 ? (re_max - re_min) / (n_re - 1) : 0.0; }
  double step_im() const { return n_im > 1 ? (im_max - im_min) / (n_im - 1) : 0.0; }
  Complex alpha(int i_im, int i_re) const {
    return {re_min + i_re * step_re(), im_min + i_im * step_im()};
  }
  /// Row-major enumeration: index = i_im * n_re + i_re.
  Complex alpha_at(std::size_t index) const {
    return alpha(static_cast<int>(index / n_re), static_cast<int>(index % n_re));
  }
  double max_abs_alpha() const;
};

/// One P(alpha; s) value together with a rigorous absolute error bound
/// (series tail plus a floating-point accumulation term).
struct PointValue {
  double value = 0.0;
  double err_bound = 0.0;
};

/// P(alpha; s) sampled over a grid.  values(i_im, i_re); err_bound is the
/// maximum per-point bound, uniform over the grid.
struct DistributionField {
  PhaseGrid grid;
  SParam s;
  Eigen::MatrixXd values;
  double err_bound = 0.0;
};

struct EvalOptions {
  double tail_tol = kDisplacedTailTol;
  double s_max = kDefaultSMax;
};

/// Displaced-Fock matrix <m|D(alpha)|n> for m, n < size, built diagonal by
/// diagonal from the normalized associated-Laguerre three-term recurrence
/// with log-space seeds (stable to size ~300, no factorial overflow).
Eigen::MatrixXcd displaced_fock_matrix(Complex alpha, int size);

/// d_n = <n| D(alpha)^dag rho D(alpha) |n> plus the mass pushed past the
/// cutoff.  Throws CutoffError when that spill exceeds tail_tol.
struct DisplacedDiag {
  Eigen::VectorXd d;
  double spill = 0.0;
};
DisplacedDiag displaced_diag_full(const FockState& state, Complex alpha,
                                  double tail_tol = kDisplacedTailTol);
Eigen::VectorXd displaced_diag(const FockState& state, Complex alpha,
                               double tail_tol = kDisplacedTailTol);

/// Shared series kernel  sum_n g^n d_n  (Horner from the highest term).
/// Both P(alpha; s) and the zero-count probability are this sum, which is
/// what makes their scaling identity exact by construction.
double geometric_series(const Eigen::VectorXd& d, double g);

/// P(alpha; s) from a precomputed displaced diagonal.
PointValue eval_s_from_diag(const DisplacedDiag& dd, const SParam& s,
                            double s_max = kDefaultSMax);

/// P(alpha; s) = (eta_s/pi) sum_n (1 - eta_s)^n d_n(alpha).
///
/// For s <= -1 every term is non-negative.  For s > 0 the terms alternate
/// with exponentially growing weights; evaluation is refused unless the
/// displaced tail is zero at working precision, and always refused above
/// opt.s_max.
PointValue eval_s(const FockState& state, Complex alpha, const SParam& s,
                  const EvalOptions& opt = {});

/// Exact Gaussian path: (1/(2 pi sqrt(det S))) exp(-delta^T S^-1 delta / 2)
/// with S = cov - (s/4) I.  Throws PreconditionError when S is not PD.
double eval_s_gaussian(const GaussianSpec& spec, Complex alpha,
                       const SParam& s);

/// Grid scans.  Points are independent; the result does not depend on the
/// thread count (0 = auto).
DistributionField scan(const FockState& state, const PhaseGrid& grid,
                       const SParam& s, const EvalOptions& opt = {},
                       unsigned threads = 0);
DistributionField scan(const GaussianSpec& spec, const PhaseGrid& grid,
                       const SParam& s, unsigned threads = 0);

/// Upper Poisson tail P(X > cutoff) for X ~ Poisson(lambda).
double poisson_tail(double lambda, int cutoff);

/// Smallest cutoff whose Poisson(lambda) tail is below tol.
int suggest_cutoff(double lambda, double tol = kDisplacedTailTol);

}  // namespace psw
