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
#include "psw/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

#include "psw/errors.hpp"
#include "psw/parallel.hpp"

namespace psw {

namespace {

constexpr double kPi = std::numbers::pi;

void require_k_open(double k) {
  if (!(k > 0.0 && k < 1.0)) {
    throw ConfigError("witness split k must lie in the open interval (0, 1)");
  }
}

/// Two-factor left-hand side from a precomputed displaced diagonal.
/// The pair (k, 1-k) is canonicalized so the two factors always multiply in
/// the same order, making witness_two(k) == witness_two(1-k) exact.
std::pair<double, double> witness_two_from_diag(const DisplacedDiag& dd,
                                                const SParam& s, double k,
                                                double s_max) {
  require_k_open(k);
  const double klo = std::min(k, 1.0 - k);
  const double khi = std::max(k, 1.0 - k);
  const PointValue p0 = eval_s_from_diag(dd, s, s_max);
  const PointValue plo = eval_s_from_diag(dd, s.split(klo), s_max);
  const PointValue phi = eval_s_from_diag(dd, s.split(khi), s_max);
  const double coeff = kPi / (klo * khi * s.eta);
  const double value = p0.value - coeff * plo.value * phi.value;
  const double product_err = (std::abs(plo.value) + plo.err_bound) *
                                 (std::abs(phi.value) + phi.err_bound) -
                             std::abs(plo.value) * std::abs(phi.value);
  const double err = p0.err_bound + coeff * product_err;
  return {value, err};
}

}  // namespace

WitnessResult witness_two(const FockState& state, Complex alpha,
                          const SParam& s, double k, const EvalOptions& opt) {
  const DisplacedDiag dd = displaced_diag_full(state, alpha, opt.tail_tol);
  const auto [value, err] = witness_two_from_diag(dd, s, k, opt.s_max);
  WitnessResult res;
  res.value = value;
  res.err_bound = err;
  res.alpha = alpha;
  res.s = s.s;
  res.k = {k};
  res.violated = value < -err;
  return res;
}

WitnessResult witness_wq(const FockState& state, Complex alpha,
                         const EvalOptions& opt) {
  return witness_two(state, alpha, SParam::wigner(), 0.5, opt);
}

WitnessResult witness_multi(const FockState& state, Complex alpha,
                            const SParam& s, const std::vector<double>& k_vec,
                            const EvalOptions& opt) {
  if (k_vec.size() < 2) throw ConfigError("k_vec needs at least two entries");
  double ksum = 0.0;
  for (double k : k_vec) {
    require_k_open(k);
    ksum += k;
  }
  if (std::abs(ksum - 1.0) > 1e-12) {
    throw ConfigError("multimode weights k_i must sum to 1 within 1e-12");
  }
  const DisplacedDiag dd = displaced_diag_full(state, alpha, opt.tail_tol);
  const PointValue p0 = eval_s_from_diag(dd, s, opt.s_max);
  double coeff = 1.0;
  double prod = 1.0;
  double prod_hi = 1.0;  // product of (|P_i| + err_i) for the error bound
  for (std::size_t i = 0; i < k_vec.size(); ++i) {
    if (i + 1 < k_vec.size()) coeff *= kPi / s.eta;
    coeff /= k_vec[i];
    const PointValue pi = eval_s_from_diag(dd, s.split(k_vec[i]), opt.s_max);
    prod *= pi.value;
    prod_hi *= std::abs(pi.value) + pi.err_bound;
  }
  WitnessResult res;
  res.value = p0.value - coeff * prod;
  res.err_bound = p0.err_bound + coeff * (prod_hi - std::abs(prod));
  res.alpha = alpha;
  res.s = s.s;
  res.k = k_vec;
  res.violated = res.value < -res.err_bound;
  return res;
}

WitnessField witness_scan(const FockState& state, const PhaseGrid& grid,
                          const SParam& s, double k, const EvalOptions& opt,
                          unsigned threads) {
  grid.validate();
  require_k_open(k);
  WitnessField field{grid, s.s, k, Eigen::MatrixXd(grid.n_im, grid.n_re), 0.0};
  std::vector<double> errs(grid.n_points(), 0.0);
  parallel_for(grid.n_points(), threads,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t idx = begin; idx < end; ++idx) {
                   const Complex alpha = grid.alpha_at(idx);
                   const DisplacedDiag dd =
                       displaced_diag_full(state, alpha, opt.tail_tol);
                   const auto [value, err] =
                       witness_two_from_diag(dd, s, k, opt.s_max);
                   field.values(static_cast<int>(idx) / grid.n_re,
                                static_cast<int>(idx) % grid.n_re) = value;
                   errs[idx] = err;
                 }
               });
  field.err_bound = *std::max_element(errs.begin(), errs.end());
  return field;
}

namespace {

struct Candidate {
  double value = std::numeric_limits<double>::infinity();
  double err = 0.0;
  // Tie-break key: (s index, k index, point index); refined points get
  // indices past the base grid so base candidates win exact ties.
  std::size_t si = 0, ki = 0, pi = 0;
  Complex alpha{0.0, 0.0};

  bool better_than(const Candidate& other) const {
    if (value != other.value) return value < other.value;
    return std::tie(si, ki, pi) < std::tie(other.si, other.ki, other.pi);
  }
};

}  // namespace

WitnessResult find_violation(const FockState& state, const PhaseGrid& grid,
                             const std::vector<double>& s_list,
                             const std::vector<double>& k_list,
                             const EvalOptions& opt, unsigned threads) {
  grid.validate();
  if (s_list.empty() || k_list.empty()) {
    throw ConfigError("find_violation needs non-empty s and k lists");
  }
  std::vector<SParam> sparams;
  sparams.reserve(s_list.size());
  for (double s : s_list) sparams.emplace_back(s);
  for (double k : k_list) require_k_open(k);

  const std::size_t n_points = grid.n_points();
  // The candidate order (value, then tie-break key) is total, so merging
  // partial minima under a lock is deterministic whatever the schedule.
  std::mutex merge_mutex;
  Candidate best;
  parallel_for(n_points, threads, [&](std::size_t begin, std::size_t end) {
    Candidate local;
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Complex alpha = grid.alpha_at(idx);
      const DisplacedDiag dd = displaced_diag_full(state, alpha, opt.tail_tol);
      for (std::size_t si = 0; si < sparams.size(); ++si) {
        for (std::size_t ki = 0; ki < k_list.size(); ++ki) {
          const auto [value, err] =
              witness_two_from_diag(dd, sparams[si], k_list[ki], opt.s_max);
          Candidate c{value, err, si, ki, idx, alpha};
          if (c.better_than(local)) local = c;
        }
      }
    }
    const std::lock_guard<std::mutex> lock(merge_mutex);
    if (local.better_than(best)) best = local;
  });

  // One half-step bisection level around the coarse minimum.
  const double hr = grid.step_re() / 2.0, hi = grid.step_im() / 2.0;
  std::size_t refined_index = n_points;
  for (int di = -1; di <= 1; ++di) {
    for (int dr = -1; dr <= 1; ++dr) {
      if (di == 0 && dr == 0) continue;
      const double re = best.alpha.real() + dr * hr;
      const double im = best.alpha.imag() + di * hi;
      const std::size_t pi = refined_index++;
      if ((hr == 0.0 && dr != 0) || (hi == 0.0 && di != 0)) continue;
      if (re < grid.re_min || re > grid.re_max || im < grid.im_min ||
          im > grid.im_max) {
        continue;
      }
      const Complex alpha{re, im};
      const DisplacedDiag dd = displaced_diag_full(state, alpha, opt.tail_tol);
      for (std::size_t si = 0; si < sparams.size(); ++si) {
        for (std::size_t ki = 0; ki < k_list.size(); ++ki) {
          const auto [value, err] =
              witness_two_from_diag(dd, sparams[si], k_list[ki], opt.s_max);
          Candidate c{value, err, si, ki, pi, alpha};
          if (c.better_than(best)) best = c;
        }
      }
    }
  }

  WitnessResult res;
  res.value = best.value;
  res.err_bound = best.err;
  res.alpha = best.alpha;
  res.s = s_list[best.si];
  res.k = {k_list[best.ki]};
  res.violated = best.value < -best.err;
  return res;
}

}  // namespace psw
