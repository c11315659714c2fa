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

#include <cstdint>
#include <ostream>
#include <vector>

#include "psw/phasespace.hpp"

namespace psw {

/// Splitting ratios |u_i|^2 (summing to 1) and detector efficiency for the
/// multiplexed zero-count measurement.
struct MultiplexConfig {
  double eta = 1.0;
  std::vector<double> splits;

  int channels() const { return static_cast<int>(splits.size()); }
  void validate() const;
};

/// Monte Carlo zero-count estimates with binomial standard errors.
/// Deterministic given (seed, shots, config, state, alpha) and independent
/// of how shots are partitioned across threads.
struct ClickEstimate {
  double p_joint = 0.0;
  std::vector<double> p_single;
  double covariance = 0.0;  ///< p_joint - prod_i p_single[i]
  std::vector<double> std_err;
  double std_err_cov = 0.0;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
};

/// Probability to register zero photons after displacing by alpha, with
/// detector efficiency eta in (0, 1]:  p = sum_n (1 - eta)^n d_n(alpha).
/// Shares the series kernel with eval_s, so
/// P(alpha; s) = (2/(pi (1-s))) p  with  s = 1 - 2/eta  holds by construction.
double zero_count(const FockState& state, Complex alpha, double eta,
                  double tail_tol = kDisplacedTailTol);

/// Zero-count covariance of a two-channel split:
/// p_12(eta) - p_1(eta (1-t2)) p_2(eta t2),  t2 in (0, 1).
double covariance_exact(const FockState& state, Complex alpha, double eta,
                        double t2, double tail_tol = kDisplacedTailTol);

/// Multimode zero-count witness p_{1..N}(eta) - prod_i p_i(eta * splits_i).
/// The joint term reduces to zero_count(alpha, eta) by photon-number
/// conservation across a lossless splitter.
double multi_zero_count_witness(const FockState& state, Complex alpha,
                                const MultiplexConfig& cfg,
                                double tail_tol = kDisplacedTailTol);

/// Samples the correlation measurement: draw a photon number from the
/// displaced diagonal (truncation tail forces a click in every channel),
/// route photons multinomially by the splits, detect each with probability
/// eta.  Aborts with CutoffError when the tail bucket exceeds 1e-6.
///
/// audit, when non-null, receives one CSV row "shot,n_sampled,clicks_bitmask"
/// per shot in shot order.
ClickEstimate simulate_clicks(const FockState& state, Complex alpha,
                              const MultiplexConfig& cfg, std::int64_t shots,
                              std::uint64_t seed, unsigned threads = 0,
                              std::ostream* audit = nullptr);

}  // namespace psw
