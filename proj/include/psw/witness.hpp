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

#include <vector>

#include "psw/phasespace.hpp"

namespace psw {

/// Left-hand side of a classicality inequality at one phase-space point.
/// Violation is declared only when value < -err_bound, so truncation noise
/// can never produce a false nonclassicality claim.
struct WitnessResult {
  double value = 0.0;
  double err_bound = 0.0;
  Complex alpha{0.0, 0.0};
  double s = 0.0;
  std::vector<double> k;  ///< one entry for the two-factor test, N for multimode
  bool violated = false;
};

/// Two-factor test  P(a;s) - pi/((1-k) k eta_s) P(a;s_k) P(a;s_{1-k}).
/// Non-negative for every classical state; k in (0, 1) open.
WitnessResult witness_two(const FockState& state, Complex alpha,
                          const SParam& s, double k,
                          const EvalOptions& opt = {});

/// Wigner-Husimi bound  W(a) - 2 pi Q(a)^2; the s = 0, k = 1/2 special case
/// of witness_two (shared implementation).
WitnessResult witness_wq(const FockState& state, Complex alpha,
                         const EvalOptions& opt = {});

/// N-channel generalization P(a;s) - (pi/eta_s)^{N-1} prod_i P(a;s_{k_i})/k_i
/// with sum k_i = 1.
WitnessResult witness_multi(const FockState& state, Complex alpha,
                            const SParam& s, const std::vector<double>& k_vec,
                            const EvalOptions& opt = {});

/// Witness left-hand side sampled over a grid (the data behind the lhs maps).
struct WitnessField {
  PhaseGrid grid;
  double s = 0.0;
  double k = 0.5;
  Eigen::MatrixXd values;
  double err_bound = 0.0;  ///< max over grid points
};

WitnessField witness_scan(const FockState& state, const PhaseGrid& grid,
                          const SParam& s, double k,
                          const EvalOptions& opt = {}, unsigned threads = 0);

/// Exhaustive minimum of witness_two over grid x s_list x k_list plus one
/// half-step refinement level around the argmin.  Deterministic: ties break
/// lexicographically by (s index, k index, grid row-major index), and the
/// result is independent of the thread count.
WitnessResult find_violation(const FockState& state, const PhaseGrid& grid,
                             const std::vector<double>& s_list,
                             const std::vector<double>& k_list,
                             const EvalOptions& opt = {}, unsigned threads = 0);

}  // namespace psw
