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

#include <json.hpp>
#include <ostream>
#include <string>

#include "psw/clicksim.hpp"
#include "psw/witness.hpp"

namespace psw {

using Json = nlohmann::json;

/// Shortest exact decimal representation (round-trips bit-for-bit).
std::string format_double(double value);

// JSON encodings.  Keys are part of the file-format contract; see README.

Json to_json(const FockState& state);       // {cutoff, re, im}
Json to_json(const PhaseGrid& grid);
Json to_json(const DistributionField& f);   // {grid, s, values, err_bound}
Json to_json(const WitnessField& f);        // {grid, s, k, values, err_bound}
Json to_json(const WitnessResult& r);       // {alpha_re, alpha_im, s, k|k_vec, ...}
Json to_json(const ClickEstimate& est, Complex alpha,
             const MultiplexConfig& cfg);

FockState fock_state_from_json(const Json& j,
                               double tail_tol = kDefaultTailTol);
PhaseGrid grid_from_json(const Json& j);

/// CSV with header "re_alpha,im_alpha,value", row-major over the grid
/// (imaginary axis outer, real axis inner).
void write_field_csv(std::ostream& os, const PhaseGrid& grid,
                     const Eigen::MatrixXd& values);

void write_text_file(const std::string& path, const std::string& content);
std::string dump_json(const Json& j);

}  // namespace psw
