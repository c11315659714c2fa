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
#include <optional>
#include <string>
#include <vector>

#include "psw/serialize.hpp"

namespace psw {

/// State family selection parsed from the config's "state" object.
struct StateConfig {
  std::string name;
  Complex beta{0.0, 0.0};
  Complex omega{0.0, 0.0};
  double r = 0.0;
  double phi = 0.0;
  double q = 0.0;
  double nbar = 0.0;
  int cutoff = -1;
  bool auto_cutoff = false;
  bool gaussian = false;
  std::string state_file;  ///< for name == "custom"
};

/// One fully validated run description.  Parsing rejects unknown keys and
/// validates every numeric range before any state matrix is allocated.
struct RunConfig {
  StateConfig state;
  std::optional<PhaseGrid> grid;
  std::optional<Complex> alpha;
  std::vector<double> s_list;
  std::vector<double> k_list;
  std::vector<double> k_vec;
  std::optional<MultiplexConfig> multiplex;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
  std::string format = "csv";  // csv | json
  std::string out;
  std::string audit;  ///< optional shot-record CSV (clicksim)
  double tail_tol = kDefaultTailTol;
  unsigned threads = 0;
};

RunConfig parse_run_config(const Json& j);
RunConfig load_run_config(const std::string& path);

/// Either representation of the configured state.
struct BuiltState {
  std::optional<FockState> fock;
  std::optional<GaussianSpec> gauss;
};
BuiltState build_state(const RunConfig& cfg);

// Subcommand bodies.  They throw ConfigError / PreconditionError; cli_run
// maps those to exit codes 2 / 3 and prints a machine-readable error JSON.
void cmd_dist(const RunConfig& cfg);
void cmd_witness(const RunConfig& cfg);
void cmd_clicksim(const RunConfig& cfg);
void cmd_figure(const std::string& name, const std::string& out,
                const std::string& format, unsigned threads);

/// Full command-line entry point (args without the program name).
/// Returns the process exit code: 0 success, 2 config error, 3 numerical
/// precondition error, 1 unexpected failure.
int cli_run(const std::vector<std::string>& args);

}  // namespace psw
