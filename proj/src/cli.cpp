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
#include "psw/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "psw/errors.hpp"
#include "psw/parallel.hpp"

namespace psw {

namespace {

void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

double get_finite(const Json& j, const std::string& key) {
  if (!j.at(key).is_number()) throw ConfigError(key + " must be a number");
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) throw ConfigError(key + " must be finite");
  return v;
}

Complex get_complex(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError(key + " must be a number or an [re, im] pair");
}

std::vector<double> get_number_list(const Json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const Json& e : v) {
      if (!e.is_number()) throw ConfigError(key + " entries must be numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw ConfigError(key + " must be a number or an array of numbers");
  }
  for (double x : out) {
    if (!std::isfinite(x)) throw ConfigError(key + " entries must be finite");
  }
  return out;
}

StateConfig parse_state_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("state must be an object");
  if (!j.contains("name")) throw ConfigError("state.name is required");
  StateConfig sc;
  sc.name = j.at("name").get<std::string>();

  std::set<std::string> allowed{"name", "cutoff", "gaussian"};
  if (sc.name == "vacuum") {
  } else if (sc.name == "coherent") {
    allowed.insert("beta");
  } else if (sc.name == "squeezed_vacuum" || sc.name == "squeezed") {
    allowed.insert("r");
    allowed.insert("phi");
  } else if (sc.name == "lossy_single_photon") {
    allowed.insert("q");
  } else if (sc.name == "thermal" || sc.name == "spats") {
    allowed.insert("nbar");
  } else if (sc.name == "even_cat" || sc.name == "cat") {
    allowed.insert("omega");
  } else if (sc.name == "custom") {
    allowed.insert("file");
  } else {
    throw ConfigError("unknown state name '" + sc.name + "'");
  }
  reject_unknown_keys(j, allowed, "state");

  if (j.contains("beta")) sc.beta = get_complex(j, "beta");
  if (j.contains("omega")) sc.omega = get_complex(j, "omega");
  if (j.contains("r")) sc.r = get_finite(j, "r");
  if (j.contains("phi")) sc.phi = get_finite(j, "phi");
  if (j.contains("q")) sc.q = get_finite(j, "q");
  if (j.contains("nbar")) sc.nbar = get_finite(j, "nbar");
  if (j.contains("file")) sc.state_file = j.at("file").get<std::string>();
  if (j.contains("gaussian")) sc.gaussian = j.at("gaussian").get<bool>();

  if (j.contains("cutoff")) {
    const Json& c = j.at("cutoff");
    if (c.is_string() && c.get<std::string>() == "auto") {
      sc.auto_cutoff = true;
    } else if (c.is_number_integer()) {
      sc.cutoff = c.get<int>();
      if (sc.cutoff < 0) throw ConfigError("cutoff must be >= 0");
    } else {
      throw ConfigError("cutoff must be an integer or \"auto\"");
    }
  } else {
    sc.auto_cutoff = true;
  }

  // Range checks happen here so bad configs fail before any allocation.
  if (sc.name == "lossy_single_photon" && !(sc.q >= 0.0 && sc.q <= 1.0)) {
    throw ConfigError("q must be in [0, 1]");
  }
  if ((sc.name == "squeezed_vacuum" || sc.name == "squeezed") &&
      !(sc.r >= 0.0 && sc.r < 3.0)) {
    throw ConfigError("r must be in [0, 3)");
  }
  if ((sc.name == "thermal" || sc.name == "spats") && !(sc.nbar >= 0.0)) {
    throw ConfigError("nbar must be >= 0");
  }
  if (sc.gaussian && sc.name != "vacuum" && sc.name != "coherent" &&
      sc.name != "squeezed_vacuum" && sc.name != "squeezed" &&
      sc.name != "thermal") {
    throw ConfigError("gaussian evaluation is only available for Gaussian "
                      "state families");
  }
  if (sc.name == "custom" && sc.state_file.empty()) {
    throw ConfigError("custom state needs a 'file' path");
  }
  return sc;
}

PhaseGrid parse_grid(const Json& j) {
  reject_unknown_keys(
      j, {"re_min", "re_max", "im_min", "im_max", "n_re", "n_im"}, "grid");
  return grid_from_json(j);
}

MultiplexConfig parse_multiplex(const Json& j) {
  reject_unknown_keys(j, {"eta", "splits"}, "multiplex");
  MultiplexConfig cfg;
  cfg.eta = get_finite(j, "eta");
  if (!j.contains("splits") || !j.at("splits").is_array()) {
    throw ConfigError("multiplex.splits must be an array");
  }
  for (const Json& e : j.at("splits")) cfg.splits.push_back(e.get<double>());
  cfg.validate();
  return cfg;
}

}  // namespace

RunConfig parse_run_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(j,
                      {"state", "grid", "alpha", "s", "k", "k_vec", "multiplex",
                       "shots", "seed", "format", "out", "audit", "tail_tol",
                       "threads"},
                      "config");
  RunConfig cfg;
  if (!j.contains("state")) throw ConfigError("config.state is required");
  cfg.state = parse_state_config(j.at("state"));
  if (j.contains("grid")) cfg.grid = parse_grid(j.at("grid"));
  if (j.contains("alpha")) cfg.alpha = get_complex(j, "alpha");
  if (j.contains("s")) {
    cfg.s_list = get_number_list(j.at("s"), "s");
    for (double s : cfg.s_list) {
      if (!(s < 1.0)) throw ConfigError("every s must be < 1");
    }
  }
  if (j.contains("k")) {
    cfg.k_list = get_number_list(j.at("k"), "k");
    for (double k : cfg.k_list) {
      if (!(k > 0.0 && k < 1.0)) throw ConfigError("every k must be in (0, 1)");
    }
  }
  if (j.contains("k_vec")) {
    cfg.k_vec = get_number_list(j.at("k_vec"), "k_vec");
    double sum = 0.0;
    for (double k : cfg.k_vec) {
      if (!(k > 0.0 && k < 1.0)) {
        throw ConfigError("k_vec entries must be in (0, 1)");
      }
      sum += k;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ConfigError("k_vec must sum to 1 within 1e-12");
    }
  }
  if (j.contains("multiplex")) cfg.multiplex = parse_multiplex(j.at("multiplex"));
  if (j.contains("shots")) {
    cfg.shots = j.at("shots").get<std::int64_t>();
    if (cfg.shots < 1) throw ConfigError("shots must be >= 1");
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("format")) {
    cfg.format = j.at("format").get<std::string>();
    if (cfg.format != "csv" && cfg.format != "json") {
      throw ConfigError("format must be \"csv\" or \"json\"");
    }
  }
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  if (j.contains("audit")) cfg.audit = j.at("audit").get<std::string>();
  if (j.contains("tail_tol")) {
    cfg.tail_tol = get_finite(j, "tail_tol");
    if (!(cfg.tail_tol > 0.0 && cfg.tail_tol < 1.0)) {
      throw ConfigError("tail_tol must be in (0, 1)");
    }
  }
  if (j.contains("threads")) {
    const int t = j.at("threads").get<int>();
    if (t < 0) throw ConfigError("threads must be >= 0");
    cfg.threads = static_cast<unsigned>(t);
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  Json j;
  try {
    is >> j;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

namespace {

/// Poisson scale that displacement adds on top of the state's own support.
double displacement_reach(const RunConfig& cfg, const FockState& state) {
  double max_abs = 0.0;
  if (cfg.grid) max_abs = cfg.grid->max_abs_alpha();
  if (cfg.alpha) max_abs = std::max(max_abs, std::abs(*cfg.alpha));
  const double amp = max_abs + std::sqrt(photon_stats(state).mean_n) + 1.0;
  return amp * amp;
}

FockState build_fock(const RunConfig& cfg) {
  const StateConfig& sc = cfg.state;
  auto maker = [&](int cutoff) -> FockState {
    if (sc.name == "vacuum") return make_coherent(0.0, cutoff, cfg.tail_tol);
    if (sc.name == "coherent") return make_coherent(sc.beta, cutoff, cfg.tail_tol);
    if (sc.name == "squeezed_vacuum" || sc.name == "squeezed") {
      return make_squeezed_vacuum(sc.r, sc.phi, cutoff, cfg.tail_tol);
    }
    if (sc.name == "lossy_single_photon") return make_lossy_single_photon(sc.q);
    if (sc.name == "thermal") return make_thermal(sc.nbar, cutoff, cfg.tail_tol);
    if (sc.name == "spats") return make_spats(sc.nbar, cutoff, cfg.tail_tol);
    if (sc.name == "even_cat" || sc.name == "cat") {
      return make_even_cat(sc.omega, cutoff, cfg.tail_tol);
    }
    throw ConfigError("state '" + sc.name + "' has no Fock constructor");
  };
  if (sc.name == "custom") {
    std::ifstream is(sc.state_file);
    if (!is) throw ConfigError("cannot open state file: " + sc.state_file);
    Json j;
    try {
      is >> j;
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("state file is not valid JSON: ") + e.what());
    }
    return fock_state_from_json(j, cfg.tail_tol);
  }
  if (!sc.auto_cutoff) return maker(sc.cutoff);
  FockState state = with_auto_cutoff(maker);
  // Auto mode also budgets for the requested displacements.
  const int needed =
      suggest_cutoff(displacement_reach(cfg, state), kDisplacedTailTol / 100.0);
  if (needed > state.cutoff()) state = maker(needed);
  return state;
}

GaussianSpec build_gaussian(const StateConfig& sc) {
  if (sc.name == "vacuum") return gaussian_vacuum();
  if (sc.name == "coherent") return gaussian_coherent(sc.beta);
  if (sc.name == "squeezed_vacuum" || sc.name == "squeezed") {
    return gaussian_squeezed_vacuum(sc.r, sc.phi);
  }
  if (sc.name == "thermal") return gaussian_thermal(sc.nbar);
  throw ConfigError("state '" + sc.name + "' has no Gaussian form");
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix + path.substr(dot);
}

std::string sibling_json(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + suffix + ".json";
  }
  return path.substr(0, dot) + suffix + ".json";
}

void require_out(const RunConfig& cfg) {
  if (cfg.out.empty()) {
    throw ConfigError("an output path is required (config.out or --out)");
  }
}

void write_distribution(const DistributionField& field, const std::string& path,
                        const std::string& format) {
  if (format == "csv") {
    std::ostringstream os;
    write_field_csv(os, field.grid, field.values);
    write_text_file(path, os.str());
  } else {
    write_text_file(path, dump_json(to_json(field)));
  }
  std::cout << "wrote " << path << " (min=" << format_double(field.values.minCoeff())
            << ", max=" << format_double(field.values.maxCoeff())
            << ", err_bound=" << format_double(field.err_bound) << ")\n";
}

void write_witness_field(const WitnessField& field, const std::string& path,
                         const std::string& format) {
  if (format == "csv") {
    std::ostringstream os;
    write_field_csv(os, field.grid, field.values);
    write_text_file(path, os.str());
  } else {
    write_text_file(path, dump_json(to_json(field)));
  }
  std::cout << "wrote " << path << " (min=" << format_double(field.values.minCoeff())
            << ", err_bound=" << format_double(field.err_bound) << ")\n";
}

}  // namespace

BuiltState build_state(const RunConfig& cfg) {
  BuiltState built;
  if (cfg.state.gaussian) {
    built.gauss = build_gaussian(cfg.state);
  } else {
    built.fock = build_fock(cfg);
  }
  return built;
}

void cmd_dist(const RunConfig& cfg) {
  if (!cfg.grid) throw ConfigError("dist needs a grid");
  if (cfg.s_list.empty()) throw ConfigError("dist needs at least one s value");
  require_out(cfg);
  const BuiltState built = build_state(cfg);
  const EvalOptions opt{};
  for (std::size_t i = 0; i < cfg.s_list.size(); ++i) {
    const SParam s(cfg.s_list[i]);
    const DistributionField field =
        built.gauss ? scan(*built.gauss, *cfg.grid, s, cfg.threads)
                    : scan(*built.fock, *cfg.grid, s, opt, cfg.threads);
    std::string path = cfg.out;
    if (cfg.s_list.size() > 1) {
      path = with_suffix(path, "_s" + format_double(s.s));
    }
    write_distribution(field, path, cfg.format);
  }
}

void cmd_witness(const RunConfig& cfg) {
  const RunConfig& c = cfg;
  if (!c.k_vec.empty()) {
    // Multimode witness at a single point.
    if (!c.alpha) throw ConfigError("multimode witness needs alpha");
    if (c.s_list.size() != 1) {
      throw ConfigError("multimode witness needs exactly one s value");
    }
    require_out(cfg);
    const BuiltState built = build_state(cfg);
    if (!built.fock) throw ConfigError("witness needs a Fock-basis state");
    const WitnessResult res =
        witness_multi(*built.fock, *c.alpha, SParam(c.s_list[0]), c.k_vec);
    write_text_file(c.out, dump_json(to_json(res)));
    std::cout << dump_json(to_json(res));
    return;
  }
  if (c.s_list.empty() || c.k_list.empty()) {
    throw ConfigError("witness needs s and k");
  }
  const BuiltState built = build_state(cfg);
  if (!built.fock) throw ConfigError("witness needs a Fock-basis state");
  if (c.grid) {
    require_out(cfg);
    for (std::size_t si = 0; si < c.s_list.size(); ++si) {
      for (std::size_t ki = 0; ki < c.k_list.size(); ++ki) {
        const WitnessField field =
            witness_scan(*built.fock, *c.grid, SParam(c.s_list[si]),
                         c.k_list[ki], {}, c.threads);
        std::string path = c.out;
        if (c.s_list.size() * c.k_list.size() > 1) {
          path = with_suffix(path, "_s" + format_double(field.s) + "_k" +
                                       format_double(field.k));
        }
        write_witness_field(field, path, c.format);
      }
    }
    const WitnessResult best =
        find_violation(*built.fock, *c.grid, c.s_list, c.k_list, {}, c.threads);
    write_text_file(sibling_json(c.out, "_summary"), dump_json(to_json(best)));
    std::cout << dump_json(to_json(best));
    return;
  }
  if (!c.alpha) throw ConfigError("witness needs a grid or an alpha");
  if (c.s_list.size() != 1 || c.k_list.size() != 1) {
    throw ConfigError("pointwise witness needs exactly one s and one k");
  }
  require_out(cfg);
  const WitnessResult res =
      witness_two(*built.fock, *c.alpha, SParam(c.s_list[0]), c.k_list[0]);
  write_text_file(c.out, dump_json(to_json(res)));
  std::cout << dump_json(to_json(res));
}

void cmd_clicksim(const RunConfig& cfg) {
  if (!cfg.multiplex) throw ConfigError("clicksim needs a multiplex config");
  if (cfg.shots < 1) throw ConfigError("clicksim needs shots >= 1");
  require_out(cfg);
  const Complex alpha = cfg.alpha.value_or(Complex{0.0, 0.0});
  const BuiltState built = build_state(cfg);
  if (!built.fock) throw ConfigError("clicksim needs a Fock-basis state");
  const FockState& state = *built.fock;
  const MultiplexConfig& mx = *cfg.multiplex;

  std::ostringstream audit_os;
  ClickEstimate est =
      simulate_clicks(state, alpha, mx, cfg.shots, cfg.seed, cfg.threads,
                      cfg.audit.empty() ? nullptr : &audit_os);
  if (!cfg.audit.empty()) write_text_file(cfg.audit, audit_os.str());

  const double exact =
      mx.channels() == 2
          ? covariance_exact(state, alpha, mx.eta, mx.splits[1])
          : multi_zero_count_witness(state, alpha, mx);
  const double sigma =
      est.std_err_cov > 0.0
          ? std::abs(est.covariance - exact) / est.std_err_cov
          : (est.covariance == exact ? 0.0
                                     : std::numeric_limits<double>::infinity());
  Json j{{"estimate", to_json(est, alpha, mx)},
         {"exact_covariance", exact},
         {"sigma_units", sigma}};
  write_text_file(cfg.out, dump_json(j));
  std::cout << dump_json(j);
}

namespace {

void figure_fig1(const std::string& out, const std::string& format,
                 unsigned threads) {
  const FockState state = make_squeezed_vacuum(0.3, 0.0, 60);
  const PhaseGrid grid{-3.0, 3.0, -3.0, 3.0, 121, 121};
  write_distribution(scan(state, grid, SParam::wigner(), {}, threads),
                     with_suffix(out, "_wigner"), format);
  write_distribution(scan(state, grid, SParam::husimi(), {}, threads),
                     with_suffix(out, "_husimi"), format);
  write_witness_field(
      witness_scan(state, grid, SParam::wigner(), 0.5, {}, threads),
      with_suffix(out, "_witness"), format);
}

void figure_fig2(const std::string& out, const std::string& format) {
  std::ostringstream csv;
  csv << "q,witness_wq,wigner0\n";
  Json rows = Json::array();
  for (int i = 0; i <= 100; ++i) {
    const double q = i * 0.01;
    const FockState state = make_lossy_single_photon(q);
    const WitnessResult w = witness_wq(state, 0.0);
    const double w0 = eval_s(state, 0.0, SParam::wigner()).value;
    csv << format_double(q) << ',' << format_double(w.value) << ','
        << format_double(w0) << '\n';
    rows.push_back(Json{{"q", q}, {"witness_wq", w.value}, {"wigner0", w0}});
  }
  if (format == "csv") {
    write_text_file(out, csv.str());
  } else {
    write_text_file(out, dump_json(rows));
  }
  std::cout << "wrote " << out << "\n";
}

void figure_fig3(const std::string& out, const std::string& format,
                 unsigned threads) {
  // SPATS family is diagonal, so its witness fields are phase symmetric and
  // the minimum over phase space lies on the non-negative real axis.
  constexpr int kCutoff = 60;
  constexpr int kAlphaPoints = 31;  // alpha in [0, 3], step 0.1
  std::ostringstream csv;
  csv << "nbar,epsilon,loss,mandel_q,wigner0,witness_min,witness_err,violated\n";
  Json rows = Json::array();
  std::vector<std::string> lines(41 * 51);
  std::vector<Json> jrows(41 * 51);
  parallel_for(lines.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const int i_n = static_cast<int>(idx) / 51;
      const int i_e = static_cast<int>(idx) % 51;
      const double nbar = i_n * 0.05;
      const double eps = i_e * 0.02;
      const FockState lossy = apply_loss(make_spats(nbar, kCutoff), eps);
      const PhotonStats stats = photon_stats(lossy);
      const double w0 = eval_s(lossy, 0.0, SParam::wigner()).value;
      double wmin = std::numeric_limits<double>::infinity();
      double werr = 0.0;
      for (int a = 0; a < kAlphaPoints; ++a) {
        const WitnessResult w = witness_wq(lossy, Complex{a * 0.1, 0.0});
        wmin = std::min(wmin, w.value);
        werr = std::max(werr, w.err_bound);
      }
      const bool violated = wmin < -werr;
      const double mandel =
          stats.mandel_q.value_or(std::numeric_limits<double>::quiet_NaN());
      std::ostringstream line;
      line << format_double(nbar) << ',' << format_double(eps) << ','
           << format_double(1.0 - eps) << ',' << format_double(mandel) << ','
           << format_double(w0) << ',' << format_double(wmin) << ','
           << format_double(werr) << ',' << (violated ? 1 : 0) << '\n';
      lines[idx] = line.str();
      jrows[idx] = Json{{"nbar", nbar},
                        {"epsilon", eps},
                        {"loss", 1.0 - eps},
                        {"mandel_q", stats.mandel_q
                                         ? Json(*stats.mandel_q)
                                         : Json(nullptr)},
                        {"wigner0", w0},
                        {"witness_min", wmin},
                        {"witness_err", werr},
                        {"violated", violated}};
    }
  });
  for (const std::string& line : lines) csv << line;
  for (Json& r : jrows) rows.push_back(std::move(r));
  if (format == "csv") {
    write_text_file(out, csv.str());
  } else {
    write_text_file(out, dump_json(rows));
  }
  std::cout << "wrote " << out << "\n";
}

void figure_fig5(const std::string& out, const std::string& format,
                 unsigned threads) {
  const FockState state = make_even_cat(0.7, 40);
  const PhaseGrid grid{-2.0, 2.0, -2.0, 2.0, 81, 81};
  const WitnessField field =
      witness_scan(state, grid, SParam(-3.0), 0.5, {}, threads);
  write_witness_field(field, out, format);
}

}  // namespace

void cmd_figure(const std::string& name, const std::string& out,
                const std::string& format, unsigned threads) {
  if (out.empty()) throw ConfigError("figure needs an output path (--out)");
  if (format != "csv" && format != "json") {
    throw ConfigError("format must be \"csv\" or \"json\"");
  }
  if (name == "fig1") {
    figure_fig1(out, format, threads);
  } else if (name == "fig2") {
    figure_fig2(out, format);
  } else if (name == "fig3") {
    figure_fig3(out, format, threads);
  } else if (name == "fig5") {
    figure_fig5(out, format, threads);
  } else {
    throw ConfigError("unknown figure preset '" + name +
                      "' (expected fig1, fig2, fig3 or fig5)");
  }
}

namespace {

unsigned threads_from_env() {
  const char* env = std::getenv("PSW_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 0) {
    throw ConfigError("PSW_THREADS must be a non-negative integer");
  }
  return static_cast<unsigned>(v);
}

void print_error_json(const std::string& type, const std::string& message) {
  Json j{{"error", Json{{"type", type}, {"message", message}}}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
  CLI::App app{"phase-space distributions and nonclassicality witnesses"};
  app.require_subcommand(1);

  std::string config_path, out, format, figure_name;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* copt = sub->add_option("--config", config_path, "JSON run config");
    if (needs_config) copt->required();
    sub->add_option("--out", out, "output path (overrides config.out)");
    sub->add_option("--format", format, "csv or json (overrides config)");
    sub->add_option("--seed", seed, "RNG seed (overrides config.seed)")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--threads", threads,
                    "worker threads, 0 = auto (PSW_THREADS as fallback)");
  };

  CLI::App* dist = app.add_subcommand("dist", "sample P(alpha; s) on a grid");
  add_common(dist, true);
  CLI::App* witness =
      app.add_subcommand("witness", "classicality-inequality left-hand sides");
  add_common(witness, true);
  CLI::App* clicksim =
      app.add_subcommand("clicksim", "Monte Carlo zero-count correlation run");
  add_common(clicksim, true);
  CLI::App* figure =
      app.add_subcommand("figure", "reproduce a pinned figure data set");
  figure->add_option("name", figure_name, "fig1 | fig2 | fig3 | fig5")
      ->required();
  add_common(figure, false);

  std::vector<const char*> argv;
  argv.push_back("psw");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      throw ConfigError(e.what());
    }

    unsigned thread_count =
        threads >= 0 ? static_cast<unsigned>(threads) : threads_from_env();

    if (figure->parsed()) {
      cmd_figure(figure_name, out, format.empty() ? "csv" : format,
                 thread_count);
      return 0;
    }

    RunConfig cfg = load_run_config(config_path);
    if (!out.empty()) cfg.out = out;
    if (!format.empty()) {
      if (format != "csv" && format != "json") {
        throw ConfigError("format must be \"csv\" or \"json\"");
      }
      cfg.format = format;
    }
    if (seed_set) cfg.seed = seed;
    if (threads >= 0 || thread_count > 0) cfg.threads = thread_count;

    if (dist->parsed()) {
      cmd_dist(cfg);
    } else if (witness->parsed()) {
      cmd_witness(cfg);
    } else if (clicksim->parsed()) {
      cmd_clicksim(cfg);
    }
    return 0;
  } catch (const ConfigError& e) {
    print_error_json("config", e.what());
    return 2;
  } catch (const PreconditionError& e) {
    print_error_json("precondition", e.what());
    return 3;
  } catch (const std::exception& e) {
    print_error_json("internal", e.what());
    return 1;
  }
}

}  // namespace psw
