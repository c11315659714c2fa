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
#include "psw/serialize.hpp"

#include <charconv>
#include <fstream>

#include "psw/errors.hpp"

namespace psw {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Json to_json(const FockState& state) {
  const int n = state.dim();
  Json re = Json::array(), im = Json::array();
  for (int i = 0; i < n; ++i) {
    Json re_row = Json::array(), im_row = Json::array();
    for (int j = 0; j < n; ++j) {
      re_row.push_back(state.rho(i, j).real());
      im_row.push_back(state.rho(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return Json{{"cutoff", state.cutoff()}, {"re", std::move(re)},
              {"im", std::move(im)}};
}

FockState fock_state_from_json(const Json& j, double tail_tol) {
  if (!j.is_object() || !j.contains("cutoff") || !j.contains("re") ||
      !j.contains("im")) {
    throw ConfigError("Fock state JSON must contain cutoff, re and im");
  }
  const int n = j.at("cutoff").get<int>() + 1;
  if (n < 1) throw ConfigError("cutoff must be >= 0");
  const Json& re = j.at("re");
  const Json& im = j.at("im");
  if (static_cast<int>(re.size()) != n || static_cast<int>(im.size()) != n) {
    throw ConfigError("re/im matrices must have cutoff + 1 rows");
  }
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(re[i].size()) != n ||
        static_cast<int>(im[i].size()) != n) {
      throw ConfigError("re/im matrices must be square");
    }
    for (int k = 0; k < n; ++k) {
      m(i, k) = Complex{re[i][k].get<double>(), im[i][k].get<double>()};
    }
  }
  return FockState::from_matrix(m, tail_tol);
}

Json to_json(const PhaseGrid& grid) {
  return Json{{"re_min", grid.re_min}, {"re_max", grid.re_max},
              {"im_min", grid.im_min}, {"im_max", grid.im_max},
              {"n_re", grid.n_re},     {"n_im", grid.n_im}};
}

PhaseGrid grid_from_json(const Json& j) {
  PhaseGrid grid;
  grid.re_min = j.at("re_min").get<double>();
  grid.re_max = j.at("re_max").get<double>();
  grid.im_min = j.at("im_min").get<double>();
  grid.im_max = j.at("im_max").get<double>();
  grid.n_re = j.at("n_re").get<int>();
  grid.n_im = j.at("n_im").get<int>();
  grid.validate();
  return grid;
}

namespace {

Json values_to_json(const Eigen::MatrixXd& values) {
  Json rows = Json::array();
  for (int i = 0; i < values.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < values.cols(); ++j) row.push_back(values(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Json to_json(const DistributionField& f) {
  return Json{{"grid", to_json(f.grid)},
              {"s", f.s.s},
              {"values", values_to_json(f.values)},
              {"err_bound", f.err_bound}};
}

Json to_json(const WitnessField& f) {
  return Json{{"grid", to_json(f.grid)},
              {"s", f.s},
              {"k", f.k},
              {"values", values_to_json(f.values)},
              {"err_bound", f.err_bound}};
}

Json to_json(const WitnessResult& r) {
  Json j{{"alpha_re", r.alpha.real()},
         {"alpha_im", r.alpha.imag()},
         {"s", r.s},
         {"value", r.value},
         {"err_bound", r.err_bound},
         {"violated", r.violated}};
  if (r.k.size() == 1) {
    j["k"] = r.k[0];
  } else {
    j["k_vec"] = r.k;
  }
  return j;
}

Json to_json(const ClickEstimate& est, Complex alpha,
             const MultiplexConfig& cfg) {
  return Json{{"alpha", {alpha.real(), alpha.imag()}},
              {"eta", cfg.eta},
              {"splits", cfg.splits},
              {"shots", est.shots},
              {"seed", est.seed},
              {"p_joint", est.p_joint},
              {"p_single", est.p_single},
              {"covariance", est.covariance},
              {"std_err", est.std_err},
              {"std_err_cov", est.std_err_cov}};
}

void write_field_csv(std::ostream& os, const PhaseGrid& grid,
                     const Eigen::MatrixXd& values) {
  os << "re_alpha,im_alpha,value\n";
  for (int i = 0; i < grid.n_im; ++i) {
    for (int j = 0; j < grid.n_re; ++j) {
      const Complex alpha = grid.alpha(i, j);
      os << format_double(alpha.real()) << ',' << format_double(alpha.imag())
         << ',' << format_double(values(i, j)) << '\n';
    }
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open output file: " + path);
  os << content;
  if (!os) throw Error("failed writing output file: " + path);
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace psw
