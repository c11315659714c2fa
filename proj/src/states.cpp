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
#include "psw/states.hpp"

#include <Eigen/Eigenvalues>
#include <cassert>
#include <cmath>
#include <sstream>

#include "psw/errors.hpp"

namespace psw {

namespace {

void require_cutoff(int cutoff, int min_cutoff = 0) {
  if (cutoff < min_cutoff) {
    std::ostringstream msg;
    msg << "cutoff must be >= " << min_cutoff << ", got " << cutoff;
    throw ConfigError(msg.str());
  }
}

[[noreturn]] void throw_cutoff_too_small(const char* what, int cutoff,
                                         double tail, double tol) {
  std::ostringstream msg;
  msg << what << ": tail mass " << tail << " beyond cutoff " << cutoff
      << " exceeds tolerance " << tol;
  throw CutoffError(msg.str());
}

/// Builds a pure state from unnormalized amplitudes whose exact infinite-sum
/// normalization is norm2_exact; the shortfall becomes tail_mass.
FockState finish_pure(const char* what, Eigen::VectorXcd c, double norm2_exact,
                      double tail_tol) {
  const double partial = c.squaredNorm();
  const double tail = std::max(0.0, 1.0 - partial / norm2_exact);
  if (tail > tail_tol) {
    throw_cutoff_too_small(what, static_cast<int>(c.size()) - 1, tail, tail_tol);
  }
  c /= std::sqrt(partial);
  FockState state;
  state.rho = c * c.adjoint();
  state.tail_mass = tail;
  state.structure = StateStructure::Pure;
  state.amps = std::move(c);
#ifndef NDEBUG
  assert(std::abs(state.rho.trace().real() - 1.0) < 1e-12);
#endif
  return state;
}

FockState finish_diagonal(const char* what, Eigen::VectorXd p, double tail,
                          double tail_tol) {
  if (tail > tail_tol) {
    throw_cutoff_too_small(what, static_cast<int>(p.size()) - 1, tail, tail_tol);
  }
  p /= p.sum();
  FockState state;
  state.rho = p.cast<Complex>().asDiagonal();
  state.tail_mass = tail;
  state.structure = StateStructure::Diagonal;
  return state;
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

FockState make_coherent(Complex beta, int cutoff, double tail_tol) {
  require_cutoff(cutoff);
  const int n = cutoff + 1;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
  if (beta == Complex{0.0, 0.0}) {
    c(0) = 1.0;
    return finish_pure("make_coherent", std::move(c), 1.0, tail_tol);
  }
  c(0) = std::exp(-0.5 * std::norm(beta));
  for (int m = 1; m < n; ++m) c(m) = c(m - 1) * beta / std::sqrt(double(m));
  return finish_pure("make_coherent", std::move(c), 1.0, tail_tol);
}

FockState make_squeezed_vacuum(double r, double phi, int cutoff,
                               double tail_tol) {
  if (!(r >= 0.0 && r < 3.0)) {
    throw ConfigError("squeezing r must be in [0, 3)");
  }
  require_cutoff(cutoff);
  const int n = cutoff + 1;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
  c(0) = 1.0 / std::sqrt(std::cosh(r));
  // c_{2(m+1)} / c_{2m} = -e^{i phi} tanh(r) sqrt((2m+1)(2m+2)) / (2(m+1))
  const Complex ratio_base = -std::polar(std::tanh(r), phi);
  for (int m = 0; 2 * (m + 1) < n; ++m) {
    const double a = 2.0 * m + 1.0, b = 2.0 * m + 2.0;
    c(2 * (m + 1)) = c(2 * m) * ratio_base * std::sqrt(a * b) / b;
  }
  return finish_pure("make_squeezed_vacuum", std::move(c), 1.0, tail_tol);
}

FockState make_lossy_single_photon(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw ConfigError("loss parameter q must be in [0, 1]");
  }
  Eigen::VectorXd p(2);
  p << 1.0 - q, q;
  return finish_diagonal("make_lossy_single_photon", std::move(p), 0.0, 1.0);
}

FockState make_thermal(double nbar, int cutoff, double tail_tol) {
  if (!(nbar >= 0.0)) throw ConfigError("nbar must be >= 0");
  require_cutoff(cutoff);
  const int n = cutoff + 1;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  if (nbar == 0.0) {
    p(0) = 1.0;
    return finish_diagonal("make_thermal", std::move(p), 0.0, tail_tol);
  }
  const double q = nbar / (nbar + 1.0);
  p(0) = 1.0 / (nbar + 1.0);
  for (int k = 1; k < n; ++k) p(k) = p(k - 1) * q;
  const double tail = std::exp((cutoff + 1) * std::log(q));
  return finish_diagonal("make_thermal", std::move(p), tail, tail_tol);
}

FockState make_spats(double nbar, int cutoff, double tail_tol) {
  if (!(nbar >= 0.0)) throw ConfigError("nbar must be >= 0");
  require_cutoff(cutoff, 1);
  const int n = cutoff + 1;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  // rho_nn = n * p^{th}_{n-1} / (nbar + 1); vacuum support is removed exactly.
  const double q = nbar / (nbar + 1.0);
  double pth = 1.0 / (nbar + 1.0);
  for (int m = 1; m < n; ++m) {
    p(m) = m * pth / (nbar + 1.0);
    pth *= q;
  }
  const double tail = std::max(0.0, 1.0 - p.sum());
  return finish_diagonal("make_spats", std::move(p), tail, tail_tol);
}

FockState make_even_cat(Complex omega, int cutoff, double tail_tol) {
  require_cutoff(cutoff);
  const int n = cutoff + 1;
  const double x = std::norm(omega);
  if (x == 0.0) return make_coherent(0.0, cutoff, tail_tol);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
  // Even coherent amplitudes; exact norm of the even sector is e^{-x} cosh x.
  c(0) = std::exp(-0.5 * x);
  for (int m = 2; m < n; m += 2) {
    c(m) = c(m - 2) * omega * omega / std::sqrt(double(m) * (m - 1.0));
  }
  const double norm2 = std::exp(-x) * std::cosh(x);
  return finish_pure("make_even_cat", std::move(c), norm2, tail_tol);
}

FockState apply_loss(const FockState& state, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ConfigError("loss transmission epsilon must be in [0, 1]");
  }
  if (epsilon == 1.0) return state;
  const int n = state.dim();
  if (epsilon == 0.0) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    p(0) = 1.0;
    FockState out = finish_diagonal("apply_loss", std::move(p), 0.0, 1.0);
    out.tail_mass = state.tail_mass;
    return out;
  }
  const double log_eps = std::log(epsilon);
  const double log_1meps = std::log1p(-epsilon);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  // rho'_{m-j, n-j} += k_j(m) k_j(n) rho_{mn} with damping Kraus weights
  // k_j(m) = sqrt(binom(m, j) eps^{m-j} (1-eps)^j), accumulated in log space.
  Eigen::VectorXd kj(n);
  for (int j = 0; j < n; ++j) {
    for (int m = j; m < n; ++m) {
      kj(m) = std::exp(
          0.5 * (log_binomial(m, j) + (m - j) * log_eps + j * log_1meps));
    }
    for (int m = j; m < n; ++m) {
      for (int nn = j; nn < n; ++nn) {
        out(m - j, nn - j) += kj(m) * kj(nn) * state.rho(m, nn);
      }
    }
  }
  out /= out.trace().real();
  FockState result;
  result.rho = std::move(out);
  result.tail_mass = state.tail_mass;
  result.structure = state.structure == StateStructure::Diagonal
                         ? StateStructure::Diagonal
                         : StateStructure::General;
  return result;
}

PhotonStats photon_stats(const FockState& state) {
  PhotonStats stats;
  const int n = state.dim();
  double m1 = 0.0, m2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double p = std::max(0.0, state.rho(k, k).real());
    m1 += k * p;
    m2 += double(k) * k * p;
  }
  stats.mean_n = m1;
  stats.var_n = std::max(0.0, m2 - m1 * m1);
  if (m1 > 0.0) stats.mandel_q = stats.var_n / m1 - 1.0;
  return stats;
}

void validate_fock_state(const FockState& state, double psd_tol) {
  const int n = state.dim();
  if (n < 1) throw PreconditionError("empty density matrix");
  if (state.rho.cols() != n) throw PreconditionError("density matrix not square");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      if (state.rho(i, j) != std::conj(state.rho(j, i))) {
        throw PreconditionError("density matrix not exactly Hermitian");
      }
    }
  }
  if (std::abs(state.rho.trace().real() - 1.0) > 1e-12) {
    throw PreconditionError("trace differs from 1 by more than 1e-12");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(state.rho,
                                                     Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -psd_tol) {
    throw PreconditionError("density matrix not PSD within tolerance");
  }
  if (state.structure == StateStructure::Pure &&
      state.amps.size() != state.rho.rows()) {
    throw PreconditionError("pure-state amplitude cache has wrong size");
  }
}

FockState FockState::from_matrix(const Eigen::MatrixXcd& m, double tail_tol) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw ConfigError("density matrix must be square and non-empty");
  }
  const int n = static_cast<int>(m.rows());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ConfigError("density matrix not Hermitian within 1e-12");
  }
  FockState state;
  state.rho = 0.5 * (m + m.adjoint().eval());
  const double trace = state.rho.trace().real();
  if (!(trace > 0.0)) throw ConfigError("density matrix trace must be positive");
  if (std::abs(1.0 - trace) > tail_tol) {
    throw ConfigError("density matrix trace differs from 1 beyond tolerance");
  }
  state.tail_mass = std::max(0.0, 1.0 - trace);
  if (std::abs(1.0 - trace) > 1e-13) state.rho /= trace;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(state.rho);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw PreconditionError("density matrix not PSD within 1e-10");
  }

  bool diagonal = true;
  for (int i = 0; i < n && diagonal; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && state.rho(i, j) != Complex{0.0, 0.0}) {
        diagonal = false;
        break;
      }
    }
  }
  if (diagonal) {
    state.structure = StateStructure::Diagonal;
  } else if (state.rho.squaredNorm() >= 1.0 - 1e-12) {
    state.structure = StateStructure::Pure;
    state.amps = es.eigenvectors().col(n - 1);
  } else {
    state.structure = StateStructure::General;
  }
  return state;
}

GaussianSpec gaussian_vacuum() { return {}; }

GaussianSpec gaussian_coherent(Complex beta) {
  GaussianSpec spec;
  spec.mean = beta;
  return spec;
}

GaussianSpec gaussian_thermal(double nbar) {
  if (!(nbar >= 0.0)) throw ConfigError("nbar must be >= 0");
  GaussianSpec spec;
  spec.cov = (2.0 * nbar + 1.0) / 4.0 * Eigen::Matrix2d::Identity();
  return spec;
}

GaussianSpec gaussian_squeezed_vacuum(double r, double phi) {
  if (!(r >= 0.0)) throw ConfigError("squeezing r must be >= 0");
  // The squeezed axis sits at angle phi/2 in the (x, p) plane.
  Eigen::Matrix2d rot;
  const double c = std::cos(phi / 2.0), s = std::sin(phi / 2.0);
  rot << c, -s, s, c;
  Eigen::Matrix2d diag = Eigen::Matrix2d::Zero();
  diag(0, 0) = std::exp(-2.0 * r) / 4.0;
  diag(1, 1) = std::exp(2.0 * r) / 4.0;
  GaussianSpec spec;
  spec.cov = rot * diag * rot.transpose();
  return spec;
}

void validate_gaussian(const GaussianSpec& spec) {
  if ((spec.cov - spec.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ConfigError("covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(spec.cov);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw ConfigError("covariance must be positive definite");
  }
  if (spec.cov.determinant() < 1.0 / 16.0 - 1e-12) {
    throw ConfigError("covariance violates the purity bound det >= 1/16");
  }
}

}  // namespace psw
