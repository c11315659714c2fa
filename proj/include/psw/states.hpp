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
#include <complex>
#include <optional>

#include "psw/errors.hpp"

namespace psw {

using Complex = std::complex<double>;

/// Default bound on the Fock-tail mass discarded at construction.
inline constexpr double kDefaultTailTol = 1e-10;

/// Bochner-criterion threshold quoted for the SPATS family (reference only,
/// the criterion itself is not implemented).
inline constexpr double kBochnerNbarThreshold = 0.386;

/// Storage hint used to pick the cheapest displaced-diagonal algorithm.
/// All three paths compute the same numbers; only the cost differs.
enum class StateStructure { General, Diagonal, Pure };

/// Truncated Fock-basis density matrix.
///
/// Invariants after construction: rho is exactly Hermitian, has unit trace
/// within 1e-12 (renormalized after truncation), is PSD within 1e-10, and
/// the discarded tail mass is recorded in tail_mass.
struct FockState {
  Eigen::MatrixXcd rho;
  double tail_mass = 0.0;
  StateStructure structure = StateStructure::General;
  Eigen::VectorXcd amps;  ///< state vector when structure == Pure

  int cutoff() const { return static_cast<int>(rho.rows()) - 1; }
  int dim() const { return static_cast<int>(rho.rows()); }

  /// Wraps a user-supplied matrix, validating Hermiticity (1e-12), PSD
  /// (1e-10) and trace, then renormalizing.  Detects diagonal and pure
  /// structure so later evaluations can use the cheap paths.
  static FockState from_matrix(const Eigen::MatrixXcd& m,
                               double tail_tol = kDefaultTailTol);
};

/// Mean/covariance parametrization of a Gaussian state at Wigner ordering,
/// over (Re alpha, Im alpha) with vacuum covariance I/4.
struct GaussianSpec {
  Complex mean{0.0, 0.0};
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity() / 4.0;
};

/// Photon-number statistics of a state.  mandel_q is empty when mean_n == 0.
struct PhotonStats {
  double mean_n = 0.0;
  double var_n = 0.0;
  std::optional<double> mandel_q;
};

// State constructors.  All of them truncate at the given cutoff, fail with
// CutoffError when the discarded mass exceeds tail_tol, and renormalize.

FockState make_coherent(Complex beta, int cutoff,
                        double tail_tol = kDefaultTailTol);

/// Squeezed vacuum with xi = r * exp(i*phi); only even Fock components.
/// Requires r in [0, 3).
FockState make_squeezed_vacuum(double r, double phi, int cutoff,
                               double tail_tol = kDefaultTailTol);

/// q|1><1| + (1-q)|0><0| at cutoff 1.
FockState make_lossy_single_photon(double q);

FockState make_thermal(double nbar, int cutoff,
                       double tail_tol = kDefaultTailTol);

/// Single-photon-added thermal state, diagonal closed form
/// rho_nn = n * p_{n-1} / (nbar + 1).
FockState make_spats(double nbar, int cutoff,
                     double tail_tol = kDefaultTailTol);

/// Normalized even superposition of |omega> and |-omega>.
FockState make_even_cat(Complex omega, int cutoff,
                        double tail_tol = kDefaultTailTol);

/// Binomial loss channel with transmission epsilon in [0, 1].
FockState apply_loss(const FockState& state, double epsilon);

PhotonStats photon_stats(const FockState& state);

/// Throws PreconditionError if any FockState invariant is broken.
/// Runs an eigendecomposition, so it is meant for tests and ingest paths.
void validate_fock_state(const FockState& state, double psd_tol = 1e-10);

/// Retries `make(cutoff)` with doubled cutoffs until it stops throwing
/// CutoffError.  make must accept an int cutoff and return a FockState.
template <typename Maker>
FockState with_auto_cutoff(Maker&& make, int initial_cutoff = 8,
                           int max_cutoff = 16384) {
  for (int nc = initial_cutoff; nc <= max_cutoff; nc *= 2) {
    try {
      return make(nc);
    } catch (const CutoffError&) {
      if (nc * 2 > max_cutoff) throw;
    }
  }
  throw CutoffError("auto-cutoff exceeded max_cutoff");
}

// Gaussian parameter sets for the exact evaluation path.

GaussianSpec gaussian_vacuum();
GaussianSpec gaussian_coherent(Complex beta);
GaussianSpec gaussian_thermal(double nbar);
GaussianSpec gaussian_squeezed_vacuum(double r, double phi);

/// Throws ConfigError on an asymmetric or unphysical covariance
/// (eigenvalues must be positive and det >= 1/16 up to tolerance).
void validate_gaussian(const GaussianSpec& spec);

}  // namespace psw
