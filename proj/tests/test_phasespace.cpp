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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "psw/phasespace.hpp"

using namespace psw;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("SParam derived values") {
  const SParam w = SParam::wigner();
  CHECK(w.eta == 2.0);
  const SParam q = SParam::husimi();
  CHECK(q.eta == 1.0);
  CHECK(SParam(0.0).split(0.5).s == -1.0);
  CHECK(SParam(-3.0).split(0.5).s == -7.0);
  CHECK(SParam(0.0).split(1.0 / 3.0).s == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(SParam::from_efficiency(0.5).s == -3.0);
  CHECK_THROWS_AS(SParam(1.0), ConfigError);
  CHECK_THROWS_AS(SParam(0.0).split(0.0), ConfigError);
  CHECK_THROWS_AS(SParam(0.0).split(1.0), ConfigError);
}

TEST_CASE("displaced-Fock matrix against the matrix-exponential oracle") {
  const Complex alpha{0.6, 0.3};
  const Eigen::MatrixXcd fast = displaced_fock_matrix(alpha, 40);
  const Eigen::MatrixXcd slow = oracle::displacement_via_expm(alpha, 40);
  // Compare well inside the truncation where the expm oracle is converged.
  CHECK((fast.topLeftCorner(12, 12) - slow.topLeftCorner(12, 12))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("displaced-Fock matrix against high-precision reference values") {
  for (const auto& e : oracle::kDispTable) {
    const int size = std::max(e.m, e.n) + 1;
    const Eigen::MatrixXcd d = displaced_fock_matrix(e.alpha, size);
    CHECK(std::abs(d(e.m, e.n) - e.value) < 1e-12);
  }
}

TEST_CASE("displaced-Fock matrix columns stay subnormalized") {
  const Eigen::MatrixXcd d = displaced_fock_matrix({1.3, -0.9}, 120);
  for (int n = 0; n < 120; ++n) {
    const double colnorm = d.col(n).squaredNorm();
    CHECK(colnorm <= 1.0 + 1e-12);
    if (n < 60) CHECK(colnorm == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("displaced diagonal") {
  SUBCASE("alpha = 0 returns diag(rho) exactly") {
    const FockState st = make_even_cat(0.7, 25);
    const Eigen::VectorXd d = displaced_diag(st, 0.0);
    CHECK((d - st.rho.diagonal().real()).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("displaced vacuum is Poissonian") {
    const FockState vac = make_coherent(0.0, 40);
    const Complex beta{0.9, -0.5};
    const Eigen::VectorXd d = displaced_diag(vac, beta);
    for (int n = 0; n <= 20; ++n) {
      CHECK(d(n) ==
            doctest::Approx(oracle::poisson_pmf(n, std::norm(beta))).epsilon(1e-10));
    }
  }
  SUBCASE("|1><1| closed form") {
    const FockState one = make_spats(0.0, 50);
    const Complex alpha{0.8, 0.4};
    const double x = std::norm(alpha);
    const Eigen::VectorXd d = displaced_diag(one, alpha);
    for (int n = 0; n <= 20; ++n) {
      const double expected =
          std::exp(-x) * std::pow(x, n - 1.0) * (n - x) * (n - x) /
          std::tgamma(n + 1.0);
      CHECK(d(n) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
  SUBCASE("all three structure paths agree") {
    const FockState cat = make_even_cat(0.7, 35);
    FockState general = cat;
    general.structure = StateStructure::General;
    general.amps.resize(0);
    const Complex alpha{0.5, -1.1};
    const Eigen::VectorXd d_pure = displaced_diag(cat, alpha);
    const Eigen::VectorXd d_gen = displaced_diag(general, alpha);
    CHECK((d_pure - d_gen).cwiseAbs().maxCoeff() < 1e-13);

    const FockState th = make_thermal(0.8, 60);
    FockState th_gen = th;
    th_gen.structure = StateStructure::General;
    CHECK((displaced_diag(th, alpha) - displaced_diag(th_gen, alpha))
              .cwiseAbs()
              .maxCoeff() < 1e-13);
  }
  SUBCASE("imaginary residue of the quadratic form is negligible") {
    const FockState cat = make_even_cat({0.6, 0.2}, 30);
    const Complex alpha{0.4, 0.7};
    const Eigen::MatrixXcd dm = displaced_fock_matrix(alpha, cat.dim());
    const Eigen::MatrixXcd m = dm.adjoint() * cat.rho * dm;
    for (int n = 0; n < cat.dim(); ++n) {
      CHECK(std::abs(m(n, n).imag()) < 1e-12);
    }
  }
  SUBCASE("cutoff-too-small for far displacements") {
    const FockState st = make_coherent(0.0, 12);
    CHECK_THROWS_AS(displaced_diag(st, {4.0, 0.0}), CutoffError);
  }
}

TEST_CASE("eval_s point values") {
  SUBCASE("vacuum Wigner peak 2/pi") {
    const FockState vac = make_coherent(0.0, 10);
    CHECK(eval_s(vac, 0.0, SParam::wigner()).value ==
          doctest::Approx(oracle::kTwoOverPi).epsilon(1e-14));
  }
  SUBCASE("coherent Husimi at the origin") {
    const FockState st = make_coherent(1.0, 40);
    CHECK(eval_s(st, 0.0, SParam::husimi()).value ==
          doctest::Approx(oracle::kCoherent1Husimi0).epsilon(1e-12));
  }
  SUBCASE("single photon Wigner at the origin is -2/pi") {
    const FockState one = make_spats(0.0, 4);
    CHECK(eval_s(one, 0.0, SParam::wigner()).value ==
          doctest::Approx(-oracle::kTwoOverPi).epsilon(1e-14));
  }
  SUBCASE("thermal Wigner at the origin is 2/((2 nbar + 1) pi)") {
    const FockState th = make_thermal(1.0, 80);
    CHECK(eval_s(th, 0.0, SParam::wigner()).value ==
          doctest::Approx(oracle::kThermal1Wigner0).epsilon(1e-10));
  }
  SUBCASE("parity form is the same code path bit for bit") {
    const FockState st = make_even_cat(0.7, 30);
    const Complex alpha{0.3, -0.2};
    const PointValue p = eval_s(st, alpha, SParam::wigner());
    const Eigen::VectorXd d = displaced_diag(st, alpha);
    CHECK(p.value == (2.0 / kPi) * geometric_series(d, -1.0));
  }
  SUBCASE("error bound covers the truncation honestly") {
    const FockState st = make_coherent(1.0, 40);
    const PointValue p = eval_s(st, {0.5, 0.5}, SParam::husimi());
    CHECK(p.err_bound > 0.0);
    CHECK(p.err_bound < 1e-9);
    CHECK(std::abs(p.value - oracle::coherent_eval(1.0, {0.5, 0.5}, -1.0)) <
          1e-10);
  }
}

TEST_CASE("coherent covariance property across s") {
  for (Complex beta : {Complex{0.0, 0.0}, Complex{0.7, 0.0}, Complex{1.0, 0.5}}) {
    const FockState st = make_coherent(beta, 60);
    for (double s : {-3.0, -1.0, 0.0}) {
      for (Complex alpha :
           {Complex{0.0, 0.0}, Complex{1.0, 1.0}, Complex{-0.5, 1.5}}) {
        const double got = eval_s(st, alpha, SParam(s)).value;
        CHECK(std::abs(got - oracle::coherent_eval(beta, alpha, s)) < 1e-9);
      }
    }
  }
}

TEST_CASE("non-negativity for s <= -1") {
  const FockState states[] = {make_even_cat(0.7, 40), make_spats(1.0, 80),
                              make_squeezed_vacuum(0.5, 1.0, 60)};
  for (const FockState& st : states) {
    for (double s : {-1.0, -2.0, -5.0}) {
      for (double x = -2.0; x <= 2.0; x += 0.5) {
        const PointValue p = eval_s(st, {x, 0.3}, SParam(s));
        CHECK(p.value >= 0.0);
      }
    }
  }
}

TEST_CASE("ill-conditioned refusals for s > 0") {
  // Thermal tail mass survives truncation, so the alternating series with
  // |1 - eta| > 1 has no usable bound and must be refused.
  const FockState th = make_thermal(1.0, 60);
  CHECK_THROWS_AS(eval_s(th, 0.0, SParam(0.3)), IllConditionedError);
  CHECK_THROWS_AS(eval_s(th, 0.0, SParam(0.1)), IllConditionedError);

  // A coherent state far below its cutoff has a tail indistinguishable from
  // zero at working precision; moderate s > 0 stays sound and accurate.
  const FockState coh = make_coherent(1.0, 40);
  const double got = eval_s(coh, 0.2, SParam(0.3)).value;
  CHECK(std::abs(got - oracle::coherent_eval(1.0, 0.2, 0.3)) < 1e-9);

  // s_max is a hard gate regardless of the tail.
  const FockState one = make_lossy_single_photon(0.4);
  CHECK_NOTHROW(eval_s(one, 0.0, SParam(0.5)));
  CHECK_THROWS_AS(eval_s(one, 0.0, SParam(0.8)), IllConditionedError);
  CHECK_THROWS_AS(eval_s(coh, 0.0, SParam(0.75)), IllConditionedError);
  EvalOptions opt;
  opt.s_max = 0.9;
  CHECK_NOTHROW(eval_s(one, 0.0, SParam(0.8), opt));
}

TEST_CASE("gaussian path") {
  SUBCASE("vacuum normalization checks") {
    CHECK(eval_s_gaussian(gaussian_vacuum(), 0.0, SParam::wigner()) ==
          doctest::Approx(oracle::kTwoOverPi).epsilon(1e-14));
    CHECK(eval_s_gaussian(gaussian_vacuum(), 0.0, SParam::husimi()) ==
          doctest::Approx(1.0 / kPi).epsilon(1e-14));
    CHECK(eval_s_gaussian(gaussian_vacuum(), {1.0, -0.5}, SParam::wigner()) ==
          doctest::Approx((2.0 / kPi) * std::exp(-2.0 * 1.25)).epsilon(1e-12));
  }
  SUBCASE("squeezed Wigner peak is invariant, Husimi is 1/(pi cosh r)") {
    const GaussianSpec sq = gaussian_squeezed_vacuum(0.3, 0.0);
    CHECK(eval_s_gaussian(sq, 0.0, SParam::wigner()) ==
          doctest::Approx(oracle::kTwoOverPi).epsilon(1e-12));
    CHECK(eval_s_gaussian(sq, 0.0, SParam::husimi()) ==
          doctest::Approx(oracle::kSqueezed03Husimi0).epsilon(1e-12));
  }
  SUBCASE("agreement with the Fock path on Gaussian states") {
    struct Pair {
      FockState fock;
      GaussianSpec gauss;
    };
    const Pair pairs[] = {
        {make_coherent({0.9, -0.3}, 60), gaussian_coherent({0.9, -0.3})},
        {make_squeezed_vacuum(0.3, 0.7, 60), gaussian_squeezed_vacuum(0.3, 0.7)},
        {make_thermal(0.6, 60), gaussian_thermal(0.6)},
    };
    for (const Pair& p : pairs) {
      for (double s : {0.0, -1.0, -2.5}) {
        for (Complex alpha :
             {Complex{0.0, 0.0}, Complex{1.2, 0.4}, Complex{-2.0, 1.0}}) {
          const double fock = eval_s(p.fock, alpha, SParam(s)).value;
          const double gauss = eval_s_gaussian(p.gauss, alpha, SParam(s));
          CHECK(std::abs(fock - gauss) < 1e-6);
        }
      }
    }
  }
  SUBCASE("refuses orderings sharper than the state allows") {
    const GaussianSpec sq = gaussian_squeezed_vacuum(0.3, 0.0);
    CHECK_NOTHROW(eval_s_gaussian(sq, 0.0, SParam(0.52)));
    CHECK_THROWS_AS(eval_s_gaussian(sq, 0.0, SParam(0.56)), PreconditionError);
  }
}

TEST_CASE("scan") {
  SUBCASE("1x1 grid equals the point evaluation") {
    const FockState st = make_even_cat(0.7, 30);
    const PhaseGrid grid{0.4, 0.4, -0.3, -0.3, 1, 1};
    const DistributionField f = scan(st, grid, SParam::husimi());
    CHECK(f.values(0, 0) == eval_s(st, {0.4, -0.3}, SParam::husimi()).value);
  }
  SUBCASE("vacuum Husimi peaks at the center with 1/pi") {
    const FockState vac = make_coherent(0.0, 30);
    const PhaseGrid grid{-2.0, 2.0, -2.0, 2.0, 81, 81};
    const DistributionField f = scan(vac, grid, SParam::husimi());
    CHECK(f.values.maxCoeff() == doctest::Approx(1.0 / kPi).epsilon(1e-12));
    CHECK(f.values(40, 40) == f.values.maxCoeff());
    CHECK(f.values.minCoeff() >= -f.err_bound);
  }
  SUBCASE("thread count does not change the values") {
    const FockState st = make_squeezed_vacuum(0.3, 0.0, 40);
    const PhaseGrid grid{-1.0, 1.0, -1.0, 1.0, 11, 11};
    const DistributionField f1 = scan(st, grid, SParam::wigner(), {}, 1);
    const DistributionField f3 = scan(st, grid, SParam::wigner(), {}, 3);
    CHECK((f1.values - f3.values).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("grid errors carry coordinates") {
    const FockState st = make_coherent(0.0, 8);
    const PhaseGrid grid{-4.0, 4.0, -4.0, 4.0, 5, 5};
    CHECK_THROWS_WITH_AS(scan(st, grid, SParam::husimi()),
                         doctest::Contains("alpha"), CutoffError);
  }
  SUBCASE("gaussian scan matches pointwise evaluation") {
    const GaussianSpec sq = gaussian_squeezed_vacuum(0.2, 0.4);
    const PhaseGrid grid{-1.0, 1.0, 0.0, 0.5, 5, 3};
    const DistributionField f = scan(sq, grid, SParam::wigner());
    CHECK(f.err_bound == 0.0);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 5; ++j) {
        CHECK(f.values(i, j) ==
              eval_s_gaussian(sq, grid.alpha(i, j), SParam::wigner()));
      }
    }
  }
}

TEST_CASE("poisson tail helpers") {
  CHECK(poisson_tail(0.0, 5) == 0.0);
  CHECK(poisson_tail(1.0, 60) < 1e-60);
  const int nc = suggest_cutoff(4.0, 1e-10);
  CHECK(poisson_tail(4.0, nc) <= 1e-10);
  CHECK(poisson_tail(4.0, nc - 1) > 1e-10);
}

TEST_CASE("grid validation") {
  PhaseGrid bad{1.0, -1.0, 0.0, 0.0, 5, 1};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  PhaseGrid zero{0.0, 0.0, 0.0, 0.0, 0, 1};
  CHECK_THROWS_AS(zero.validate(), ConfigError);
  const PhaseGrid ok{-1.0, 1.0, -2.0, 2.0, 3, 5};
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.n_points() == 15);
  CHECK(ok.alpha_at(0) == Complex{-1.0, -2.0});
  CHECK(ok.alpha_at(14) == Complex{1.0, 2.0});
  CHECK(ok.max_abs_alpha() == doctest::Approx(std::sqrt(5.0)));
}
