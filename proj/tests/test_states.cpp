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

#include "oracles.hpp"
#include "psw/states.hpp"

using namespace psw;

namespace {

void check_invariants(const FockState& state) {
  CHECK_NOTHROW(validate_fock_state(state));
  CHECK(state.tail_mass >= 0.0);
  CHECK(state.tail_mass <= kDefaultTailTol);
}

}  // namespace

TEST_CASE("coherent state") {
  SUBCASE("beta = 0 is the vacuum") {
    const FockState vac = make_coherent(0.0, 5);
    CHECK(vac.rho(0, 0).real() == 1.0);
    CHECK(vac.rho.cwiseAbs().sum() == 1.0);
    check_invariants(vac);
  }
  SUBCASE("beta = 1: rho_11 is the Poisson weight e^{-1}") {
    const FockState st = make_coherent(1.0, 30);
    CHECK(st.rho(1, 1).real() == doctest::Approx(oracle::kExpMinus1).epsilon(1e-12));
    check_invariants(st);
  }
  SUBCASE("beta = 0.7: diagonal follows Poisson(0.49)") {
    const FockState st = make_coherent(0.7, 25);
    CHECK(st.rho(0, 0).real() ==
          doctest::Approx(oracle::kCoherent07Rho00).epsilon(1e-12));
    for (int n = 0; n <= 10; ++n) {
      CHECK(st.rho(n, n).real() ==
            doctest::Approx(oracle::poisson_pmf(n, 0.49)).epsilon(1e-10));
    }
    check_invariants(st);
  }
  SUBCASE("complex amplitude keeps Hermiticity exact") {
    const FockState st = make_coherent({0.8, -0.6}, 30);
    check_invariants(st);
  }
  SUBCASE("cutoff too small") {
    CHECK_THROWS_AS(make_coherent(3.0, 5), CutoffError);
  }
}

TEST_CASE("squeezed vacuum") {
  SUBCASE("r = 0 is the vacuum") {
    const FockState st = make_squeezed_vacuum(0.0, 0.0, 10);
    CHECK(st.rho(0, 0).real() == 1.0);
  }
  SUBCASE("rho_00 = 1/cosh(r), odd components vanish") {
    const FockState st = make_squeezed_vacuum(0.3, 0.0, 40);
    CHECK(st.rho(0, 0).real() ==
          doctest::Approx(oracle::kSqueezed03Rho00).epsilon(1e-12));
    for (int n = 1; n <= 39; n += 2) CHECK(st.rho(n, n).real() == 0.0);
    check_invariants(st);

    // Cross-check the closed-form coefficients against a numerically
    // normalized series built from the raw log-factorial formula.
    double norm = 0.0;
    std::vector<double> raw(21, 0.0);
    for (int m = 0; 2 * m <= 40; ++m) {
      const double lc = -0.5 * std::log(std::cosh(0.3)) +
                        m * std::log(std::tanh(0.3)) +
                        0.5 * std::lgamma(2.0 * m + 1.0) - m * std::log(2.0) -
                        std::lgamma(m + 1.0);
      raw[m] = std::exp(2.0 * lc);
      norm += raw[m];
    }
    for (int m = 0; m <= 20; ++m) {
      CHECK(st.rho(2 * m, 2 * m).real() ==
            doctest::Approx(raw[m] / norm).epsilon(1e-10));
    }
  }
  SUBCASE("parameter range") {
    CHECK_THROWS_AS(make_squeezed_vacuum(3.5, 0.0, 40), ConfigError);
    CHECK_THROWS_AS(make_squeezed_vacuum(-0.1, 0.0, 40), ConfigError);
  }
  SUBCASE("cutoff too small for strong squeezing") {
    CHECK_THROWS_AS(make_squeezed_vacuum(1.5, 0.0, 4), CutoffError);
  }
}

TEST_CASE("lossy single photon") {
  CHECK(make_lossy_single_photon(1.0).rho(1, 1).real() == 1.0);
  CHECK(make_lossy_single_photon(0.0).rho(0, 0).real() == 1.0);
  const FockState half = make_lossy_single_photon(0.5);
  CHECK(half.rho(0, 0).real() == 0.5);
  CHECK(half.rho(1, 1).real() == 0.5);
  CHECK_THROWS_AS(make_lossy_single_photon(1.2), ConfigError);
  CHECK_THROWS_AS(make_lossy_single_photon(-0.1), ConfigError);
}

TEST_CASE("thermal state") {
  SUBCASE("nbar = 0 is the vacuum") {
    CHECK(make_thermal(0.0, 10).rho(0, 0).real() == 1.0);
  }
  SUBCASE("geometric law") {
    const FockState st = make_thermal(1.0, 60);
    CHECK(st.rho(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(st.rho(1, 1).real() == doctest::Approx(0.25).epsilon(1e-12));
    check_invariants(st);
  }
  SUBCASE("p_0 = 1/(nbar+1)") {
    const FockState st = make_thermal(0.5, 40);
    CHECK(st.rho(0, 0).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("cutoff too small") {
    CHECK_THROWS_AS(make_thermal(5.0, 10), CutoffError);
  }
}

TEST_CASE("SPATS") {
  SUBCASE("nbar = 0 equals the Fock state |1>") {
    const FockState st = make_spats(0.0, 10);
    CHECK(st.rho(1, 1).real() == 1.0);
    CHECK(st.rho.diagonal().real().sum() == 1.0);
    CHECK(st.rho(0, 0).real() == 0.0);
  }
  SUBCASE("vacuum support removed for any nbar") {
    CHECK(make_spats(0.7, 60).rho(0, 0).real() == 0.0);
  }
  SUBCASE("nbar = 1: rho_11 = 0.25 and dense a^dag rho a oracle") {
    const FockState st = make_spats(1.0, 80);
    CHECK(st.rho(1, 1).real() == doctest::Approx(0.25).epsilon(1e-12));
    const Eigen::MatrixXcd dense = oracle::spats_dense(1.0, 81);
    CHECK((st.rho - dense).cwiseAbs().maxCoeff() < 1e-12);
    check_invariants(st);
  }
}

TEST_CASE("even cat state") {
  SUBCASE("omega = 0.7 closed-form rho_00 and odd suppression") {
    const FockState st = make_even_cat(0.7, 30);
    CHECK(st.rho(0, 0).real() ==
          doctest::Approx(oracle::kCatRho00).epsilon(1e-12));
    for (int n = 1; n <= 29; n += 2) CHECK(st.rho(n, n).real() == 0.0);
    check_invariants(st);

    // Oracle: normalize the raw coefficient vector numerically.
    Eigen::VectorXd raw = Eigen::VectorXd::Zero(31);
    for (int n = 0; n <= 30; n += 2) {
      raw(n) = std::exp(n * std::log(0.7) - 0.5 * std::lgamma(n + 1.0));
    }
    raw /= raw.norm();
    for (int n = 0; n <= 30; n += 2) {
      CHECK(st.rho(n, n).real() ==
            doctest::Approx(raw(n) * raw(n)).epsilon(1e-10));
    }
  }
  SUBCASE("large omega approaches the half-Poisson mixture on even n") {
    const FockState st = make_even_cat(3.0, 40);
    for (int n = 0; n <= 20; n += 2) {
      CHECK(st.rho(n, n).real() ==
            doctest::Approx(2.0 * oracle::poisson_pmf(n, 9.0)).epsilon(1e-6));
    }
  }
  SUBCASE("complex omega") { check_invariants(make_even_cat({0.5, 0.5}, 30)); }
}

TEST_CASE("loss channel") {
  SUBCASE("epsilon = 1 is the identity") {
    const FockState st = make_even_cat(0.7, 25);
    const FockState out = apply_loss(st, 1.0);
    CHECK((out.rho - st.rho).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("epsilon = 0 maps to the vacuum") {
    const FockState out = apply_loss(make_coherent(1.0, 25), 0.0);
    CHECK(out.rho(0, 0).real() == 1.0);
    CHECK(out.rho.cwiseAbs().sum() == 1.0);
  }
  SUBCASE("single photon reproduces make_lossy_single_photon exactly") {
    const FockState photon = make_spats(0.0, 1);
    const FockState lossy = apply_loss(photon, 0.37);
    const FockState expected = make_lossy_single_photon(0.37);
    CHECK((lossy.rho - expected.rho).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("composition: loss(a) then loss(b) equals loss(a b)") {
    const FockState st = make_even_cat({0.6, 0.2}, 30);
    const FockState two = apply_loss(apply_loss(st, 0.8), 0.6);
    const FockState one = apply_loss(st, 0.8 * 0.6);
    CHECK((two.rho - one.rho).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("coherent maps to coherent with sqrt(eps) beta") {
    const Complex beta{1.1, -0.4};
    const double eps = 0.55;
    const FockState lossy = apply_loss(make_coherent(beta, 40), eps);
    const FockState expected = make_coherent(std::sqrt(eps) * beta, 40);
    CHECK((lossy.rho - expected.rho).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("trace preserved") {
    const FockState st = apply_loss(make_thermal(1.0, 60), 0.33);
    CHECK(std::abs(st.rho.trace().real() - 1.0) < 1e-12);
  }
  SUBCASE("parameter range") {
    CHECK_THROWS_AS(apply_loss(make_coherent(0.0, 2), 1.5), ConfigError);
  }
}

TEST_CASE("photon statistics") {
  SUBCASE("thermal nbar = 1 has Mandel Q = 1") {
    const PhotonStats stats = photon_stats(make_thermal(1.0, 80));
    CHECK(stats.mean_n == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(stats.mandel_q.value() == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("single photon has Mandel Q = -1") {
    const PhotonStats stats = photon_stats(make_spats(0.0, 5));
    CHECK(stats.mean_n == doctest::Approx(1.0));
    CHECK(stats.mandel_q.value() == doctest::Approx(-1.0));
  }
  SUBCASE("vacuum leaves Mandel Q undefined") {
    CHECK_FALSE(photon_stats(make_coherent(0.0, 3)).mandel_q.has_value());
  }
  SUBCASE("SPATS Mandel Q changes sign near nbar = 0.707") {
    const double below = photon_stats(make_spats(0.68, 90)).mandel_q.value();
    const double above = photon_stats(make_spats(0.73, 90)).mandel_q.value();
    CHECK(below < 0.0);
    CHECK(above > 0.0);
  }
  SUBCASE("Mandel Q is never below -1") {
    for (double nbar : {0.0, 0.3, 1.0, 2.0}) {
      const auto q = photon_stats(make_spats(nbar, 90)).mandel_q;
      CHECK(q.value() >= -1.0);
    }
  }
}

TEST_CASE("auto cutoff helper") {
  const FockState st = with_auto_cutoff(
      [](int nc) { return make_coherent(2.0, nc); }, 2);
  CHECK(st.cutoff() >= 16);
  CHECK(st.tail_mass <= kDefaultTailTol);
  CHECK_THROWS_AS(
      with_auto_cutoff([](int nc) { return make_coherent(100.0, nc); }, 2, 64),
      CutoffError);
}

TEST_CASE("from_matrix") {
  SUBCASE("round trip of a constructed state") {
    const FockState st = make_even_cat(0.7, 20);
    const FockState back = FockState::from_matrix(st.rho);
    CHECK((back.rho - st.rho).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(back.structure == StateStructure::Pure);
  }
  SUBCASE("diagonal detection") {
    const FockState st = make_thermal(0.5, 30);
    CHECK(FockState::from_matrix(st.rho).structure == StateStructure::Diagonal);
  }
  SUBCASE("mixtures are classified general") {
    const FockState a = make_coherent(0.5, 30);
    const FockState b = make_coherent({-0.4, 0.3}, 30);
    const FockState mix = FockState::from_matrix(0.5 * a.rho + 0.5 * b.rho);
    CHECK(mix.structure == StateStructure::General);
    CHECK_NOTHROW(validate_fock_state(mix));
  }
  SUBCASE("rejects non-Hermitian input") {
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
    bad(0, 0) = 0.5;
    bad(1, 1) = 0.5;
    bad(0, 1) = Complex{0.3, 0.0};
    bad(1, 0) = Complex{0.1, 0.0};
    CHECK_THROWS_AS(FockState::from_matrix(bad), ConfigError);
  }
  SUBCASE("rejects indefinite input") {
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    CHECK_THROWS_AS(FockState::from_matrix(bad), PreconditionError);
  }
}

TEST_CASE("gaussian parameter sets") {
  CHECK_NOTHROW(validate_gaussian(gaussian_vacuum()));
  CHECK_NOTHROW(validate_gaussian(gaussian_coherent({1.0, 0.5})));
  CHECK_NOTHROW(validate_gaussian(gaussian_thermal(1.0)));
  const GaussianSpec sq = gaussian_squeezed_vacuum(0.3, 0.0);
  CHECK_NOTHROW(validate_gaussian(sq));
  CHECK(sq.cov(0, 0) == doctest::Approx(std::exp(-0.6) / 4.0));
  CHECK(sq.cov(1, 1) == doctest::Approx(std::exp(0.6) / 4.0));
  CHECK(sq.cov.determinant() == doctest::Approx(1.0 / 16.0).epsilon(1e-12));

  GaussianSpec bad = gaussian_vacuum();
  bad.cov(0, 0) = 0.01;  // below the purity bound
  CHECK_THROWS_AS(validate_gaussian(bad), ConfigError);
}
