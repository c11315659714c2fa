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
#include "psw/clicksim.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "psw/errors.hpp"
#include "psw/parallel.hpp"
#include "psw/philox.hpp"

namespace psw {

namespace {

constexpr double kClickTailTol = 1e-6;

void require_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw ConfigError("detector efficiency eta must lie in (0, 1]");
  }
}

double zero_count_from_diag(const DisplacedDiag& dd, double eta) {
  const double p = geometric_series(dd.d, 1.0 - eta);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

void MultiplexConfig::validate() const {
  require_eta(eta);
  if (splits.size() < 2) {
    throw ConfigError("multiplexing needs at least two channels");
  }
  double sum = 0.0;
  for (double w : splits) {
    if (!(w > 0.0 && w < 1.0)) {
      throw ConfigError("splitting ratios must lie in the open interval (0, 1)");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ConfigError("splitting ratios must sum to 1 within 1e-12");
  }
}

double zero_count(const FockState& state, Complex alpha, double eta,
                  double tail_tol) {
  require_eta(eta);
  return zero_count_from_diag(displaced_diag_full(state, alpha, tail_tol), eta);
}

double covariance_exact(const FockState& state, Complex alpha, double eta,
                        double t2, double tail_tol) {
  require_eta(eta);
  if (!(t2 > 0.0 && t2 < 1.0)) {
    throw ConfigError("splitting ratio t2 must lie in the open interval (0, 1)");
  }
  const DisplacedDiag dd = displaced_diag_full(state, alpha, tail_tol);
  const double p12 = zero_count_from_diag(dd, eta);
  const double p1 = zero_count_from_diag(dd, eta * (1.0 - t2));
  const double p2 = zero_count_from_diag(dd, eta * t2);
  return p12 - p1 * p2;
}

double multi_zero_count_witness(const FockState& state, Complex alpha,
                                const MultiplexConfig& cfg, double tail_tol) {
  cfg.validate();
  const DisplacedDiag dd = displaced_diag_full(state, alpha, tail_tol);
  // Joint zero-count across all channels equals the single-detector value at
  // full efficiency: photon number is conserved through the splitter.
  const double joint = zero_count_from_diag(dd, cfg.eta);
  double prod = 1.0;
  for (double w : cfg.splits) prod *= zero_count_from_diag(dd, cfg.eta * w);
  return joint - prod;
}

namespace {

struct ShotCounts {
  std::uint64_t joint = 0;
  std::vector<std::uint64_t> single;
  std::vector<std::uint64_t> pair;  // upper-triangle pairs (i < j), row-major

  explicit ShotCounts(int channels)
      : single(channels, 0), pair(channels * (channels - 1) / 2, 0) {}

  void merge(const ShotCounts& other) {
    joint += other.joint;
    for (std::size_t i = 0; i < single.size(); ++i) single[i] += other.single[i];
    for (std::size_t i = 0; i < pair.size(); ++i) pair[i] += other.pair[i];
  }
};

int pair_index(int channels, int i, int j) {
  // i < j
  return i * channels - i * (i + 1) / 2 + (j - i - 1);
}

int sample_index(const std::vector<double>& cdf, double u) {
  return static_cast<int>(
      std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

}  // namespace

ClickEstimate simulate_clicks(const FockState& state, Complex alpha,
                              const MultiplexConfig& cfg, std::int64_t shots,
                              std::uint64_t seed, unsigned threads,
                              std::ostream* audit) {
  cfg.validate();
  if (shots < 1) throw ConfigError("shots must be >= 1");
  const DisplacedDiag dd = displaced_diag_full(state, alpha, kClickTailTol);

  const int dim = static_cast<int>(dd.d.size());
  std::vector<double> number_cdf(dim);
  double acc = 0.0;
  for (int n = 0; n < dim; ++n) {
    acc += dd.d(n);
    number_cdf[n] = std::min(acc, 1.0);
  }
  // Draws beyond the last entry fall into the truncation-tail bucket, which
  // conservatively clicks every channel.
  const int channels = cfg.channels();
  std::vector<double> split_cdf(channels);
  double sacc = 0.0;
  for (int c = 0; c < channels; ++c) {
    sacc += cfg.splits[c];
    split_cdf[c] = c + 1 == channels ? 1.0 : sacc;
  }
  const std::uint32_t all_clicked = (channels >= 32)
                                        ? 0xFFFFFFFFu
                                        : ((1u << channels) - 1u);

  struct ShotRecord {
    std::int32_t n = 0;
    std::uint32_t clicks = 0;
  };
  std::vector<ShotRecord> records;
  if (audit != nullptr) records.resize(static_cast<std::size_t>(shots));

  ShotCounts totals(channels);
  std::mutex merge_mutex;
  parallel_for(static_cast<std::size_t>(shots), threads,
               [&](std::size_t begin, std::size_t end) {
                 ShotCounts local(channels);
                 for (std::size_t shot = begin; shot < end; ++shot) {
                   PhiloxStream rng(seed, shot);
                   const int n = sample_index(number_cdf, rng.next());
                   std::uint32_t clicks = 0;
                   if (n >= dim) {
                     clicks = all_clicked;
                   } else {
                     for (int photon = 0; photon < n; ++photon) {
                       const int ch = sample_index(split_cdf, rng.next());
                       if (rng.next() < cfg.eta) clicks |= 1u << ch;
                     }
                   }
                   if (clicks == 0) ++local.joint;
                   for (int i = 0; i < channels; ++i) {
                     if (clicks & (1u << i)) continue;
                     ++local.single[i];
                     for (int j = i + 1; j < channels; ++j) {
                       if (!(clicks & (1u << j))) {
                         ++local.pair[pair_index(channels, i, j)];
                       }
                     }
                   }
                   if (audit != nullptr) {
                     records[shot] = {n >= dim ? std::int32_t(-1)
                                               : std::int32_t(n),
                                      clicks};
                   }
                 }
                 const std::lock_guard<std::mutex> lock(merge_mutex);
                 totals.merge(local);
               });

  if (audit != nullptr) {
    (*audit) << "shot,n_sampled,clicks_bitmask\n";
    for (std::size_t shot = 0; shot < records.size(); ++shot) {
      (*audit) << shot << ',' << records[shot].n << ',' << records[shot].clicks
               << '\n';
    }
  }

  const double m = static_cast<double>(shots);
  ClickEstimate est;
  est.shots = shots;
  est.seed = seed;
  est.p_joint = totals.joint / m;
  est.p_single.resize(channels);
  est.std_err.resize(channels);
  double prod = 1.0;
  for (int i = 0; i < channels; ++i) {
    est.p_single[i] = totals.single[i] / m;
    est.std_err[i] = std::sqrt(
        std::max(0.0, est.p_single[i] * (1.0 - est.p_single[i]) / m));
    prod *= est.p_single[i];
  }
  est.covariance = est.p_joint - prod;

  // First-order (delta-method) error for f = p_J - prod_i p_i using the
  // empirical covariance of the frequency vector.  The all-zero event
  // implies every single-channel zero event, so E[1_J 1_i] = p_J, and the
  // pairwise zero-count frequencies supply E[1_i 1_j].
  std::vector<double> grad(channels + 1);
  grad[0] = 1.0;
  for (int i = 0; i < channels; ++i) {
    double g = -1.0;
    for (int j = 0; j < channels; ++j) {
      if (j != i) g *= est.p_single[j];
    }
    grad[i + 1] = g;
  }
  auto cov_entry = [&](int a, int b) {
    const double pa = a == 0 ? est.p_joint : est.p_single[a - 1];
    const double pb = b == 0 ? est.p_joint : est.p_single[b - 1];
    double joint_ab;
    if (a == 0 || b == 0) {
      joint_ab = est.p_joint;  // intersection with the all-zero event
    } else if (a == b) {
      joint_ab = pa;
    } else {
      const int i = std::min(a, b) - 1, j = std::max(a, b) - 1;
      joint_ab = totals.pair[pair_index(channels, i, j)] / m;
    }
    return joint_ab - pa * pb;
  };
  double var = 0.0;
  for (int a = 0; a <= channels; ++a) {
    for (int b = 0; b <= channels; ++b) {
      var += grad[a] * grad[b] * cov_entry(a, b);
    }
  }
  est.std_err_cov = std::sqrt(std::max(0.0, var / m));
  return est;
}

}  // namespace psw
