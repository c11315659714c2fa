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

#include <array>
#include <cstdint>

namespace psw {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11 constants).
///
/// Output depends only on (key, counter), so disjoint counter blocks give
/// reproducible, order-independent streams.  One 64-bit key and a 128-bit
/// counter split as (stream_lo, stream_hi, block, 0).
struct Philox4x32 {
  static constexpr std::uint32_t kMulA = 0xD2511F53u;
  static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                            std::uint64_t stream,
                                            std::uint32_t block_index) {
    std::uint32_t c0 = static_cast<std::uint32_t>(stream);
    std::uint32_t c1 = static_cast<std::uint32_t>(stream >> 32);
    std::uint32_t c2 = block_index;
    std::uint32_t c3 = 0;
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * c0;
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * c2;
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      c0 = hi1 ^ c1 ^ k0;
      c1 = lo1;
      c2 = hi0 ^ c3 ^ k1;
      c3 = lo0;
      k0 += kWeylA;
      k1 += kWeylB;
    }
    return {c0, c1, c2, c3};
  }
};

/// Uniform doubles in [0, 1) drawn from one Philox substream.
///
/// Each (seed, stream) pair is an independent sequence; a simulation shot
/// gets its own stream so batches reproduce the serial order exactly.
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream)
      : key_(seed), stream_(stream) {}

  /// Next uniform double in [0, 1) with 53 random bits.
  double next() {
    if (have_ == 0) {
      buf_ = Philox4x32::block(key_, stream_, block_index_++);
      have_ = 2;
    }
    const int base = (have_ == 2) ? 0 : 2;
    --have_;
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(buf_[base + 1]) << 32) | buf_[base];
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint32_t block_index_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int have_ = 0;
};

}  // namespace psw
