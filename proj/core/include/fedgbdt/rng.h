// Copyright 2026 The fedgbdt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FEDGBDT_RNG_H_
#define FEDGBDT_RNG_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fedgbdt {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// Every random draw in the library comes from this generator. A generator is
// identified by (seed, stream); the 128-bit counter walks through the stream.
// Outputs are bit-identical on every platform. Derived distributions below
// use only integer arithmetic plus std::log/std::exp/std::sqrt/std::cos.
class Rng {
 public:
  using result_type = std::uint32_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }
  result_type operator()();

  std::uint64_t NextU64();
  // Uniform on [0, 1) with 53 bits of precision.
  double Uniform();
  // Uniform on the open interval (0, 1).
  double UniformOpen();
  // Uniform integer in [0, bound); bound > 0. Unbiased (Lemire).
  std::uint64_t UniformInt(std::uint64_t bound);
  // Standard normal via Box-Muller; the paired variate is cached.
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

  // A child generator on an independent stream. Derivation is a pure function
  // of (seed, stream, tag), so sibling derivations never collide in practice.
  Rng Derive(std::uint64_t tag) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void Refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Raw Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> Philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// SplitMix64 finalizer; used to combine seeds.
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

// k distinct indices from [0, n) in draw order (partial Fisher-Yates).
std::vector<std::size_t> SampleWithoutReplacement(std::size_t n, std::size_t k,
                                                  Rng& rng);

// In-place uniform shuffle.
void Shuffle(std::span<std::size_t> values, Rng& rng);

}  // namespace fedgbdt

#endif  // FEDGBDT_RNG_H_
