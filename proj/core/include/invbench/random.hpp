// Copyright 2026 The invbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INVBENCH_RANDOM_HPP_
#define INVBENCH_RANDOM_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace invbench {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t Mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// 64-bit FNV-1a over the bytes of `text`.
constexpr std::uint64_t HashLabel(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed of the substream identified by (master, setting, trial, label).
// Stable across platforms and independent of scheduling order.
constexpr std::uint64_t DeriveSeed(std::uint64_t master_seed,
                                   std::string_view setting_id,
                                   std::uint64_t trial_index,
                                   std::string_view stream_label) noexcept {
  std::uint64_t h = Mix64(master_seed);
  h = Mix64(h ^ HashLabel(setting_id));
  h = Mix64(h ^ trial_index);
  h = Mix64(h ^ HashLabel(stream_label));
  return h;
}

// Seeded random stream with platform-independent output.
//
// std::mt19937_64 has a fully specified output sequence, but the standard
// distributions do not, so uniform and Gaussian variates are produced here
// from raw 64-bit words.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double Uniform();

  // Standard normal via the Box-Muller transform; caches the second variate.
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

  // Uniform integer in [0, bound), unbiased (bound must be > 0).
  std::size_t UniformIndex(std::size_t bound);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace invbench

#endif  // INVBENCH_RANDOM_HPP_
