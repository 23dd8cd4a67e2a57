/* Copyright 2026 The carprobe Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CARPROBE_RANDOM_HPP_
#define CARPROBE_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace carprobe {

/// Seeded random stream used for every sampling decision in the library.
///
/// Stream version 1: std::mt19937_64 (whose output sequence is fixed by the
/// C++ standard) seeded with the raw 64-bit seed. The derived distributions
/// below are implemented here rather than taken from <random>, because the
/// standard distributions are implementation-defined and would not reproduce
/// across toolchains:
///   - below(n): rejection sampling on the top of the 64-bit range
///   - uniform(): 53 high bits scaled into [0, 1)
///   - normal(): Box-Muller, both variates consumed in order
///   - shuffle(): Fisher-Yates from the back using below()
class Rng {
 public:
  static constexpr int kStreamVersion = 1;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  double uniform();
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

  /// Child seed for an independent sub-stream (e.g. one per permutation).
  std::uint64_t fork_seed() { return next_u64(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace carprobe

#endif  // CARPROBE_RANDOM_HPP_
