// Copyright 2026 The qbclab Authors
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

#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace qbc {

/// Deterministic pseudorandom stream. Avoids std::uniform_*_distribution,
/// whose output is implementation-defined, so that transcripts replay
/// byte-identically on any platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  /// Independent stream derived from a master seed and a label
  /// (e.g. one stream per party).
  static RandomStream derive(std::uint64_t seed, std::string_view tag);

  /// Next raw 64-bit draw (splitmix64).
  std::uint64_t raw();

  /// Uniform double in [0, 1) with 53 bits of entropy.
  double uniform();

  /// Samples an index from an unnormalized nonnegative weight vector.
  std::size_t sample(std::span<const double> weights);

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);

 private:
  std::uint64_t state_;
};

}  // namespace qbc
