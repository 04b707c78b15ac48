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

#include "qbc/rng.hpp"

#include "qbc/errors.hpp"

namespace qbc {

namespace {

// FNV-1a, used only to mix a textual tag into a seed.
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

RandomStream RandomStream::derive(std::uint64_t seed, std::string_view tag) {
  return RandomStream(seed ^ fnv1a(tag));
}

std::uint64_t RandomStream::raw() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double RandomStream::uniform() {
  return static_cast<double>(raw() >> 11) * 0x1.0p-53;
}

std::size_t RandomStream::sample(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DomainError("negative sampling weight");
    total += w;
  }
  if (total <= 0.0) throw DomainError("sampling weights sum to zero");
  double u = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] > 0.0) last_positive = k;
    acc += weights[k];
    if (u < acc && weights[k] > 0.0) return k;
  }
  // Rounding pushed u past the accumulated total; return the
  // last bucket with nonzero weight.
  return last_positive;
}

std::size_t RandomStream::below(std::size_t n) {
  if (n == 0) throw DomainError("below(0)");
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

}  // namespace qbc
