// Copyright 2026 The Equiscope Authors.
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

#include "equiscope/random.h"

#include <cmath>
#include <numbers>
#include <numeric>

namespace equiscope {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t master,
                         std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = SplitMix64(master);
  for (const std::uint64_t tag : tags) {
    h = SplitMix64(h ^ SplitMix64(tag + 0x632be59bd9b4e019ULL));
  }
  return h;
}

std::uint64_t TagOf(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t UniformIndex(Rng& rng, std::uint64_t bound) {
  // Rejection sampling: discard the top partial bucket.
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound) - 1;
  std::uint64_t draw = rng();
  while (draw > limit) draw = rng();
  return draw % bound;
}

double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double StandardNormal(Rng& rng) {
  double u1 = UniformUnit(rng);
  while (u1 <= 0.0) u1 = UniformUnit(rng);
  const double u2 = UniformUnit(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> Permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Shuffle(std::span<std::size_t>(perm), rng);
  return perm;
}

}  // namespace equiscope
