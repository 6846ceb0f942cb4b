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

#ifndef EQUISCOPE_RANDOM_H_
#define EQUISCOPE_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace equiscope {

// std::mt19937_64 has a fully specified output sequence. The standard
// distributions do not, so everything below consumes raw engine output only
// and is bit-identical across platforms.
using Rng = std::mt19937_64;

// Mixes a master seed with a list of tags (stage, preset, run id...) into an
// independent child seed. Order of tags matters; order of calls does not.
std::uint64_t DeriveSeed(std::uint64_t master,
                         std::initializer_list<std::uint64_t> tags);

// Stable 64-bit tag for a string (FNV-1a).
std::uint64_t TagOf(std::string_view name);

// Uniform integer in [0, bound). bound must be > 0.
std::uint64_t UniformIndex(Rng& rng, std::uint64_t bound);

// Uniform real in [0, 1) with 53 bits of entropy.
double UniformUnit(Rng& rng);

// Standard normal via Box-Muller on UniformUnit.
double StandardNormal(Rng& rng);

// Fisher-Yates shuffle.
template <typename T>
void Shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = UniformIndex(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

// Random permutation of [0, n).
std::vector<std::size_t> Permutation(std::size_t n, Rng& rng);

}  // namespace equiscope

#endif  // EQUISCOPE_RANDOM_H_
