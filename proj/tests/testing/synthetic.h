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

// Synthetic datasets and filesystem helpers for tests.

#ifndef EQUISCOPE_TESTING_SYNTHETIC_H_
#define EQUISCOPE_TESTING_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "equiscope/dataset.h"

namespace equiscope::testing {

// Row-major values; NaN entries are marked missing.
FeatureMatrix MakeMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

struct LabeledData {
  FeatureMatrix x;
  std::vector<int> y;
};

// Two standard-normal features, label 1 iff x0 + x1 > 0. A fraction
// `missing_rate` of x0 is hidden at random; `all_missing_column` appends a
// third column with every entry missing.
LabeledData SeparableData(std::size_t n, std::uint64_t seed, double missing_rate = 0.0,
                          bool all_missing_column = false);

// Same features with labels shuffled, so no feature carries signal.
LabeledData PermutedLabels(const LabeledData& data, std::uint64_t seed);

// Rows [begin, end) of a LabeledData.
LabeledData Slice(const LabeledData& data, std::size_t begin, std::size_t end);

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Writes a CSV plus manifest with four numeric features and a sex column.
// For women the outcome follows x0 + x1 with mild noise; for men it is a
// fair coin independent of everything. Returns the manifest path.
std::filesystem::path WriteDisparityDataset(const std::filesystem::path& dir,
                                            std::size_t n_rows, std::uint64_t seed);

// Reads a whole file into a string.
std::string ReadFile(const std::filesystem::path& path);

}  // namespace equiscope::testing

#endif  // EQUISCOPE_TESTING_SYNTHETIC_H_
