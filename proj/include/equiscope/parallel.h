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

#ifndef EQUISCOPE_PARALLEL_H_
#define EQUISCOPE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace equiscope {

// Worker cap: EQUISCOPE_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t WorkerCount();

// Runs task(i) for i in [0, n) on up to WorkerCount() threads. Tasks must
// write their result into a slot owned by index i; callers then read slots in
// index order, so the outcome never depends on scheduling. After a failure no
// new tasks start; the exception of the lowest failed index is rethrown once
// all workers stop.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace equiscope

#endif  // EQUISCOPE_PARALLEL_H_
