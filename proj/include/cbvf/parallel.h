// Copyright 2026 The cbvf Authors
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

#ifndef CBVF_PARALLEL_H_
#define CBVF_PARALLEL_H_

#include <cstdint>
#include <functional>

namespace cbvf {

// Worker count: CBVF_THREADS when set to a positive integer, otherwise the
// hardware concurrency.
int ThreadCount();

// Runs body(begin, end) over contiguous chunks of [0, n). Each index is
// visited exactly once; bodies must only write index-owned state so results
// do not depend on the schedule.
void ParallelFor(std::int64_t n,
                 const std::function<void(std::int64_t, std::int64_t)>& body);

}  // namespace cbvf

#endif  // CBVF_PARALLEL_H_
