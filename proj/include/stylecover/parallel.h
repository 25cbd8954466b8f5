// Copyright 2026 The Authors.
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

#ifndef STYLECOVER_PARALLEL_H_
#define STYLECOVER_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace stylecover {

// Thread count from an explicit request (> 0), else SCX_THREADS, else 1.
int ResolveThreads(int requested);

// Runs body(i) for i in [0, count) on up to `threads` workers. Tasks are
// claimed dynamically, so `body` must write only to state owned by index i.
// The first exception thrown by any task is rethrown after all workers join.
void ParallelFor(size_t count, int threads, const std::function<void(size_t)>& body);

}  // namespace stylecover

#endif  // STYLECOVER_PARALLEL_H_
