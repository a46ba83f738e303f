// Copyright 2026 The cvcluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CVCLUSTER_PARALLEL_H
#define CVCLUSTER_PARALLEL_H

#include <cstddef>
#include <functional>

namespace cvcluster {

/// Worker count: CVCLUSTER_THREADS if set to a positive integer, else the hardware concurrency.
std::size_t default_thread_count();

/// Calls body(begin, end) over contiguous chunks of [0, n) on up to `threads` workers
/// (0 = default_thread_count()). Chunk boundaries depend only on n and `chunk`; results
/// written per index are therefore independent of the worker count.
void parallel_for(std::size_t n, std::size_t chunk, const std::function<void(std::size_t, std::size_t)> &body,
                  std::size_t threads = 0);

}  // namespace cvcluster

#endif
