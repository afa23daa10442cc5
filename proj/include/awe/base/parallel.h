// include/awe/base/parallel.h

// Copyright 2026  awe contributors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef AWE_BASE_PARALLEL_H_
#define AWE_BASE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace awe {

/// Number of worker threads used by ParallelFor when none is requested
/// (AWE_NUM_THREADS, else the hardware concurrency).
int DefaultNumThreads();

/// Runs fn(i) for i in [0, n) on up to num_threads threads (0 = default).
/// Items are claimed dynamically; callers must write results to per-item
/// slots so that the outcome does not depend on scheduling. The first
/// exception thrown by any item is rethrown after all threads join.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)> &fn,
                 int num_threads = 0);

}  // namespace awe

#endif  // AWE_BASE_PARALLEL_H_
