// Copyright 2026 The seqfisher Authors
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

#include <cstddef>
#include <cmath>
#include <functional>

namespace seqfisher {

// Thread count from an explicit hint, else SEQFISHER_THREADS, else the
// hardware concurrency.
int resolve_threads(int hint);

// Runs fn(block) for block in [0, blocks) on up to `threads` workers. Blocks
// are claimed dynamically; callers write results into per-block slots and
// reduce them in block order, which keeps results independent of the worker
// count. The first exception thrown by any block is rethrown.
void parallel_blocks(std::size_t blocks, int threads, const std::function<void(std::size_t)>& fn);

// Neumaier compensated summation.
class CompensatedSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace seqfisher
