// Copyright 2026 The wnrqc Authors
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

#pragma once

#include <cmath>
#include <cstdint>

namespace wnrqc {

/// Sample moments kept as raw sums so batches merge exactly in a fixed order.
struct MomentSums {
    uint64_t count = 0;
    double sum = 0;
    double sum_sq = 0;

    void add(double x) {
        count++;
        sum += x;
        sum_sq += x * x;
    }

    void merge(const MomentSums &other) {
        count += other.count;
        sum += other.sum;
        sum_sq += other.sum_sq;
    }

    double mean() const {
        return count == 0 ? 0.0 : sum / static_cast<double>(count);
    }

    /// Unbiased sample variance.
    double variance() const {
        if (count < 2) {
            return 0.0;
        }
        double c = static_cast<double>(count);
        double m = sum / c;
        double v = (sum_sq - c * m * m) / (c - 1);
        return v < 0 ? 0.0 : v;
    }

    double standard_error() const {
        if (count < 2) {
            return 0.0;
        }
        return std::sqrt(variance() / static_cast<double>(count));
    }
};

}  // namespace wnrqc
