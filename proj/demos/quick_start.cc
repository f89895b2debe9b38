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

#include <cstdio>

#include "wnrqc/wnrqc.hpp"

using namespace wnrqc;

int main() {
    // 53 qubits on the complete graph with 0.45% depolarizing noise per site.
    const uint32_t n = 53;
    auto channel = make_depolarizing(2, 0.0045);
    std::printf("%6s %14s %14s %14s %10s\n", "s", "fbar", "tvd_wn_bound", "ratio", "2eps*rt(s)/3");
    for (const auto &pt : cg_chain::sweep(n, channel, {100, 430, 1000, 2000, 5000, 8000})) {
        auto b = metrics::bounds_from_ztriple(pt.z);
        std::printf("%6llu %14.6e %14.6e %14.6f %10.6f\n", static_cast<unsigned long long>(pt.s), b.fbar,
                    b.tvd_wn_bound, b.ratio, metrics::reference_ratio(0.0045, static_cast<double>(pt.s)));
    }

    auto threshold = metrics::threshold_scan_depolarizing(n, 2);
    std::printf("threshold for n=%u: eps* = %.5f (%s)\n", n, threshold.eps_star,
                std::string(metrics::to_string(threshold.status)).c_str());
    return threshold.status == metrics::ThresholdStatus::found ? 0 : 1;
}
