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

#include <array>
#include <string_view>

namespace wnrqc {

enum class Provenance { exact, monte_carlo };

inline std::string_view to_string(Provenance p) {
    return p == Provenance::exact ? "exact" : "mc";
}

/// The second-moment quantities (Z0, Z1, Z2): Zw has w noisy copies and
/// 2-w ideal copies. Stored as excesses Z-1 because every downstream quantity
/// depends on Z-1 and the excess can be far below double epsilon.
struct ZTriple {
    std::array<double, 3> excess{0, 0, 0};
    Provenance provenance = Provenance::exact;
    /// Standard errors of the excesses, zero for exact engines.
    std::array<double, 3> se{0, 0, 0};

    static ZTriple from_excess(double z0m1, double z1m1, double z2m1) {
        ZTriple t;
        t.excess = {z0m1, z1m1, z2m1};
        return t;
    }
    static ZTriple from_values(double z0, double z1, double z2) {
        return from_excess(z0 - 1.0, z1 - 1.0, z2 - 1.0);
    }

    double z0() const { return 1.0 + excess[0]; }
    double z1() const { return 1.0 + excess[1]; }
    double z2() const { return 1.0 + excess[2]; }
};

}  // namespace wnrqc
