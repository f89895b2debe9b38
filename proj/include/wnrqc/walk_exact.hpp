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

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "wnrqc/architectures.hpp"
#include "wnrqc/errors.hpp"
#include "wnrqc/noise_model.hpp"
#include "wnrqc/ztriple.hpp"

namespace wnrqc {

/// Default largest n for the dense 2^n configuration vector (8 MB).
inline constexpr uint32_t kExactWalkMaxQudits = 20;

/// Distribution over {I,S}^n configurations, bit k of the index set when
/// qudit k carries S.
struct ConfigVector {
    uint32_t n = 0;
    std::vector<double> probs;

    double total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }
};

namespace walk_exact {

inline void check_capacity(uint32_t n, uint32_t max_qudits) {
    if (n > max_qudits) {
        throw CapacityError(
            "exact walk needs 2^" + std::to_string(n) + " entries; cap is n <= " + std::to_string(max_qudits));
    }
}

/// Product distribution: each qudit S with probability 1/(q+1).
inline ConfigVector initial_vector(uint32_t n, int q, uint32_t max_qudits = kExactWalkMaxQudits) {
    detail::require(n >= 1, "need at least one qudit");
    check_capacity(n, max_qudits);
    ConfigVector v{n, std::vector<double>(size_t{1} << n)};
    double p_i = q / (q + 1.0);
    double p_s = 1.0 / (q + 1.0);
    for (size_t idx = 0; idx < v.probs.size(); idx++) {
        int w = std::popcount(idx);
        v.probs[idx] = std::pow(p_i, static_cast<int>(n) - w) * std::pow(p_s, w);
    }
    return v;
}

/// Haar-averaged two-qudit gate: unequal pairs resolve to II w.p. q^2/(q^2+1)
/// and to SS otherwise; equal pairs are fixed.
inline void apply_gate_in_place(ConfigVector &v, GatePair pair, int q) {
    detail::require(pair.i != pair.j && pair.i < v.n && pair.j < v.n, "gate pair out of range");
    double qq = static_cast<double>(q) * q;
    double to_ii = qq / (qq + 1.0);
    double to_ss = 1.0 / (qq + 1.0);
    size_t mi = size_t{1} << pair.i;
    size_t mj = size_t{1} << pair.j;
    size_t both = mi | mj;
    for (size_t base = 0; base < v.probs.size(); base++) {
        if (base & both) {
            continue;
        }
        double mixed = v.probs[base | mi] + v.probs[base | mj];
        v.probs[base] += to_ii * mixed;
        v.probs[base | both] += to_ss * mixed;
        v.probs[base | mi] = 0.0;
        v.probs[base | mj] = 0.0;
    }
}

/// S at `site` flips to I with probability sigma; I is untouched.
inline void apply_noise_in_place(ConfigVector &v, uint32_t site, double sigma) {
    detail::require(site < v.n, "noise site out of range");
    detail::require(sigma >= 0.0 && sigma <= 1.0, "flip probability must lie in [0,1]");
    if (sigma == 0.0) {
        return;
    }
    size_t m = size_t{1} << site;
    for (size_t base = 0; base < v.probs.size(); base++) {
        if (base & m) {
            continue;
        }
        double moved = sigma * v.probs[base | m];
        v.probs[base] += moved;
        v.probs[base | m] -= moved;
    }
}

inline ConfigVector apply_gate(ConfigVector v, GatePair pair, int q) {
    apply_gate_in_place(v, pair, q);
    return v;
}

inline ConfigVector apply_noise(ConfigVector v, uint32_t site, double sigma) {
    apply_noise_in_place(v, site, sigma);
    return v;
}

/// One noisy gate step: gate, then noise on both gate sites.
inline void step_in_place(ConfigVector &v, GatePair pair, int q, double sigma) {
    apply_gate_in_place(v, pair, q);
    apply_noise_in_place(v, pair.i, sigma);
    apply_noise_in_place(v, pair.j, sigma);
}

/// <q|v> - 1, summed over non-I^n configurations so small excesses keep
/// full relative precision.
inline double z_excess(const ConfigVector &v, int q) {
    std::vector<double> weight(v.n + 1);
    for (uint32_t w = 0; w <= v.n; w++) {
        weight[w] = std::expm1(w * std::log(static_cast<double>(q)));
    }
    double acc = 0.0;
    for (size_t idx = 1; idx < v.probs.size(); idx++) {
        acc += v.probs[idx] * weight[std::popcount(idx)];
    }
    return acc;
}

/// <q|v>: the q^{|config|}-weighted total.
inline double z_value(const ConfigVector &v, int q) {
    return v.total() + z_excess(v, q);
}

/// Z_sigma - 1 for a fixed diagram.
inline double run_z_excess(
    const CircuitDiagram &diagram, int q, double sigma, uint32_t max_qudits = kExactWalkMaxQudits) {
    check_capacity(diagram.n, max_qudits);
    diagram.validate();
    ConfigVector v = initial_vector(diagram.n, q, max_qudits);
    for (const auto &g : diagram.gates) {
        step_in_place(v, g, q, sigma);
    }
    return z_excess(v, q);
}

/// Z_sigma = E_sigma[q^{|gamma^(s)|}] for a fixed diagram.
inline double run_z(const CircuitDiagram &diagram, int q, double sigma, uint32_t max_qudits = kExactWalkMaxQudits) {
    return 1.0 + run_z_excess(diagram, q, sigma, max_qudits);
}

/// (Z0, Z1, Z2) of a fixed diagram: sigma in {0, sigma1, sigma2}.
inline ZTriple run_ztriple(
    const CircuitDiagram &diagram, const NoiseChannel &channel, uint32_t max_qudits = kExactWalkMaxQudits) {
    int q = channel.q();
    return ZTriple::from_excess(
        run_z_excess(diagram, q, 0.0, max_qudits),
        run_z_excess(diagram, q, channel.sigma1(), max_qudits),
        run_z_excess(diagram, q, channel.sigma2(), max_qudits));
}

}  // namespace walk_exact

}  // namespace wnrqc
