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
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "wnrqc/architectures.hpp"
#include "wnrqc/errors.hpp"
#include "wnrqc/io.hpp"
#include "wnrqc/parallel.hpp"
#include "wnrqc/rng.hpp"
#include "wnrqc/stats.hpp"
#include "wnrqc/walk_exact.hpp"

namespace wnrqc {

inline constexpr uint32_t kCoupledWalkMaxQudits = 12;

/// Per-site state of the coupled walk. The first letter is the noiseless
/// copy X, the second the noisy copy Y. IS is not representable: it lies
/// outside the accessible subspace.
enum class PairState : uint8_t { II = 0, SS = 1, SI = 2 };

/// Distribution over {II, SS, SI}^n; site k is base-3 digit k.
struct CoupledVector {
    uint32_t n = 0;
    std::vector<double> probs;

    double total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }
};

struct DestinedMassReport {
    uint64_t t = 0;
    double m_ss = 0;
    /// Entry w sums the S-destined weight of configurations whose agreement
    /// string has w S's.
    std::vector<double> w_profile;
};

struct DestinedMassEstimate {
    uint64_t t = 0;
    double m_ss = 0;
    double m_ss_se = 0;
    std::vector<double> w_profile;
    std::vector<double> w_profile_se;
};

namespace coupled_walk {

inline uint64_t pow3(uint32_t k) {
    uint64_t r = 1;
    for (uint32_t i = 0; i < k; i++) {
        r *= 3;
    }
    return r;
}

inline void check_capacity(uint32_t n, uint32_t max_qudits) {
    if (n > max_qudits) {
        throw CapacityError(
            "coupled walk needs 3^" + std::to_string(n) + " entries; cap is n <= " + std::to_string(max_qudits));
    }
}

inline void check_shape(const CoupledVector &v) {
    if (v.probs.size() != pow3(v.n)) {
        throw ContractViolation("coupled vector length does not match 3^n");
    }
}

/// Index of the configuration with the given X and Y bit strings (1 = S).
/// Throws ContractViolation if some site has X=I and Y=S.
inline uint64_t encode(const std::vector<uint8_t> &x, const std::vector<uint8_t> &y) {
    if (x.size() != y.size()) {
        throw ContractViolation("X and Y strings differ in length");
    }
    uint64_t idx = 0;
    uint64_t place = 1;
    for (size_t k = 0; k < x.size(); k++) {
        uint64_t digit;
        if (!x[k] && y[k]) {
            throw ContractViolation("site " + std::to_string(k) + " is IS, outside the accessible subspace");
        }
        digit = !x[k] ? 0 : (y[k] ? 1 : 2);
        idx += digit * place;
        place *= 3;
    }
    return idx;
}

inline std::vector<uint8_t> decode(uint64_t idx, uint32_t n) {
    std::vector<uint8_t> digits(n);
    for (uint32_t k = 0; k < n; k++) {
        digits[k] = static_cast<uint8_t>(idx % 3);
        idx /= 3;
    }
    return digits;
}

/// |LambdaLambda>: both copies start equal, each site II w.p. q/(q+1).
inline CoupledVector initial_vector(uint32_t n, int q, uint32_t max_qudits = kCoupledWalkMaxQudits) {
    detail::require(n >= 1, "need at least one qudit");
    check_capacity(n, max_qudits);
    CoupledVector v{n, std::vector<double>(pow3(n), 0.0)};
    double p_ii = q / (q + 1.0);
    double p_ss = 1.0 / (q + 1.0);
    for (uint64_t mask = 0; mask < (uint64_t{1} << n); mask++) {
        uint64_t idx = 0;
        uint64_t place = 1;
        int w = 0;
        for (uint32_t k = 0; k < n; k++) {
            if (mask >> k & 1) {
                idx += place;
                w++;
            }
            place *= 3;
        }
        v.probs[idx] = std::pow(p_ss, w) * std::pow(p_ii, static_cast<int>(n) - w);
    }
    return v;
}

/// Every configuration SS.
inline CoupledVector all_ss_vector(uint32_t n, uint32_t max_qudits = kCoupledWalkMaxQudits) {
    check_capacity(n, max_qudits);
    CoupledVector v{n, std::vector<double>(pow3(n), 0.0)};
    v.probs[(pow3(n) - 1) / 2] = 1.0;
    return v;
}

namespace detail {

struct Outcome {
    uint8_t di;
    uint8_t dj;
    double p;
};

/// Gate outcomes for digits (di, dj) before noise; at most two branches.
inline int gate_outcomes(uint8_t di, uint8_t dj, double to_ii, Outcome out[2]) {
    bool xi = di >= 1;
    bool xj = dj >= 1;
    bool yi = di == 1;
    bool yj = dj == 1;
    if (xi == xj && yi == yj) {
        out[0] = {di, dj, 1.0};
        return 1;
    }
    if (xi == xj) {
        // Y unequal under an equal X pair forces X = SS.
        out[0] = {2, 2, to_ii};
        out[1] = {1, 1, 1.0 - to_ii};
        return 2;
    }
    // X unequal with Y equal forces Y = II, so X resolving to SS gives SI.
    if (yi == yj) {
        out[0] = {0, 0, to_ii};
        out[1] = {2, 2, 1.0 - to_ii};
        return 2;
    }
    out[0] = {0, 0, to_ii};
    out[1] = {1, 1, 1.0 - to_ii};
    return 2;
}

}  // namespace detail

/// Adds step(v) restricted to `pair`, times `weight`, into `out`.
inline void accumulate_step(
    const CoupledVector &v, GatePair pair, int q, double sigma, double weight, std::vector<double> &out) {
    double qq = static_cast<double>(q) * q;
    double to_ii = qq / (qq + 1.0);
    uint64_t pi = pow3(pair.i);
    uint64_t pj = pow3(pair.j);
    for (uint64_t idx = 0; idx < v.probs.size(); idx++) {
        double mass = v.probs[idx];
        if (mass == 0.0) {
            continue;
        }
        uint8_t di = static_cast<uint8_t>(idx / pi % 3);
        uint8_t dj = static_cast<uint8_t>(idx / pj % 3);
        uint64_t rest = idx - di * pi - dj * pj;
        detail::Outcome outs[2];
        int k = detail::gate_outcomes(di, dj, to_ii, outs);
        for (int b = 0; b < k; b++) {
            double pb = weight * mass * outs[b].p;
            // Noise on Y: an S (digit 1) becomes I, turning SS into SI.
            double ni[2] = {outs[b].di == 1 ? 1.0 - sigma : 1.0, outs[b].di == 1 ? sigma : 0.0};
            double nj[2] = {outs[b].dj == 1 ? 1.0 - sigma : 1.0, outs[b].dj == 1 ? sigma : 0.0};
            for (int a = 0; a < 2; a++) {
                if (ni[a] == 0.0) {
                    continue;
                }
                uint8_t ri = a ? 2 : outs[b].di;
                for (int c = 0; c < 2; c++) {
                    if (nj[c] == 0.0) {
                        continue;
                    }
                    uint8_t rj = c ? 2 : outs[b].dj;
                    out[rest + ri * pi + rj * pj] += pb * ni[a] * nj[c];
                }
            }
        }
    }
}

inline void check_entries(const CoupledVector &v) {
    check_shape(v);
    for (double p : v.probs) {
        if (!(p >= 0.0)) {
            throw ContractViolation("coupled vector has a negative or non-finite entry");
        }
    }
}

/// One coupled gate step on `pair`, then noise on the Y copy at both sites.
inline CoupledVector coupled_step(const CoupledVector &v, GatePair pair, int q, double sigma) {
    check_entries(v);
    wnrqc::detail::require(pair.i != pair.j && pair.i < v.n && pair.j < v.n, "gate pair out of range");
    wnrqc::detail::require(sigma >= 0.0 && sigma <= 1.0, "flip probability must lie in [0,1]");
    CoupledVector out{v.n, std::vector<double>(v.probs.size(), 0.0)};
    accumulate_step(v, pair, q, sigma, 1.0, out.probs);
    return out;
}

/// Step averaged over the n(n-1)/2 equally likely complete-graph pairs.
inline CoupledVector coupled_step_complete_graph(const CoupledVector &v, int q, double sigma) {
    check_entries(v);
    wnrqc::detail::require(v.n >= 2, "complete graph requires n >= 2");
    CoupledVector out{v.n, std::vector<double>(v.probs.size(), 0.0)};
    double weight = 2.0 / (static_cast<double>(v.n) * (v.n - 1));
    for (uint32_t i = 0; i < v.n; i++) {
        for (uint32_t j = i + 1; j < v.n; j++) {
            accumulate_step(v, {i, j}, q, sigma, weight, out.probs);
        }
    }
    return out;
}

/// Probability that the noiseless walk from a configuration of weight w ends
/// at S^n: (q^{-2n+2w} - q^{-2n}) / (1 - q^{-2n}).
inline double l_s(uint32_t w, uint32_t n, int q) {
    double lq = std::log(static_cast<double>(q));
    return std::expm1(2.0 * w * lq) * std::exp(-2.0 * n * lq) / -std::expm1(-2.0 * n * lq);
}

inline DestinedMassReport destined_mass(const CoupledVector &v, int q, uint64_t t = 0) {
    check_entries(v);
    DestinedMassReport r{t, 0.0, std::vector<double>(v.n + 1, 0.0)};
    std::vector<double> ls(v.n + 1);
    for (uint32_t w = 0; w <= v.n; w++) {
        ls[w] = l_s(w, v.n, q);
    }
    for (uint64_t idx = 0; idx < v.probs.size(); idx++) {
        double p = v.probs[idx];
        if (p == 0.0) {
            continue;
        }
        uint32_t y_weight = 0;
        uint32_t agree = 0;
        uint64_t rest = idx;
        for (uint32_t k = 0; k < v.n; k++) {
            uint64_t d = rest % 3;
            rest /= 3;
            y_weight += d == 1;
            agree += d != 2;
        }
        double contrib = p * ls[y_weight];
        r.m_ss += contrib;
        r.w_profile[agree] += contrib;
    }
    return r;
}

/// Marginal of the noiseless copy X over {I,S}^n.
inline ConfigVector x_marginal(const CoupledVector &v) {
    check_shape(v);
    ConfigVector out{v.n, std::vector<double>(size_t{1} << v.n, 0.0)};
    for (uint64_t idx = 0; idx < v.probs.size(); idx++) {
        uint64_t rest = idx;
        size_t bits = 0;
        for (uint32_t k = 0; k < v.n; k++) {
            if (rest % 3 != 0) {
                bits |= size_t{1} << k;
            }
            rest /= 3;
        }
        out.probs[bits] += v.probs[idx];
    }
    return out;
}

/// Marginal of the noisy copy Y over {I,S}^n.
inline ConfigVector y_marginal(const CoupledVector &v) {
    check_shape(v);
    ConfigVector out{v.n, std::vector<double>(size_t{1} << v.n, 0.0)};
    for (uint64_t idx = 0; idx < v.probs.size(); idx++) {
        uint64_t rest = idx;
        size_t bits = 0;
        for (uint32_t k = 0; k < v.n; k++) {
            if (rest % 3 == 1) {
                bits |= size_t{1} << k;
            }
            rest /= 3;
        }
        out.probs[bits] += v.probs[idx];
    }
    return out;
}

/// Destined-mass reports for t = 0..s along a fixed diagram.
inline std::vector<DestinedMassReport> run_exact(
    const CircuitDiagram &diagram, int q, double sigma, uint32_t max_qudits = kCoupledWalkMaxQudits) {
    diagram.validate();
    CoupledVector v = initial_vector(diagram.n, q, max_qudits);
    std::vector<DestinedMassReport> out;
    out.reserve(diagram.gates.size() + 1);
    out.push_back(destined_mass(v, q, 0));
    for (size_t t = 0; t < diagram.gates.size(); t++) {
        v = coupled_step(v, diagram.gates[t], q, sigma);
        out.push_back(destined_mass(v, q, t + 1));
    }
    return out;
}

/// Destined-mass reports for t = 0..s under the diagram-averaged complete graph.
inline std::vector<DestinedMassReport> run_exact_complete_graph(
    uint32_t n, uint64_t s, int q, double sigma, uint32_t max_qudits = kCoupledWalkMaxQudits) {
    CoupledVector v = initial_vector(n, q, max_qudits);
    std::vector<DestinedMassReport> out;
    out.push_back(destined_mass(v, q, 0));
    for (uint64_t t = 0; t < s; t++) {
        v = coupled_step_complete_graph(v, q, sigma);
        out.push_back(destined_mass(v, q, t + 1));
    }
    return out;
}

namespace detail {

struct Accumulators {
    std::vector<MomentSums> m_ss;
    std::vector<std::vector<MomentSums>> profile;

    Accumulators(size_t steps, uint32_t n)
        : m_ss(steps + 1), profile(steps + 1, std::vector<MomentSums>(n + 1)) {}

    void merge(const Accumulators &o) {
        for (size_t t = 0; t < m_ss.size(); t++) {
            m_ss[t].merge(o.m_ss[t]);
            for (size_t w = 0; w < profile[t].size(); w++) {
                profile[t][w].merge(o.profile[t][w]);
            }
        }
    }
};

template <typename NextPair>
void run_coupled_trajectory(
    uint32_t n, uint64_t steps, int q, double sigma, const std::vector<double> &ls, Rng &rng, NextPair next_pair,
    Accumulators &acc) {
    double qq = static_cast<double>(q) * q;
    double to_ii = qq / (qq + 1.0);
    std::vector<uint8_t> d(n);
    uint32_t y_weight = 0;
    uint32_t agree = n;
    for (auto &x : d) {
        x = bernoulli(rng, 1.0 / (q + 1.0)) ? 1 : 0;
        y_weight += x;
    }
    auto record = [&](uint64_t t) {
        double l = ls[y_weight];
        acc.m_ss[t].add(l);
        for (uint32_t w = 0; w <= n; w++) {
            acc.profile[t][w].add(w == agree ? l : 0.0);
        }
    };
    record(0);
    for (uint64_t t = 0; t < steps; t++) {
        GatePair g = next_pair(rng);
        Outcome outs[2];
        int k = gate_outcomes(d[g.i], d[g.j], to_ii, outs);
        Outcome pick = outs[0];
        if (k == 2 && uniform01(rng) >= outs[0].p) {
            pick = outs[1];
        }
        for (auto [site, digit] : {std::pair{g.i, pick.di}, std::pair{g.j, pick.dj}}) {
            uint8_t nd = digit;
            if (nd == 1 && sigma > 0.0 && bernoulli(rng, sigma)) {
                nd = 2;
            }
            y_weight += (nd == 1) - (d[site] == 1);
            agree += (nd != 2) - (d[site] != 2);
            d[site] = nd;
        }
        record(t + 1);
    }
}

template <typename NextPairFactory>
std::vector<DestinedMassEstimate> mc_batches(
    uint32_t n, uint64_t steps, int q, double sigma, uint64_t samples, uint64_t seed, unsigned threads,
    NextPairFactory make_next) {
    wnrqc::detail::require(samples >= 2, "need at least two samples");
    wnrqc::detail::require(sigma >= 0.0 && sigma <= 1.0, "flip probability must lie in [0,1]");
    std::vector<double> ls(n + 1);
    for (uint32_t w = 0; w <= n; w++) {
        ls[w] = l_s(w, n, q);
    }
    const uint64_t batch = 4096;
    uint64_t batches = (samples + batch - 1) / batch;
    std::vector<Accumulators> parts(batches, Accumulators(steps, n));
    parallel_for(batches, threads, [&](size_t b) {
        Rng rng = stream_rng(seed, b + 1);
        uint64_t end = std::min(samples, (b + 1) * batch);
        for (uint64_t i = b * batch; i < end; i++) {
            run_coupled_trajectory(n, steps, q, sigma, ls, rng, make_next(), parts[b]);
        }
    });
    Accumulators total(steps, n);
    for (const auto &p : parts) {
        total.merge(p);
    }
    std::vector<DestinedMassEstimate> out(steps + 1);
    for (uint64_t t = 0; t <= steps; t++) {
        auto &e = out[t];
        e.t = t;
        e.m_ss = total.m_ss[t].mean();
        e.m_ss_se = total.m_ss[t].standard_error();
        for (uint32_t w = 0; w <= n; w++) {
            e.w_profile.push_back(total.profile[t][w].mean());
            e.w_profile_se.push_back(total.profile[t][w].standard_error());
        }
    }
    return out;
}

}  // namespace detail

/// Trajectory estimates of m_SS(t) and the agreement profile for t = 0..s.
inline std::vector<DestinedMassEstimate> mc_coupled(
    const CircuitDiagram &diagram, int q, double sigma, uint64_t samples, uint64_t seed,
    unsigned threads = default_threads()) {
    diagram.validate();
    return detail::mc_batches(diagram.n, diagram.gates.size(), q, sigma, samples, seed, threads, [&diagram] {
        return [&diagram, t = size_t{0}](Rng &) mutable { return diagram.gates[t++]; };
    });
}

/// As mc_coupled, drawing a fresh complete-graph diagram per trajectory.
inline std::vector<DestinedMassEstimate> mc_coupled_complete_graph(
    uint32_t n, uint64_t s, int q, double sigma, uint64_t samples, uint64_t seed,
    unsigned threads = default_threads()) {
    wnrqc::detail::require(n >= 2, "complete graph requires n >= 2");
    return detail::mc_batches(n, s, q, sigma, samples, seed, threads, [n] {
        return [n](Rng &rng) { return sample_complete_graph_pair(n, rng); };
    });
}

inline void write_csv(std::ostream &out, const std::vector<DestinedMassReport> &reports) {
    write_schema_line(out, "wnrqc.coupled", 1);
    uint32_t n = reports.empty() ? 0 : static_cast<uint32_t>(reports.front().w_profile.size() - 1);
    out << "t,m_ss";
    for (uint32_t w = 0; w <= n; w++) {
        out << ",w" << w;
    }
    out << '\n';
    for (const auto &r : reports) {
        out << r.t << ',' << format_double(r.m_ss);
        for (double x : r.w_profile) {
            out << ',' << format_double(x);
        }
        out << '\n';
    }
}

}  // namespace coupled_walk

}  // namespace wnrqc
