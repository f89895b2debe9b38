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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "wnrqc/errors.hpp"
#include "wnrqc/rng.hpp"
#include "wnrqc/stats.hpp"

namespace wnrqc {

/// Evaluates x -> p'_noisy(x). Within relative error 2 nu on all but a
/// fraction mu of outcomes; nu = mu = 0 for an exact oracle.
struct ProbOracle {
    std::function<double(uint64_t)> eval;
    double nu = 0;
    double mu = 0;

    double operator()(uint64_t x) const { return eval(x); }
};

struct RejectionConfig {
    /// Acceptance threshold multiplier; outcomes with estimated ideal
    /// probability above 2k q^-n are never output.
    double k = 50;
    /// White-noise fidelity of the sampled distribution.
    double f = 1;
    /// 0 selects 4k ln^2(q^n).
    uint64_t max_rounds = 0;
};

struct RejectionOutcome {
    uint64_t x = 0;
    uint64_t rounds = 0;
    /// The round cap was hit and x is a uniform fallback.
    bool capped = false;
};

namespace reduction {

inline uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline ProbOracle exact_oracle(std::vector<double> p) {
    return {[p = std::move(p)](uint64_t x) { return p.at(x); }, 0.0, 0.0};
}

/// Synthetic approximate oracle. The error realization is a fixed function
/// of (omega, x), so repeated queries of the same x agree: p(x)(1 + 2 nu g)
/// with g uniform in [-1, 1], except on a fraction mu of outcomes where the
/// answer is off by a factor 3.
inline ProbOracle noisy_oracle(std::vector<double> p, double nu, double mu, uint64_t omega) {
    detail::require(nu >= 0.0 && nu <= 0.5, "relative error nu must lie in [0, 0.5]");
    detail::require(mu >= 0.0 && mu <= 1.0, "failure fraction mu must lie in [0, 1]");
    auto eval = [p = std::move(p), nu, mu, omega](uint64_t x) {
        uint64_t h = splitmix64(omega ^ splitmix64(x));
        double u1 = static_cast<double>(h >> 11) * 0x1.0p-53;
        double u2 = static_cast<double>(splitmix64(h) >> 11) * 0x1.0p-53;
        double px = p.at(x);
        if (u2 < mu) {
            return 3.0 * px;
        }
        return px * (1.0 + 2.0 * nu * (2.0 * u1 - 1.0));
    };
    return {eval, nu, mu};
}

inline double dimension(uint32_t n, int q) {
    return std::pow(static_cast<double>(q), static_cast<double>(n));
}

inline uint64_t default_max_rounds(double k, uint32_t n, int q) {
    double l = std::log(dimension(n, q));
    return static_cast<uint64_t>(std::ceil(4.0 * k * std::max(1.0, l * l)));
}

/// Estimated ideal probability max(0, (p' - (1-F) q^-n) / F).
inline double ideal_estimate(double p_noisy_estimate, double f, double dim) {
    return std::max(0.0, (p_noisy_estimate - (1.0 - f) / dim) / f);
}

/// Draw x uniformly, estimate its ideal probability, accept when it is at
/// most 2k q^-n and a uniform eta falls below estimate * q^n / (2k).
inline RejectionOutcome rejection_sample(
    const ProbOracle &oracle, const RejectionConfig &cfg, uint32_t n, int q, Rng &rng) {
    detail::require(cfg.k > 1.0, "k must exceed 1");
    detail::require(cfg.f > 0.0 && cfg.f <= 1.0, "F must lie in (0, 1]");
    double dim = dimension(n, q);
    auto outcomes = static_cast<uint64_t>(dim);
    uint64_t cap = cfg.max_rounds ? cfg.max_rounds : default_max_rounds(cfg.k, n, q);
    double threshold = 2.0 * cfg.k / dim;
    for (uint64_t round = 1; round <= cap; round++) {
        uint64_t x = uniform_below(rng, outcomes);
        double est = ideal_estimate(oracle(x), cfg.f, dim);
        double eta = uniform01(rng);
        if (est <= threshold && eta <= est * dim / (2.0 * cfg.k)) {
            return {x, round, false};
        }
    }
    return {uniform_below(rng, outcomes), cap, true};
}

struct ThresholdCheck {
    double lhs = 0;
    double rhs = 0;
    bool holds() const { return lhs <= rhs + 1e-15; }
};

/// sum p1 1(p1 > T) <= 4 (1/2 ||p1 - p2||_1) + sum p2 1(p2 > T/2).
inline ThresholdCheck tvd_threshold_check(const std::vector<double> &p1, const std::vector<double> &p2, double t) {
    detail::require(p1.size() == p2.size(), "distributions differ in length");
    ThresholdCheck c;
    double l1 = 0;
    double tail2 = 0;
    for (size_t x = 0; x < p1.size(); x++) {
        detail::require(std::isfinite(p1[x]) && std::isfinite(p2[x]), "distributions must be finite");
        if (p1[x] > t) {
            c.lhs += p1[x];
        }
        if (p2[x] > t / 2.0) {
            tail2 += p2[x];
        }
        l1 += std::abs(p1[x] - p2[x]);
    }
    c.rhs = 2.0 * l1 + tail2;
    return c;
}

/// F p_ideal + (1-F) uniform.
inline std::vector<double> white_noise_mixture(const std::vector<double> &p_ideal, double f) {
    std::vector<double> out(p_ideal.size());
    double uni = (1.0 - f) / static_cast<double>(p_ideal.size());
    for (size_t x = 0; x < p_ideal.size(); x++) {
        out[x] = f * p_ideal[x] + uni;
    }
    return out;
}

struct ReductionReport {
    uint32_t n = 0;
    int q = 2;
    double f = 1;
    double k = 0;
    double nu = 0;
    uint64_t samples = 0;
    /// Accepted samples per round.
    double accept_rate = 0;
    double mean_rounds = 0;
    double mean_rounds_se = 0;
    uint64_t capped = 0;
    /// Empirical TVD between the output histogram and p_ideal.
    double tvd_to_ideal = 0;
    /// Typical size of the empirical TVD's sampling noise.
    double tvd_se = 0;
    /// TVD of the exact output law (estimate restricted to W) to p_ideal.
    double tvd_to_ideal_exact = 0;
    /// q^n sum p_ideal^2.
    double z_prime = 0;
    /// Mass of the ideal estimate inside W, the per-round acceptance times 2k.
    double accepted_mass = 0;
    /// Expected rounds 2k / accepted_mass.
    double expected_rounds = 0;
    /// Oracle cost per output when each query costs 1/nu with nu = nu_scale F.
    double oracle_cost = 0;
    std::vector<double> output_histogram;
};

struct ReductionRunConfig {
    double k = 50;
    double f = 1;
    double nu = 0;
    double mu = 0;
    uint64_t omega = 1;
    uint64_t samples = 1000000;
    uint64_t seed = 1;
    /// Query precision is taken as nu = nu_scale F when pricing oracle work.
    double nu_scale = 0.1;
};

/// Samples from the rejection sampler fed by the white-noise mixture of
/// `p_ideal` at fidelity cfg.f, and compares the output with p_ideal.
inline ReductionReport run_reduction(const std::vector<double> &p_ideal, uint32_t n, int q,
                                     const ReductionRunConfig &cfg) {
    double dim = dimension(n, q);
    detail::require(static_cast<double>(p_ideal.size()) == dim, "p_ideal length must be q^n");
    detail::require(cfg.samples >= 2, "need at least two samples");
    std::vector<double> p_noisy = white_noise_mixture(p_ideal, cfg.f);
    ProbOracle oracle = cfg.nu == 0.0 && cfg.mu == 0.0 ? exact_oracle(p_noisy)
                                                       : noisy_oracle(p_noisy, cfg.nu, cfg.mu, cfg.omega);
    RejectionConfig rc{cfg.k, cfg.f, 0};

    ReductionReport rep;
    rep.n = n;
    rep.q = q;
    rep.f = cfg.f;
    rep.k = cfg.k;
    rep.nu = cfg.nu;
    rep.samples = cfg.samples;

    std::vector<double> law(p_ideal.size(), 0.0);
    double threshold = 2.0 * cfg.k / dim;
    for (size_t x = 0; x < p_ideal.size(); x++) {
        double est = ideal_estimate(oracle(x), cfg.f, dim);
        if (est <= threshold) {
            law[x] = est;
            rep.accepted_mass += est;
        }
        rep.z_prime += p_ideal[x] * p_ideal[x];
    }
    rep.z_prime *= dim;
    rep.expected_rounds = 2.0 * cfg.k / rep.accepted_mass;
    double exact_tvd = 0;
    for (size_t x = 0; x < p_ideal.size(); x++) {
        exact_tvd += std::abs(law[x] / rep.accepted_mass - p_ideal[x]);
    }
    rep.tvd_to_ideal_exact = 0.5 * exact_tvd;

    Rng rng = stream_rng(cfg.seed, 0);
    std::vector<uint64_t> counts(p_ideal.size(), 0);
    MomentSums rounds;
    for (uint64_t t = 0; t < cfg.samples; t++) {
        RejectionOutcome o = rejection_sample(oracle, rc, n, q, rng);
        counts[o.x]++;
        rounds.add(static_cast<double>(o.rounds));
        rep.capped += o.capped;
    }
    rep.mean_rounds = rounds.mean();
    rep.mean_rounds_se = rounds.standard_error();
    rep.accept_rate = 1.0 / rep.mean_rounds;
    rep.oracle_cost = rep.mean_rounds / (cfg.nu_scale * cfg.f);
    rep.output_histogram.resize(counts.size());
    double tvd = 0;
    double noise = 0;
    double total = static_cast<double>(cfg.samples);
    for (size_t x = 0; x < counts.size(); x++) {
        double phat = counts[x] / total;
        rep.output_histogram[x] = phat;
        tvd += std::abs(phat - p_ideal[x]);
        noise += std::sqrt(phat * (1.0 - phat) / total);
    }
    rep.tvd_to_ideal = 0.5 * tvd;
    rep.tvd_se = 0.5 * noise;
    return rep;
}

}  // namespace reduction

}  // namespace wnrqc
