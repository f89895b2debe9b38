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
#include <optional>
#include <string>
#include <vector>

#include "wnrqc/architectures.hpp"
#include "wnrqc/errors.hpp"
#include "wnrqc/noise_model.hpp"
#include "wnrqc/parallel.hpp"
#include "wnrqc/rng.hpp"
#include "wnrqc/stats.hpp"
#include "wnrqc/ztriple.hpp"

namespace wnrqc {

struct TrajectoryResult {
    uint32_t weight;
    double payoff;
};

struct TrajectoryStats {
    uint64_t samples = 0;
    double mean = 0;
    double se = 0;
    MomentSums sums;
    /// Number of trajectories that ended at S^n.
    uint64_t all_s_count = 0;
    /// Set when se/mean exceeds the configured limit; the estimate is then
    /// reported but should not be trusted.
    bool warning = false;
    std::string note;
};

struct WalkMcOptions {
    unsigned threads = default_threads();
    uint64_t batch_size = 8192;
    double max_relative_se = 0.25;
    /// Diagnostic mode: start every trajectory from S^n instead of the
    /// product distribution.
    bool start_from_all_s = false;
};

namespace walk_mc {

/// Walker state reused across trajectories to avoid reallocating.
class Walker {
   public:
    Walker(uint32_t n, int q) : n_(n), q_(q), bits_(n) {
        double qq = static_cast<double>(q) * q;
        to_ii_ = qq / (qq + 1.0);
        p_s_ = 1.0 / (q + 1.0);
    }

    void reset(Rng &rng, bool all_s) {
        weight_ = 0;
        for (auto &b : bits_) {
            b = all_s ? 1 : (bernoulli(rng, p_s_) ? 1 : 0);
            weight_ += b;
        }
    }

    void step(GatePair g, double sigma, Rng &rng) {
        uint8_t &a = bits_[g.i];
        uint8_t &b = bits_[g.j];
        if (a != b) {
            if (uniform01(rng) < to_ii_) {
                a = b = 0;
                weight_ -= 1;
            } else {
                a = b = 1;
                weight_ += 1;
            }
        }
        if (sigma > 0.0) {
            if (a && bernoulli(rng, sigma)) {
                a = 0;
                weight_ -= 1;
            }
            if (b && bernoulli(rng, sigma)) {
                b = 0;
                weight_ -= 1;
            }
        }
    }

    TrajectoryResult result() const {
        return {weight_, std::pow(static_cast<double>(q_), static_cast<double>(weight_))};
    }

    uint32_t n() const { return n_; }

   private:
    uint32_t n_;
    int q_;
    std::vector<uint8_t> bits_;
    uint32_t weight_ = 0;
    double to_ii_;
    double p_s_;
};

/// One trajectory of the I/S walk through a fixed diagram.
inline TrajectoryResult sample_trajectory(const CircuitDiagram &diagram, int q, double sigma, Rng &rng) {
    Walker w(diagram.n, q);
    w.reset(rng, false);
    for (const auto &g : diagram.gates) {
        w.step(g, sigma, rng);
    }
    return w.result();
}

namespace detail {

template <typename RunOne>
TrajectoryStats run_batches(uint32_t n, uint64_t samples, uint64_t seed, const WalkMcOptions &opt, RunOne run_one) {
    wnrqc::detail::require(samples >= 2, "need at least two samples");
    wnrqc::detail::require(opt.batch_size >= 1, "batch size must be positive");
    uint64_t batches = (samples + opt.batch_size - 1) / opt.batch_size;
    std::vector<MomentSums> sums(batches);
    std::vector<uint64_t> all_s(batches, 0);
    parallel_for(batches, opt.threads, [&](size_t b) {
        Rng rng = stream_rng(seed, b + 1);
        uint64_t begin = b * opt.batch_size;
        uint64_t end = std::min(samples, begin + opt.batch_size);
        for (uint64_t t = begin; t < end; t++) {
            TrajectoryResult r = run_one(rng);
            sums[b].add(r.payoff);
            if (r.weight == n) {
                all_s[b]++;
            }
        }
    });
    TrajectoryStats stats;
    for (size_t b = 0; b < batches; b++) {
        stats.sums.merge(sums[b]);
        stats.all_s_count += all_s[b];
    }
    stats.samples = stats.sums.count;
    stats.mean = stats.sums.mean();
    stats.se = stats.sums.standard_error();
    if (stats.mean > 0 && stats.se / stats.mean > opt.max_relative_se) {
        stats.warning = true;
        stats.note = "relative standard error " + std::to_string(stats.se / stats.mean) + " exceeds limit " +
                     std::to_string(opt.max_relative_se);
    }
    return stats;
}

}  // namespace detail

/// E[q^{|gamma|}] over trajectories through one fixed diagram.
inline TrajectoryStats estimate_z(
    const CircuitDiagram &diagram, int q, double sigma, uint64_t samples, uint64_t seed,
    const WalkMcOptions &opt = {}) {
    diagram.validate();
    wnrqc::detail::require(sigma >= 0.0 && sigma <= 1.0, "flip probability must lie in [0,1]");
    return detail::run_batches(diagram.n, samples, seed, opt, [&](Rng &rng) {
        Walker w(diagram.n, q);
        w.reset(rng, opt.start_from_all_s);
        for (const auto &g : diagram.gates) {
            w.step(g, sigma, rng);
        }
        return w.result();
    });
}

/// Complete-graph average: every trajectory draws its own s uniform pairs,
/// so the estimator targets the diagram-averaged Z.
inline TrajectoryStats estimate_z_complete_graph(
    uint32_t n, uint64_t s, int q, double sigma, uint64_t samples, uint64_t seed, const WalkMcOptions &opt = {}) {
    wnrqc::detail::require(n >= 2, "complete graph requires n >= 2");
    wnrqc::detail::require(sigma >= 0.0 && sigma <= 1.0, "flip probability must lie in [0,1]");
    return detail::run_batches(n, samples, seed, opt, [&](Rng &rng) {
        Walker w(n, q);
        w.reset(rng, opt.start_from_all_s);
        for (uint64_t t = 0; t < s; t++) {
            w.step(sample_complete_graph_pair(n, rng), sigma, rng);
        }
        return w.result();
    });
}

inline ZTriple to_ztriple(const TrajectoryStats &z0, const TrajectoryStats &z1, const TrajectoryStats &z2) {
    ZTriple t = ZTriple::from_excess(z0.mean - 1.0, z1.mean - 1.0, z2.mean - 1.0);
    t.provenance = Provenance::monte_carlo;
    t.se = {z0.se, z1.se, z2.se};
    return t;
}

/// (Z0, Z1, Z2) estimates. Each sigma uses its own seed derived from `seed`.
inline ZTriple estimate_ztriple(
    const CircuitDiagram &diagram, const NoiseChannel &channel, uint64_t samples, uint64_t seed,
    const WalkMcOptions &opt = {}) {
    int q = channel.q();
    return to_ztriple(
        estimate_z(diagram, q, 0.0, samples, seed * 3 + 0, opt),
        estimate_z(diagram, q, channel.sigma1(), samples, seed * 3 + 1, opt),
        estimate_z(diagram, q, channel.sigma2(), samples, seed * 3 + 2, opt));
}

inline ZTriple estimate_ztriple_complete_graph(
    uint32_t n, uint64_t s, const NoiseChannel &channel, uint64_t samples, uint64_t seed,
    const WalkMcOptions &opt = {}) {
    int q = channel.q();
    return to_ztriple(
        estimate_z_complete_graph(n, s, q, 0.0, samples, seed * 3 + 0, opt),
        estimate_z_complete_graph(n, s, q, channel.sigma1(), samples, seed * 3 + 1, opt),
        estimate_z_complete_graph(n, s, q, channel.sigma2(), samples, seed * 3 + 2, opt));
}

}  // namespace walk_mc

}  // namespace wnrqc
