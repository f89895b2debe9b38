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
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "wnrqc/errors.hpp"
#include "wnrqc/noise_model.hpp"
#include "wnrqc/ztriple.hpp"

namespace wnrqc {

/// Where noise acts after each complete-graph gate. Only `gate_sites` matches
/// the walk of the noisy circuit; `all_sites` is kept as a comparison option.
enum class NoisePlacement { gate_sites, all_sites };

/// Distribution over the Hamming weight w = #S of a configuration.
struct WeightDistribution {
    uint32_t n = 0;
    std::vector<double> probs;

    double total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }
};

/// One-gate transition matrix of the complete-graph walk on Hamming weights.
/// Row w holds P(w -> w + k) at column k + 2 for k in [-2, 2].
struct BandedStepMatrix {
    uint32_t n = 0;
    std::vector<std::array<double, 5>> rows;

    double at(uint32_t from, uint32_t to) const {
        long k = static_cast<long>(to) - static_cast<long>(from);
        if (k < -2 || k > 2) {
            return 0.0;
        }
        return rows[from][static_cast<size_t>(k + 2)];
    }

    std::vector<std::vector<double>> dense() const {
        std::vector<std::vector<double>> m(n + 1, std::vector<double>(n + 1, 0.0));
        for (uint32_t w = 0; w <= n; w++) {
            for (int k = -2; k <= 2; k++) {
                long to = static_cast<long>(w) + k;
                if (to >= 0 && to <= static_cast<long>(n)) {
                    m[w][static_cast<size_t>(to)] = rows[w][static_cast<size_t>(k + 2)];
                }
            }
        }
        return m;
    }
};

namespace cg_chain {

/// The gate pair is uniform over all n(n-1)/2 pairs, so only w matters:
///   II pair  (n-w)(n-w-1)/(n(n-1)): nothing moves;
///   SS pair  w(w-1)/(n(n-1)):       noise thins the two S's;
///   IS pair  2w(n-w)/(n(n-1)):      -> II (w-1) w.p. q^2/(q^2+1), else -> SS
///                                   (w+1) followed by noise on both sites.
inline BandedStepMatrix step_matrix(uint32_t n, int q, double sigma) {
    detail::require(n >= 2, "complete-graph chain needs n >= 2");
    detail::require(sigma >= 0.0 && sigma <= 1.0, "flip probability must lie in [0,1]");
    double qq = static_cast<double>(q) * q;
    double to_ii = qq / (qq + 1.0);
    double to_ss = 1.0 / (qq + 1.0);
    double keep2 = (1.0 - sigma) * (1.0 - sigma);
    double lose1 = 2.0 * sigma * (1.0 - sigma);
    double lose2 = sigma * sigma;
    double pairs = static_cast<double>(n) * (n - 1);

    BandedStepMatrix m{n, std::vector<std::array<double, 5>>(n + 1)};
    for (uint32_t w = 0; w <= n; w++) {
        double dw = w;
        double phi_ii = (n - dw) * (n - dw - 1.0) / pairs;
        double phi_ss = dw * (dw - 1.0) / pairs;
        double phi_is = 2.0 * dw * (n - dw) / pairs;
        auto &row = m.rows[w];
        row = {0, 0, 0, 0, 0};
        row[2] += phi_ii;
        row[2] += phi_ss * keep2;
        row[1] += phi_ss * lose1;
        row[0] += phi_ss * lose2;
        row[1] += phi_is * to_ii;
        row[3] += phi_is * to_ss * keep2;
        row[2] += phi_is * to_ss * lose1;
        row[1] += phi_is * to_ss * lose2;
    }
    return m;
}

inline double log_binomial(uint32_t n, uint32_t k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Binomial(n, 1/(q+1)) distribution of the initial S count.
inline WeightDistribution initial_weights(uint32_t n, int q) {
    WeightDistribution d{n, std::vector<double>(n + 1)};
    double lq = std::log(static_cast<double>(q));
    double lq1 = std::log(q + 1.0);
    for (uint32_t w = 0; w <= n; w++) {
        d.probs[w] = std::exp(log_binomial(n, w) + (n - w) * lq - n * lq1);
    }
    return d;
}

inline WeightDistribution apply(const BandedStepMatrix &m, const WeightDistribution &d) {
    WeightDistribution out{d.n, std::vector<double>(d.n + 1, 0.0)};
    for (uint32_t w = 0; w <= d.n; w++) {
        double mass = d.probs[w];
        if (mass == 0.0) {
            continue;
        }
        for (int k = -2; k <= 2; k++) {
            long to = static_cast<long>(w) + k;
            if (to >= 0 && to <= static_cast<long>(d.n)) {
                out.probs[static_cast<size_t>(to)] += mass * m.rows[w][static_cast<size_t>(k + 2)];
            }
        }
    }
    return out;
}

/// Sum_w p(w) (q^w - 1).
inline double z_excess(const WeightDistribution &d, int q) {
    double acc = 0.0;
    double lq = std::log(static_cast<double>(q));
    for (uint32_t w = 1; w <= d.n; w++) {
        acc += d.probs[w] * std::expm1(w * lq);
    }
    return acc;
}

/// Evolves the w >= 1 part of the weight distribution for one flip rate.
/// w = 0 is absorbing and contributes nothing to Z - 1, so it is dropped.
/// The kept vector is rescaled by exact powers of two and the exponent is
/// carried separately, so Z - 1 is available in log form for any s and n.
class Evolver {
   public:
    Evolver(uint32_t n, int q, double sigma, NoisePlacement placement = NoisePlacement::gate_sites)
        : n_(n), q_(q), sigma_(sigma), placement_(placement), step_(step_matrix(n, q,
              placement == NoisePlacement::gate_sites ? sigma : 0.0)),
          mass_(n + 1, 0.0), scratch_(n + 1, 0.0) {
        double lq = std::log(static_cast<double>(q));
        double lq1 = std::log(q + 1.0);
        std::vector<double> logp(n + 1, -std::numeric_limits<double>::infinity());
        double top = -std::numeric_limits<double>::infinity();
        for (uint32_t w = 1; w <= n; w++) {
            logp[w] = log_binomial(n, w) + (n - w) * lq - n * lq1;
            top = std::max(top, logp[w]);
        }
        exponent_ = static_cast<long>(std::floor(top / std::log(2.0)));
        for (uint32_t w = 1; w <= n; w++) {
            mass_[w] = std::exp(logp[w] - exponent_ * std::log(2.0));
        }
        if (placement_ == NoisePlacement::all_sites) {
            build_thinning();
        }
    }

    void step() {
        std::fill(scratch_.begin(), scratch_.end(), 0.0);
        for (uint32_t w = 1; w <= n_; w++) {
            double m = mass_[w];
            if (m == 0.0) {
                continue;
            }
            const auto &row = step_.rows[w];
            for (int k = -2; k <= 2; k++) {
                long to = static_cast<long>(w) + k;
                if (to >= 1 && to <= static_cast<long>(n_)) {
                    scratch_[static_cast<size_t>(to)] += m * row[static_cast<size_t>(k + 2)];
                }
            }
        }
        mass_.swap(scratch_);
        if (placement_ == NoisePlacement::all_sites) {
            thin_all_sites();
        }
        steps_++;
        renormalize();
    }

    void advance_to(uint64_t s) {
        while (steps_ < s) {
            step();
        }
    }

    uint64_t steps() const { return steps_; }

    /// ln(Z_sigma - 1); -inf once all mass has reached I^n.
    double log_excess() const {
        double lq = std::log(static_cast<double>(q_));
        double top = -std::numeric_limits<double>::infinity();
        std::vector<double> terms(n_ + 1, -std::numeric_limits<double>::infinity());
        for (uint32_t w = 1; w <= n_; w++) {
            if (mass_[w] > 0.0) {
                // ln(q^w - 1) = w ln q + ln(1 - q^-w)
                terms[w] = std::log(mass_[w]) + w * lq + std::log1p(-std::exp(-(w * lq)));
                top = std::max(top, terms[w]);
            }
        }
        if (!std::isfinite(top)) {
            return top;
        }
        double acc = 0.0;
        for (uint32_t w = 1; w <= n_; w++) {
            if (std::isfinite(terms[w])) {
                acc += std::exp(terms[w] - top);
            }
        }
        return top + std::log(acc) + exponent_ * std::log(2.0);
    }

    double excess() const { return std::exp(log_excess()); }

    /// Current distribution over w = 1..n (entry 0 is not tracked and is 0).
    std::vector<double> tail() const {
        std::vector<double> out(mass_);
        for (auto &x : out) {
            x = std::ldexp(x, static_cast<int>(exponent_));
        }
        return out;
    }

   private:
    void renormalize() {
        double top = *std::max_element(mass_.begin(), mass_.end());
        if (top == 0.0) {
            return;
        }
        int e = 0;
        std::frexp(top, &e);
        if (e < -400 || e > 400) {
            for (auto &x : mass_) {
                x = std::ldexp(x, -e);
            }
            exponent_ += e;
        }
    }

    void build_thinning() {
        thinning_.assign(n_ + 1, std::vector<double>(n_ + 1, 0.0));
        for (uint32_t w = 0; w <= n_; w++) {
            for (uint32_t k = 0; k <= w; k++) {
                double lp = log_binomial(w, k);
                lp += (k > 0 ? k * std::log1p(-sigma_) : 0.0);
                lp += (w - k > 0 ? (w - k) * std::log(sigma_) : 0.0);
                thinning_[w][k] = (sigma_ == 0.0) ? (k == w ? 1.0 : 0.0) : std::exp(lp);
            }
        }
    }

    void thin_all_sites() {
        std::fill(scratch_.begin(), scratch_.end(), 0.0);
        for (uint32_t w = 1; w <= n_; w++) {
            for (uint32_t k = 1; k <= w; k++) {
                scratch_[k] += mass_[w] * thinning_[w][k];
            }
        }
        mass_.swap(scratch_);
    }

    uint32_t n_;
    int q_;
    double sigma_;
    NoisePlacement placement_;
    BandedStepMatrix step_;
    std::vector<double> mass_;
    std::vector<double> scratch_;
    std::vector<std::vector<double>> thinning_;
    long exponent_ = 0;
    uint64_t steps_ = 0;
};

struct SweepPoint {
    uint64_t s;
    ZTriple z;
    /// ln(Z_k - 1), finite far beyond where the excess underflows.
    std::array<double, 3> log_excess;
};

/// Incremental (Z0, Z1, Z2) at each s in ascending s_list, one pass.
inline std::vector<SweepPoint> sweep(
    uint32_t n, const NoiseChannel &channel, const std::vector<uint64_t> &s_list,
    NoisePlacement placement = NoisePlacement::gate_sites) {
    detail::require(std::is_sorted(s_list.begin(), s_list.end()), "s_list must be ascending");
    int q = channel.q();
    std::array<Evolver, 3> chains{
        Evolver(n, q, 0.0, placement), Evolver(n, q, channel.sigma1(), placement),
        Evolver(n, q, channel.sigma2(), placement)};
    std::vector<SweepPoint> out;
    out.reserve(s_list.size());
    for (uint64_t s : s_list) {
        SweepPoint pt{s, {}, {}};
        for (size_t k = 0; k < 3; k++) {
            chains[k].advance_to(s);
            pt.log_excess[k] = chains[k].log_excess();
            pt.z.excess[k] = std::exp(pt.log_excess[k]);
        }
        out.push_back(pt);
    }
    return out;
}

/// (Z0, Z1, Z2) of the diagram-averaged complete-graph circuit with s gates.
inline ZTriple run_ztriple(uint32_t n, uint64_t s, const NoiseChannel &channel,
                           NoisePlacement placement = NoisePlacement::gate_sites) {
    return sweep(n, channel, {s}, placement).front().z;
}

}  // namespace cg_chain

}  // namespace wnrqc
