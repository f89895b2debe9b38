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

#include "wnrqc/reduction.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"

using namespace wnrqc;
using reduction::ReductionRunConfig;

namespace {

/// Exponentially distributed weights, normalized.
std::vector<double> porter_thomas(size_t dim, Rng &rng) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> p(dim);
    double total = 0;
    for (auto &x : p) {
        x = expo(rng);
        total += x;
    }
    for (auto &x : p) {
        x /= total;
    }
    return p;
}

}  // namespace

TEST(reduction, threshold_lemma_fuzz) {
    Rng rng = stream_rng(31, 0);
    for (int trial = 0; trial < 10000; trial++) {
        size_t dim = 2 + uniform_below(rng, 30);
        auto p1 = porter_thomas(dim, rng);
        auto p2 = trial % 3 == 0 ? porter_thomas(dim, rng) : p1;
        if (trial % 3 == 1) {
            for (auto &x : p2) {
                x *= 0.5 + uniform01(rng);
            }
        }
        double t = 3.0 * uniform01(rng) / dim;
        auto c = reduction::tvd_threshold_check(p1, p2, t);
        ASSERT_TRUE(c.holds()) << trial << " lhs=" << c.lhs << " rhs=" << c.rhs;
    }
}

TEST(reduction, threshold_lemma_edge_cases) {
    std::vector<double> p{0.5, 0.3, 0.2};
    auto same = reduction::tvd_threshold_check(p, p, 0.25);
    EXPECT_NEAR(same.lhs, 0.8, 1e-15);
    EXPECT_NEAR(same.rhs, 1.0, 1e-15);
    auto above_max = reduction::tvd_threshold_check(p, p, 0.6);
    EXPECT_EQ(above_max.lhs, 0.0);
    EXPECT_THROW(reduction::tvd_threshold_check(p, {0.5, 0.5}, 0.1), ParameterError);
}

TEST(reduction, output_law_is_truncated_ideal) {
    const uint32_t n = 4;
    Rng rng = stream_rng(2, 0);
    auto p = porter_thomas(16, rng);
    double k = 1.5;
    double threshold = 2 * k / 16;
    std::vector<double> law(16, 0.0);
    double mass = 0;
    for (size_t x = 0; x < 16; x++) {
        if (p[x] <= threshold) {
            law[x] = p[x];
            mass += p[x];
        }
    }
    auto oracle = reduction::exact_oracle(p);
    RejectionConfig cfg{k, 1.0, 100000};
    std::vector<double> counts(16, 0.0);
    const int samples = 200000;
    for (int t = 0; t < samples; t++) {
        auto o = reduction::rejection_sample(oracle, cfg, n, 2, rng);
        ASSERT_FALSE(o.capped);
        counts[o.x]++;
    }
    double chi2 = 0;
    int dof = -1;
    for (size_t x = 0; x < 16; x++) {
        double expected = samples * law[x] / mass;
        if (expected == 0) {
            EXPECT_EQ(counts[x], 0.0);
            continue;
        }
        chi2 += (counts[x] - expected) * (counts[x] - expected) / expected;
        dof++;
    }
    // 0.999 quantile of chi^2 with at most 15 degrees of freedom.
    EXPECT_LT(chi2, 37.7) << dof;
}

TEST(reduction, rounds_are_geometric) {
    const uint32_t n = 6;
    Rng rng = stream_rng(5, 0);
    auto p = porter_thomas(64, rng);
    ReductionRunConfig cfg;
    cfg.k = 5;
    cfg.samples = 200000;
    auto rep = reduction::run_reduction(p, n, 2, cfg);
    EXPECT_EQ(rep.capped, 0u);
    EXPECT_LT(std::abs(rep.mean_rounds - rep.expected_rounds), 3 * rep.mean_rounds_se);
    EXPECT_LE(rep.mean_rounds, 4 * cfg.k);
    EXPECT_LT(rep.tvd_to_ideal, rep.tvd_to_ideal_exact + 4 * rep.tvd_se);
}

TEST(reduction, exact_oracle_rounds_do_not_depend_on_fidelity) {
    Rng rng = stream_rng(6, 0);
    auto p = porter_thomas(64, rng);
    ReductionRunConfig cfg;
    cfg.samples = 1000;
    cfg.f = 1.0;
    auto full = reduction::run_reduction(p, 6, 2, cfg);
    cfg.f = 0.05;
    auto faint = reduction::run_reduction(p, 6, 2, cfg);
    EXPECT_NEAR(full.expected_rounds, faint.expected_rounds, 1e-9 * full.expected_rounds);
    EXPECT_NEAR(full.tvd_to_ideal_exact, faint.tvd_to_ideal_exact, 1e-12);
    EXPECT_NEAR(faint.oracle_cost / full.oracle_cost, 20 * faint.mean_rounds / full.mean_rounds, 1e-9);
}

TEST(reduction, larger_k_truncates_less) {
    Rng rng = stream_rng(7, 0);
    auto p = porter_thomas(256, rng);
    ReductionRunConfig cfg;
    cfg.samples = 2;
    double prev = 2.0;
    for (double k : {1.5, 2.0, 3.0, 5.0, 10.0, 50.0}) {
        cfg.k = k;
        auto rep = reduction::run_reduction(p, 8, 2, cfg);
        EXPECT_LE(rep.tvd_to_ideal_exact, prev + 1e-15) << k;
        prev = rep.tvd_to_ideal_exact;
    }
    EXPECT_EQ(prev, 0.0);
}

TEST(reduction, noisy_oracle_is_deterministic_and_bounded) {
    std::vector<double> p(64, 1.0 / 64);
    auto a = reduction::noisy_oracle(p, 0.1, 0.0, 11);
    auto b = reduction::noisy_oracle(p, 0.1, 0.0, 11);
    auto c = reduction::noisy_oracle(p, 0.1, 0.0, 12);
    bool differs = false;
    for (uint64_t x = 0; x < 64; x++) {
        EXPECT_EQ(a(x), a(x));
        EXPECT_EQ(a(x), b(x));
        EXPECT_LE(std::abs(a(x) / p[x] - 1), 0.2 + 1e-15);
        differs = differs || a(x) != c(x);
    }
    EXPECT_TRUE(differs);
    auto broken = reduction::noisy_oracle(p, 0.0, 0.25, 3);
    int off = 0;
    for (uint64_t x = 0; x < 64; x++) {
        off += broken(x) != p[x];
    }
    EXPECT_GT(off, 4);
    EXPECT_LT(off, 32);
}

TEST(reduction, cap_returns_flagged_uniform_fallback) {
    std::vector<double> p{1.0, 0.0, 0.0, 0.0};
    RejectionConfig cfg{1.5, 1.0, 10};
    Rng rng = stream_rng(1, 0);
    auto o = reduction::rejection_sample(reduction::exact_oracle(p), cfg, 2, 2, rng);
    EXPECT_TRUE(o.capped);
    EXPECT_EQ(o.rounds, 10u);
    EXPECT_LT(o.x, 4u);
    EXPECT_EQ(reduction::default_max_rounds(50, 6, 2),
              static_cast<uint64_t>(std::ceil(200 * std::pow(std::log(64.0), 2))));
}

TEST(reduction, parameter_checks) {
    std::vector<double> p(4, 0.25);
    Rng rng = stream_rng(1, 0);
    EXPECT_THROW(reduction::rejection_sample(reduction::exact_oracle(p), {1.0, 1.0, 0}, 2, 2, rng), ParameterError);
    EXPECT_THROW(reduction::rejection_sample(reduction::exact_oracle(p), {2.0, 0.0, 0}, 2, 2, rng), ParameterError);
    EXPECT_THROW(reduction::noisy_oracle(p, 0.6, 0.0, 1), ParameterError);
    EXPECT_THROW(reduction::run_reduction(p, 3, 2, {}), ParameterError);
}
