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

#include "wnrqc/cg_chain.hpp"

#include <chrono>
#include <cmath>

#include "gtest/gtest.h"
#include "wnrqc/stats.hpp"
#include "wnrqc/walk_exact.hpp"

using namespace wnrqc;

TEST(cg_chain, step_matrix_is_stochastic_and_banded) {
    for (uint32_t n : {2u, 3u, 10u, 53u}) {
        for (double sigma : {0.0, 0.01, 0.5, 1.0}) {
            auto m = cg_chain::step_matrix(n, 2, sigma);
            auto dense = m.dense();
            for (uint32_t w = 0; w <= n; w++) {
                double row = 0;
                for (uint32_t v = 0; v <= n; v++) {
                    ASSERT_GE(dense[w][v], 0.0);
                    if (v + 2 < w || v > w + 2) {
                        ASSERT_EQ(dense[w][v], 0.0);
                    }
                    row += dense[w][v];
                }
                EXPECT_NEAR(row, 1.0, 1e-14);
            }
            EXPECT_EQ(dense[0][0], 1.0);
        }
    }
}

TEST(cg_chain, two_qudit_row_coefficients) {
    auto m = cg_chain::step_matrix(2, 2, 0.0);
    EXPECT_NEAR(m.at(1, 0), 0.8, 1e-15);
    EXPECT_NEAR(m.at(1, 2), 0.2, 1e-15);
    EXPECT_EQ(m.at(1, 1), 0.0);
    EXPECT_EQ(m.at(2, 2), 1.0);
}

TEST(cg_chain, s_zero_is_binomial_sum) {
    for (int q : {2, 3}) {
        for (uint32_t n : {2u, 5u, 30u}) {
            auto ch = make_depolarizing(q, 0.01);
            auto pts = cg_chain::sweep(n, ch, {0});
            double expected = std::pow(2.0 * q / (q + 1.0), n) - 1.0;
            for (int k = 0; k < 3; k++) {
                EXPECT_NEAR(pts[0].z.excess[k], expected, 1e-12 * expected);
            }
        }
    }
}

TEST(cg_chain, limiting_collision_probability) {
    auto zt = cg_chain::run_ztriple(4, 50, make_depolarizing(2, 0.0));
    EXPECT_NEAR(zt.z0(), 2.0 * 16 / 17, 1e-6);
}

TEST(cg_chain, equals_walk_exact_for_two_qudits) {
    for (double eps : {0.0, 0.01, 0.2}) {
        auto ch = make_depolarizing(2, eps);
        for (uint64_t s : {0u, 1u, 5u, 40u}) {
            CircuitDiagram d{2, std::vector<GatePair>(s, GatePair{0, 1}), ArchKind::complete_graph};
            auto a = cg_chain::run_ztriple(2, s, ch);
            auto b = walk_exact::run_ztriple(d, ch);
            for (int k = 0; k < 3; k++) {
                EXPECT_NEAR(a.excess[k], b.excess[k], 1e-12);
            }
        }
    }
}

TEST(cg_chain, equals_average_over_every_diagram) {
    // n=4, s=3: average walk_exact over all 6^3 equally likely pair sequences.
    const uint32_t n = 4;
    const uint64_t s = 3;
    auto ch = make_depolarizing(2, 0.1);
    std::vector<GatePair> pairs;
    for (uint32_t i = 0; i < n; i++) {
        for (uint32_t j = i + 1; j < n; j++) {
            pairs.push_back({i, j});
        }
    }
    std::array<double, 3> avg{0, 0, 0};
    size_t count = 0;
    for (const auto &a : pairs) {
        for (const auto &b : pairs) {
            for (const auto &c : pairs) {
                auto zt = walk_exact::run_ztriple({n, {a, b, c}, ArchKind::custom}, ch);
                for (int k = 0; k < 3; k++) {
                    avg[k] += zt.excess[k];
                }
                count++;
            }
        }
    }
    auto exact = cg_chain::run_ztriple(n, s, ch);
    for (int k = 0; k < 3; k++) {
        EXPECT_NEAR(avg[k] / count, exact.excess[k], 1e-13);
    }
}

TEST(cg_chain, matches_sampled_diagram_average) {
    const uint32_t n = 4;
    const uint64_t s = 12;
    auto ch = make_depolarizing(2, 0.1);
    std::array<MomentSums, 3> m;
    Rng rng = stream_rng(99, 0);
    for (int t = 0; t < 100000; t++) {
        auto zt = walk_exact::run_ztriple(gen_complete_graph(n, s, rng), ch);
        for (int k = 0; k < 3; k++) {
            m[k].add(zt.excess[k]);
        }
    }
    auto exact = cg_chain::run_ztriple(n, s, ch);
    for (int k = 0; k < 3; k++) {
        EXPECT_LT(std::abs(m[k].mean() - exact.excess[k]), 3 * m[k].standard_error()) << k;
    }
}

TEST(cg_chain, sweep_equals_pointwise_runs) {
    auto ch = make_depolarizing(2, 0.0045);
    std::vector<uint64_t> s_list{0, 1, 7, 100, 430, 1000};
    auto pts = cg_chain::sweep(20, ch, s_list);
    for (size_t k = 0; k < s_list.size(); k++) {
        auto single = cg_chain::run_ztriple(20, s_list[k], ch);
        EXPECT_EQ(pts[k].s, s_list[k]);
        for (int c = 0; c < 3; c++) {
            EXPECT_NEAR(pts[k].z.excess[c], single.excess[c], 1e-12 * single.excess[c]);
        }
    }
    EXPECT_THROW(cg_chain::sweep(20, ch, {5, 3}), ParameterError);
}

TEST(cg_chain, z_ordering_for_depolarizing) {
    for (uint32_t n : {3u, 8u, 20u}) {
        for (double eps : {0.001, 0.01, 0.1, 0.3}) {
            auto ch = make_depolarizing(2, eps);
            for (const auto &pt : cg_chain::sweep(n, ch, {1, 10, 50, 200})) {
                EXPECT_LE(pt.z.excess[2], pt.z.excess[1] * (1 + 1e-12));
                EXPECT_LE(pt.z.excess[1], pt.z.excess[0] * (1 + 1e-12));
            }
        }
    }
}

TEST(cg_chain, lower_bound_with_f_prime) {
    for (int q : {2, 3}) {
        for (uint32_t n : {4u, 10u, 30u, 53u}) {
            double qn = std::pow(static_cast<double>(q), n);
            for (double frac : {0.01, 0.1, 0.3}) {
                double sigma = frac / n;
                double f = (1 - std::pow(1 - sigma * (1 - 1.0 / (q * q)), 2)) / (1 - 1 / (qn * qn));
                cg_chain::Evolver ev(n, q, sigma);
                for (uint64_t s : {0u, 10u, 100u, 1000u, 5000u}) {
                    ev.advance_to(s);
                    double lhs = ev.log_excess();
                    double rhs = std::log((qn - 1) / (qn + 1)) + s * std::log1p(-f);
                    EXPECT_GE(lhs, rhs) << "q=" << q << " n=" << n << " sigma=" << sigma << " s=" << s;
                }
            }
        }
    }
}

TEST(cg_chain, large_s_stays_finite_in_log_form) {
    auto ch = make_depolarizing(2, 0.0045);
    auto pts = cg_chain::sweep(53, ch, {8000, 200000});
    for (const auto &pt : pts) {
        for (double le : pt.log_excess) {
            EXPECT_TRUE(std::isfinite(le));
        }
    }
    // F-bar decays like exp(-2 eps s): ~-1800 at s=2e5, far below double range.
    EXPECT_LT(pts[1].log_excess[1], -1000);
}

TEST(cg_chain, large_n_initial_excess_in_log_space) {
    auto pts = cg_chain::sweep(3000, make_depolarizing(2, 0.0), {0});
    double expected = 3000 * std::log(4.0 / 3.0);
    EXPECT_NEAR(pts[0].log_excess[0], expected, 1e-9 * expected);
}

TEST(cg_chain, all_sites_option) {
    auto ch = make_depolarizing(2, 0.01);
    auto gate = cg_chain::run_ztriple(6, 40, ch);
    auto all = cg_chain::run_ztriple(6, 40, ch, NoisePlacement::all_sites);
    EXPECT_LT(all.excess[1], gate.excess[1]);
    auto noiseless = make_depolarizing(2, 0.0);
    auto a = cg_chain::run_ztriple(6, 40, noiseless);
    auto b = cg_chain::run_ztriple(6, 40, noiseless, NoisePlacement::all_sites);
    EXPECT_NEAR(a.excess[0], b.excess[0], 1e-14);
}

TEST(cg_chain, fig2_scale_runs_fast) {
    auto start = std::chrono::steady_clock::now();
    std::vector<uint64_t> s_list;
    for (uint64_t s = 0; s <= 8000; s += 10) {
        s_list.push_back(s);
    }
    auto pts = cg_chain::sweep(53, make_depolarizing(2, 0.0045), s_list);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_EQ(pts.size(), s_list.size());
    EXPECT_LT(secs, 5.0);
}
