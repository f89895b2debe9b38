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

// Acceptance suite: one PASS/FAIL line per criterion, details indented below
// it. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wnrqc/qoracle.hpp"
#include "wnrqc/wnrqc.hpp"

using namespace wnrqc;
using qoracle::EnsembleOptions;
using reduction::ReductionReport;
using reduction::ReductionRunConfig;

namespace {

struct Report {
    bool ok = true;
    std::ostringstream detail;

    void check(bool cond, const std::string &what) {
        ok = ok && cond;
        detail << "    [" << (cond ? "ok" : "FAILED") << "] " << what << '\n';
    }
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

int failures = 0;

void criterion(const std::string &name, const std::function<void(Report &)> &body) {
    Report r;
    auto start = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception &e) {
        r.check(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%.1fs)\n%s", r.ok ? "PASS" : "FAIL", name.c_str(), secs, r.detail.str().c_str());
    std::fflush(stdout);
    failures += r.ok ? 0 : 1;
}

bool within_se(double est, double se, double exact, double k, Report &r, const std::string &label) {
    bool ok = std::abs(est - exact) <= k * se;
    r.check(ok, label + ": estimate " + fmt(est) + " vs exact " + fmt(exact) + " (" +
                    fmt(std::abs(est - exact) / se) + " SE)");
    return ok;
}

unsigned threads() {
    return std::max(default_threads(), std::thread::hardware_concurrency());
}

void oracle_equivalence(Report &r) {
    EnsembleOptions opt;
    opt.threads = threads();
    auto dep = make_depolarizing(2, 0.1);
    auto cg = qoracle::estimate_ztriple_quantum(ArchitectureSpec::complete_graph(4, 12), dep, 20000, 101, opt);
    auto cg_exact = cg_chain::run_ztriple(4, 12, dep);
    for (int k = 0; k < 3; k++) {
        within_se(cg.excess[k], cg.se[k], cg_exact.excess[k], 3, r,
                  "complete graph n=4 s=12 Z" + std::to_string(k) + "-1");
    }
    CircuitDiagram ring = gen_ring1d(6, 8);
    auto rq = qoracle::estimate_ztriple_quantum(ArchitectureSpec::fixed(ring), dep, 20000, 102, opt);
    auto r_exact = walk_exact::run_ztriple(ring, dep);
    for (int k = 0; k < 3; k++) {
        within_se(rq.excess[k], rq.se[k], r_exact.excess[k], 3, r, "ring n=6 d=8 Z" + std::to_string(k) + "-1");
    }
}

void engine_consistency(Report &r) {
    const uint32_t n = 6;
    const uint64_t s = 20;
    auto dep = make_depolarizing(2, 0.05);
    auto exact = cg_chain::run_ztriple(n, s, dep);
    std::array<MomentSums, 3> avg;
    Rng rng = stream_rng(201, 0);
    for (int t = 0; t < 100000; t++) {
        auto zt = walk_exact::run_ztriple(gen_complete_graph(n, s, rng), dep);
        for (int k = 0; k < 3; k++) {
            avg[k].add(zt.excess[k]);
        }
    }
    for (int k = 0; k < 3; k++) {
        within_se(avg[k].mean(), avg[k].standard_error(), exact.excess[k], 3, r,
                  "walk_exact over 1e5 diagrams vs cg_chain, Z" + std::to_string(k) + "-1");
    }
    WalkMcOptions opt;
    opt.threads = threads();
    auto mc = walk_mc::estimate_ztriple_complete_graph(n, s, dep, 1000000, 202, opt);
    for (int k = 0; k < 3; k++) {
        within_se(mc.excess[k], mc.se[k], exact.excess[k], 3, r, "walk_mc vs cg_chain, Z" + std::to_string(k) + "-1");
        double se = std::hypot(mc.se[k], avg[k].standard_error());
        within_se(mc.excess[k], se, avg[k].mean(), 3, r, "walk_mc vs walk_exact average, Z" + std::to_string(k) + "-1");
    }
    double worst = 0;
    for (double eps : {0.0, 0.02, 0.2}) {
        auto ch = make_depolarizing(2, eps);
        for (uint64_t m : {0u, 1u, 6u, 50u}) {
            CircuitDiagram d{2, std::vector<GatePair>(m, GatePair{0, 1}), ArchKind::complete_graph};
            auto a = cg_chain::run_ztriple(2, m, ch);
            auto b = walk_exact::run_ztriple(d, ch);
            for (int k = 0; k < 3; k++) {
                worst = std::max(worst, std::abs(a.excess[k] - b.excess[k]));
            }
        }
    }
    r.check(worst <= 1e-12, "cg_chain equals walk_exact at n=2, max difference " + fmt(worst));
}

void collision_limit(Report &r) {
    double cg = cg_chain::run_ztriple(4, 50, make_depolarizing(2, 0.0)).z0();
    r.check(std::abs(cg - 32.0 / 17.0) <= 1e-6, "cg_chain n=4 s=50 Z0 = " + fmt(cg) + " vs 32/17");
    double ring = walk_exact::run_z(gen_ring1d(8, 200), 2, 0.0);
    r.check(std::abs(ring - 512.0 / 257.0) <= 1e-6, "ring n=8 d=200 Z0 = " + fmt(ring) + " vs 512/257");
}

void fig2(Report &r) {
    const double eps = 0.0045;
    std::vector<uint64_t> s_list{430};
    for (uint64_t s = 5000; s <= 8000; s += 10) {
        s_list.push_back(s);
    }
    auto pts = cg_chain::sweep(53, make_depolarizing(2, eps), s_list);
    double lo = 1e9;
    double hi = -1e9;
    for (size_t k = 1; k < pts.size(); k++) {
        double q = metrics::bounds_from_ztriple(pts[k].z).ratio / metrics::reference_ratio(eps, pts[k].s);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    r.check(lo >= 0.85 && hi <= 1.15, "n=53 ratio/(2 eps sqrt(s)/3) over s in [5000, 8000] spans [" + fmt(lo) +
                                          ", " + fmt(hi) + "]");
    double at430 = metrics::bounds_from_ztriple(pts[0].z).ratio;
    r.check(at430 >= 0.5 && at430 <= 1.5, "n=53 s=430 ratio " + fmt(at430));
    auto b60 = metrics::bounds_from_ztriple(cg_chain::run_ztriple(60, 594, make_depolarizing(2, eps)));
    r.check(b60.ratio > 1.0 && !b60.valid, "n=60 s=594 ratio " + fmt(b60.ratio) + ", valid=" +
                                               (b60.valid ? "true" : "false"));
}

void fig3(Report &r) {
    std::vector<uint32_t> ns{53, 106, 159, 212};
    std::vector<double> expected{0.0057, 0.0028, 0.0019, 0.0014};
    std::vector<metrics::ThresholdResult> res(ns.size());
    parallel_for(ns.size(), threads(), [&](size_t k) { res[k] = metrics::threshold_scan_depolarizing(ns[k], 2); });
    for (size_t k = 0; k < ns.size(); k++) {
        bool found = res[k].status == metrics::ThresholdStatus::found;
        double rel = res[k].eps_star / expected[k] - 1;
        r.check(found && std::abs(rel) <= 0.15, "n=" + std::to_string(ns[k]) + " eps* = " + fmt(res[k].eps_star) +
                                                    " vs " + fmt(expected[k]) + " (" + fmt(100 * rel) + "%)");
        double prod = ns[k] * res[k].eps_star;
        r.check(prod >= 0.25 && prod <= 0.36, "n=" + std::to_string(ns[k]) + " n*eps* = " + fmt(prod));
    }
}

void fidelity_decay(Report &r) {
    std::vector<uint64_t> s_list;
    for (uint64_t s = 2000; s <= 8000; s += 100) {
        s_list.push_back(s);
    }
    auto dep = make_depolarizing(2, 0.001);
    auto fit = metrics::fidelity_decay_check(53, cg_chain::sweep(53, dep, s_list), dep);
    r.check(std::abs(fit.slope / -0.002 - 1) <= 0.05,
            "depolarizing eps=0.001 slope " + fmt(fit.slope) + " vs -2 eps = -0.002");
    auto rot = make_rotation(2, 0.3);
    auto rfit = metrics::fidelity_decay_check(5, cg_chain::sweep(5, rot, s_list), rot);
    r.check(std::abs(rfit.relative_deviation) <= 0.10,
            "rotation theta=0.3 n=5 slope " + fmt(rfit.slope) + " vs -2r(1+1/q) = " + fmt(rfit.target));
    EnsembleOptions opt;
    opt.threads = threads();
    std::vector<MomentSums> tvds;
    for (uint64_t s : {30u, 60u, 120u}) {
        auto e = qoracle::run_ensemble(ArchitectureSpec::complete_graph(5, s), rot, 2000, 300 + s, opt);
        tvds.push_back(e.tvd_uniform);
        r.detail << "    rotation n=5 s=" << s << " E TVD to uniform " << fmt(e.tvd_uniform.mean()) << " +- "
                 << fmt(e.tvd_uniform.standard_error()) << '\n';
    }
    for (size_t k = 1; k < tvds.size(); k++) {
        double se = std::hypot(tvds[k].standard_error(), tvds[k - 1].standard_error());
        r.check(tvds[k].mean() >= tvds[k - 1].mean() - 3 * se,
                "TVD to uniform does not decrease between consecutive s (within 3 SE)");
    }
}

void lemma_bounds(Report &r) {
    int violations_a = 0;
    int points_a = 0;
    for (uint32_t n : {4u, 10u, 30u, 53u, 100u}) {
        double qn = std::pow(2.0, n);
        for (double frac : {0.01, 0.05, 0.1, 0.2, 0.3}) {
            double sigma = frac / n;
            double f = (1 - std::pow(1 - sigma * 0.75, 2)) / (1 - 1 / (qn * qn));
            cg_chain::Evolver ev(n, 2, sigma);
            for (uint64_t s = 0; s <= 6000; s += 50) {
                ev.advance_to(s);
                double rhs = std::log((qn - 1) / (qn + 1)) + s * std::log1p(-f);
                violations_a += ev.log_excess() < rhs;
                points_a++;
            }
        }
    }
    r.check(violations_a == 0, "(a) cg_chain Z-1 lower bound: " + std::to_string(violations_a) + " violations in " +
                                   std::to_string(points_a) + " grid points");

    int violations_b = 0;
    int pairs_b = 0;
    for (uint32_t n : {4u, 6u, 8u, 10u}) {
        for (double sigma : {0.01, 0.05, 0.2}) {
            auto reports = coupled_walk::run_exact(gen_complete_graph(n, 3 * n, 400 + n), 2, sigma);
            for (size_t t = 0; t < reports.size(); t++) {
                for (size_t tp = t; tp < reports.size(); tp++) {
                    double bound = std::pow(1 - sigma, 2.0 * (tp - t)) * reports[t].m_ss;
                    violations_b += reports[tp].m_ss < bound * (1 - 1e-12);
                    pairs_b++;
                }
            }
        }
    }
    r.check(violations_b == 0, "(b) destined-mass decay: " + std::to_string(violations_b) + " violations in " +
                                   std::to_string(pairs_b) + " (t, t') pairs");

    int violations_c = 0;
    int cases_c = 0;
    for (uint32_t n : {4u, 6u, 8u}) {
        for (double sigma : {0.0, 0.02, 0.1}) {
            for (uint64_t seed : {1u, 2u, 3u}) {
                auto d = gen_complete_graph(n, 4 * n, seed);
                double m = coupled_walk::run_exact(d, 2, sigma).back().m_ss;
                double z = walk_exact::run_z_excess(d, 2, sigma);
                violations_c += z < (std::pow(2.0, n) - 1) * m * (1 - 1e-12);
                cases_c++;
            }
        }
    }
    r.check(violations_c == 0, "(c) Z-1 >= (q^n-1) m_SS: " + std::to_string(violations_c) + " violations in " +
                                   std::to_string(cases_c) + " diagrams");

    int violations_d = 0;
    int cases_d = 0;
    for (uint32_t n : {4u, 6u, 8u, 10u}) {
        double qn = std::pow(2.0, n);
        for (double sigma : {0.005, 0.02, 0.1}) {
            double f = (1 - std::pow(1 - sigma * 0.75, n)) / (1 - 1 / (qn * qn));
            const uint32_t depth = 8;
            auto reports = coupled_walk::run_exact(gen_ring1d(n, depth), 2, sigma);
            for (uint32_t d = 0; d <= depth; d++) {
                violations_d += reports[d * n / 2].m_ss < std::pow(1 - f, d) / (qn + 1) * (1 - 1e-12);
                cases_d++;
            }
        }
    }
    r.check(violations_d == 0, "(d) ring layer bound: " + std::to_string(violations_d) + " violations in " +
                                   std::to_string(cases_d) + " layers");
}

void toy_model(Report &r) {
    double worst = 0;
    int cases = 0;
    for (uint32_t n = 1; n <= 20; n++) {
        for (double eps : {0.0, 0.001, 0.01, 0.05, 0.1}) {
            auto ch = make_depolarizing(2, eps);
            for (uint64_t s : {0u, 1u, 5u, 20u, 50u, 100u}) {
                auto closed = metrics::toy_model_ztriple(n, ch, s);
                auto engine = metrics::toy_engine_ztriple(n, ch, s);
                for (int k = 0; k < 2; k++) {
                    worst = std::max(worst, std::abs(closed.excess[k] - engine.excess[k]));
                }
                cases++;
            }
        }
    }
    r.check(worst <= 1e-12, "Z0-1 and Z1-1 over " + std::to_string(cases) + " grid points, max difference " +
                                fmt(worst));
}

void white_noise_validity(Report &r) {
    auto dep = make_depolarizing(2, 0.08);
    auto zt = cg_chain::run_ztriple(5, 20, dep);
    auto b = metrics::bounds_from_ztriple(zt);
    EnsembleOptions opt;
    opt.threads = threads();
    auto est = qoracle::estimate_tvds_quantum(ArchitectureSpec::complete_graph(5, 20), dep, 5000, 501, b.fbar, opt);
    r.check(est.tvd_wn <= b.tvd_wn_bound + 3 * est.tvd_wn_se,
            "E TVD to white noise " + fmt(est.tvd_wn) + " +- " + fmt(est.tvd_wn_se) + " vs bound " +
                fmt(b.tvd_wn_bound));
    r.check(est.tvd_uniform <= b.tvd_uniform_bound + 3 * est.tvd_uniform_se,
            "E TVD to uniform " + fmt(est.tvd_uniform) + " +- " + fmt(est.tvd_uniform_se) + " vs bound " +
                fmt(b.tvd_uniform_bound));
}

void reduction_demo(Report &r) {
    const uint32_t n = 6;
    Rng rng = stream_rng(601, 0);
    auto inst = qoracle::simulate_instance(gen_complete_graph(n, 60, rng), 2,
                                           qoracle::kraus_for(make_noiseless(2)), rng);
    std::vector<ReductionReport> reps;
    for (double f : {1.0, 0.5, 0.25}) {
        ReductionRunConfig cfg;
        cfg.k = 50;
        cfg.f = f;
        cfg.samples = 200000;
        cfg.seed = 602;
        reps.push_back(reduction::run_reduction(inst.p_ideal, n, 2, cfg));
    }
    const auto &full = reps[0];
    r.check(full.tvd_to_ideal <= full.z_prime / full.k + 3 * full.tvd_se,
            "F=1 TVD to p_ideal " + fmt(full.tvd_to_ideal) + " vs z'/k + 3 SE = " +
                fmt(full.z_prime / full.k + 3 * full.tvd_se));
    r.check(full.mean_rounds <= 4 * full.k, "F=1 mean rounds " + fmt(full.mean_rounds) + " <= 4k = " +
                                                fmt(4 * full.k));
    for (size_t k = 1; k < reps.size(); k++) {
        double scale = reps[k].mean_rounds / full.mean_rounds;
        double want = 1.0 / reps[k].f;
        r.check(std::abs(scale / want - 1) <= 0.20,
                "mean rounds at F=" + fmt(reps[k].f) + " are " + fmt(scale) + "x those at F=1, 1/F = " + fmt(want));
    }
    for (const auto &rep : reps) {
        r.detail << "    F=" << fmt(rep.f) << " mean rounds " << fmt(rep.mean_rounds) << " (expected "
                 << fmt(rep.expected_rounds) << "), oracle cost " << fmt(rep.oracle_cost) << '\n';
    }
    int failed = 0;
    Rng fuzz = stream_rng(603, 0);
    std::exponential_distribution<double> expo(1.0);
    for (int t = 0; t < 10000; t++) {
        size_t dim = 2 + uniform_below(fuzz, 62);
        std::vector<double> p1(dim);
        std::vector<double> p2(dim);
        double s1 = 0;
        double s2 = 0;
        for (size_t x = 0; x < dim; x++) {
            p1[x] = expo(fuzz);
            p2[x] = bernoulli(fuzz, 0.5) ? p1[x] * (0.5 + uniform01(fuzz)) : expo(fuzz);
            s1 += p1[x];
            s2 += p2[x];
        }
        for (size_t x = 0; x < dim; x++) {
            p1[x] /= s1;
            p2[x] /= s2;
        }
        failed += !reduction::tvd_threshold_check(p1, p2, 4.0 * uniform01(fuzz) / dim).holds();
    }
    r.check(failed == 0, "threshold lemma: " + std::to_string(failed) + " failures in 10000 fuzz cases");
}

void xeb(Report &r) {
    auto dep = make_depolarizing(2, 0.1);
    auto exact = cg_chain::run_ztriple(4, 12, dep);
    double fbar = exact.excess[1] / exact.excess[0];
    EnsembleOptions opt;
    opt.threads = threads();
    auto x = qoracle::xeb_estimate(ArchitectureSpec::complete_graph(4, 12), dep, 20000, 10, 701, opt);
    double lo = x.ci_low / exact.excess[0];
    double hi = x.ci_high / exact.excess[0];
    r.check(lo <= fbar && fbar <= hi, "XEB/(Z0-1) 95% CI [" + fmt(lo) + ", " + fmt(hi) + "] vs F-bar " + fmt(fbar));
}

}  // namespace

int main() {
    criterion("oracle_equivalence", oracle_equivalence);
    criterion("engine_cross_consistency", engine_consistency);
    criterion("limiting_collision_probability", collision_limit);
    criterion("ratio_asymptote_n53", fig2);
    criterion("noise_thresholds", fig3);
    criterion("fidelity_decay", fidelity_decay);
    criterion("lemma_bounds_exact_engines", lemma_bounds);
    criterion("toy_model_closed_forms", toy_model);
    criterion("white_noise_bound_validity", white_noise_validity);
    criterion("reduction_demo", reduction_demo);
    criterion("xeb_consistency", xeb);
    std::printf("%d criteria failed\n", failures);
    return failures;
}
