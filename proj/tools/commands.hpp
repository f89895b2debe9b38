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
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"
#include "wnrqc/qoracle.hpp"
#include "wnrqc/wnrqc.hpp"

namespace wnrqc::cli {

using qoracle::Ensemble;
using qoracle::EnsembleOptions;
using qoracle::XebEstimate;
using reduction::ReductionReport;
using reduction::ReductionRunConfig;

using json = nlohmann::ordered_json;

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInconclusive = 3;

namespace detail {

inline json channel_json(const NoiseChannel &ch) {
    return {{"kind", std::string(to_string(ch.kind()))}, {"q", ch.q()},         {"param", ch.param()},
            {"r", ch.r()},                               {"u", ch.u()},         {"sigma1", ch.sigma1()},
            {"sigma2", ch.sigma2()}};
}

/// Depolarizing eps with the same infidelity, used for the 2 eps sqrt(s)/3
/// reference column.
inline double equivalent_eps(const NoiseChannel &ch) {
    return ch.r() * (ch.q() + 1.0) / ch.q();
}

/// Bounds for one sweep point; falls back to the log form where the
/// excesses have left double range.
inline BoundReport bounds_for_point(const cg_chain::SweepPoint &pt) {
    const double tiny = 1e-250;
    if (pt.z.excess[0] > tiny && pt.z.excess[1] > tiny && pt.z.excess[2] > tiny) {
        return metrics::bounds_from_ztriple(pt.z);
    }
    BoundReport b;
    const auto &le = pt.log_excess;
    b.fbar = std::exp(le[1] - le[0]);
    b.f = b.fbar;
    b.tvd_uniform_bound = 0.5 * std::exp(0.5 * le[2]);
    double lr = metrics::log_ratio_from_log_excess(le);
    if (std::isfinite(lr)) {
        b.ratio = std::exp(lr);
        b.tvd_wn_bound = b.ratio * b.fbar;
        b.radicand = 4.0 * b.tvd_wn_bound * b.tvd_wn_bound;
        b.valid = b.ratio < 1.0;
    } else {
        b.radicand_ok = false;
        b.valid = false;
        b.ratio = std::nan("");
        b.tvd_wn_bound = std::nan("");
    }
    return b;
}

inline json bounds_json(uint64_t s, const ZTriple &zt, const BoundReport &b, double reference) {
    return {{"s", s},
            {"z0_minus_1", zt.excess[0]},
            {"z1_minus_1", zt.excess[1]},
            {"z2_minus_1", zt.excess[2]},
            {"provenance", std::string(to_string(zt.provenance))},
            {"fbar", b.fbar},
            {"tvd_uniform_bound", b.tvd_uniform_bound},
            {"tvd_wn_bound", b.tvd_wn_bound},
            {"ratio", b.ratio},
            {"reference", reference},
            {"valid", b.valid},
            {"radicand_ok", b.radicand_ok}};
}

inline NoisePlacement placement_of(const RunConfig &cfg) {
    return cfg.placement == "all_sites" ? NoisePlacement::all_sites : NoisePlacement::gate_sites;
}

/// Fixed diagram for commands that need one; complete-graph draws use
/// stream 0 of the seed.
inline CircuitDiagram diagram_of(const RunConfig &cfg) {
    Rng rng = stream_rng(cfg.seed, 0);
    return make_arch(cfg).draw(rng);
}

inline void write_json(std::ostream &out, const json &j) {
    out << j.dump(2) << '\n';
}

}  // namespace detail

/// (s, Z0, Z1, Z2, fbar, ratio, reference) along an s list on the
/// complete-graph chain.
inline int cmd_cg_sweep(const RunConfig &cfg, std::ostream &out) {
    NoiseChannel ch = make_channel(cfg);
    std::vector<uint64_t> s_list = sweep_points(cfg);
    auto points = cg_chain::sweep(cfg.n, ch, s_list, detail::placement_of(cfg));
    double eps_ref = detail::equivalent_eps(ch);
    if (cfg.format == "json") {
        json rows = json::array();
        for (const auto &pt : points) {
            rows.push_back(detail::bounds_json(pt.s, pt.z, detail::bounds_for_point(pt),
                                               metrics::reference_ratio(eps_ref, pt.s)));
        }
        detail::write_json(out, {{"schema", "wnrqc.bounds/1"},
                                 {"n", cfg.n},
                                 {"channel", detail::channel_json(ch)},
                                 {"placement", cfg.placement},
                                 {"rows", rows}});
        return kExitOk;
    }
    metrics::write_bounds_csv_header(out);
    for (const auto &pt : points) {
        metrics::write_bounds_csv_row(out, pt.s, pt.z, detail::bounds_for_point(pt),
                                      metrics::reference_ratio(eps_ref, pt.s));
    }
    return kExitOk;
}

inline int write_single_bounds(const RunConfig &cfg, std::ostream &out, uint64_t gates, const ZTriple &zt,
                               const NoiseChannel &ch) {
    BoundReport b;
    bool degenerate = false;
    try {
        b = metrics::bounds_from_ztriple(zt);
    } catch (const DegenerateInput &) {
        degenerate = true;
        b.fbar = b.ratio = b.tvd_wn_bound = std::nan("");
        b.tvd_uniform_bound = metrics::tvd_uniform_bound(zt);
        b.valid = false;
    }
    double ref = metrics::reference_ratio(detail::equivalent_eps(ch), static_cast<double>(gates));
    if (cfg.format == "json") {
        json j = detail::bounds_json(gates, zt, b, ref);
        j["se"] = zt.se;
        j["degenerate"] = degenerate;
        detail::write_json(out, {{"schema", "wnrqc.bounds/1"},
                                 {"n", cfg.n},
                                 {"arch", cfg.arch},
                                 {"channel", detail::channel_json(ch)},
                                 {"rows", json::array({j})}});
        return kExitOk;
    }
    metrics::write_bounds_csv_header(out);
    metrics::write_bounds_csv_row(out, gates, zt, b, ref);
    return kExitOk;
}

/// Exact Z triple through one diagram.
inline int cmd_walk_exact(const RunConfig &cfg, std::ostream &out) {
    NoiseChannel ch = make_channel(cfg);
    CircuitDiagram d = detail::diagram_of(cfg);
    return write_single_bounds(cfg, out, d.gates.size(), walk_exact::run_ztriple(d, ch), ch);
}

/// Trajectory estimates of Z0, Z1, Z2. Complete-graph runs average over
/// diagrams; other architectures use their fixed diagram.
inline int cmd_walk_mc(const RunConfig &cfg, std::ostream &out) {
    NoiseChannel ch = make_channel(cfg);
    WalkMcOptions opt;
    opt.threads = cfg.threads;
    std::array<double, 3> sigmas{0.0, ch.sigma1(), ch.sigma2()};
    std::array<TrajectoryStats, 3> stats;
    bool complete = parse_arch_kind(cfg.arch) == ArchKind::complete_graph;
    CircuitDiagram d;
    if (!complete) {
        d = detail::diagram_of(cfg);
    }
    for (int k = 0; k < 3; k++) {
        uint64_t seed = cfg.seed * 3 + k;
        stats[k] = complete ? walk_mc::estimate_z_complete_graph(cfg.n, cfg.s, cfg.q, sigmas[k], cfg.samples, seed, opt)
                            : walk_mc::estimate_z(d, cfg.q, sigmas[k], cfg.samples, seed, opt);
    }
    if (cfg.format == "json") {
        json rows = json::array();
        for (int k = 0; k < 3; k++) {
            rows.push_back({{"copy", k},
                            {"sigma", sigmas[k]},
                            {"mean", stats[k].mean},
                            {"se", stats[k].se},
                            {"samples", stats[k].samples},
                            {"all_s_count", stats[k].all_s_count},
                            {"warning", stats[k].warning},
                            {"note", stats[k].note}});
        }
        detail::write_json(out, {{"schema", "wnrqc.walk_mc/1"},
                                 {"n", cfg.n},
                                 {"arch", cfg.arch},
                                 {"channel", detail::channel_json(ch)},
                                 {"rows", rows}});
        return kExitOk;
    }
    write_schema_line(out, "wnrqc.walk_mc", 1);
    out << "copy,sigma,mean,se,samples,all_s_count,warning\n";
    for (int k = 0; k < 3; k++) {
        out << k << ',' << format_double(sigmas[k]) << ',' << format_double(stats[k].mean) << ','
            << format_double(stats[k].se) << ',' << stats[k].samples << ',' << stats[k].all_s_count << ','
            << (stats[k].warning ? 1 : 0) << '\n';
    }
    return kExitOk;
}

/// Destined mass m_SS(t) and its agreement profile with flip rate sigma1.
/// Exact unless `samples` is given.
inline int cmd_coupled(const RunConfig &cfg, std::ostream &out) {
    NoiseChannel ch = make_channel(cfg);
    double sigma = ch.sigma1();
    bool complete = parse_arch_kind(cfg.arch) == ArchKind::complete_graph;
    if (cfg.has("samples")) {
        auto est = complete
                       ? coupled_walk::mc_coupled_complete_graph(cfg.n, cfg.s, cfg.q, sigma, cfg.samples, cfg.seed,
                                                                 cfg.threads)
                       : coupled_walk::mc_coupled(detail::diagram_of(cfg), cfg.q, sigma, cfg.samples, cfg.seed,
                                                  cfg.threads);
        if (cfg.format == "json") {
            json rows = json::array();
            for (const auto &e : est) {
                rows.push_back({{"t", e.t}, {"m_ss", e.m_ss}, {"m_ss_se", e.m_ss_se}, {"w_profile", e.w_profile}});
            }
            detail::write_json(out, {{"schema", "wnrqc.coupled_mc/1"}, {"n", cfg.n}, {"sigma", sigma}, {"rows", rows}});
            return kExitOk;
        }
        write_schema_line(out, "wnrqc.coupled_mc", 1);
        out << "t,m_ss,m_ss_se\n";
        for (const auto &e : est) {
            out << e.t << ',' << format_double(e.m_ss) << ',' << format_double(e.m_ss_se) << '\n';
        }
        return kExitOk;
    }
    auto reports = complete ? coupled_walk::run_exact_complete_graph(cfg.n, cfg.s, cfg.q, sigma)
                            : coupled_walk::run_exact(detail::diagram_of(cfg), cfg.q, sigma);
    if (cfg.format == "json") {
        json rows = json::array();
        for (const auto &r : reports) {
            rows.push_back({{"t", r.t}, {"m_ss", r.m_ss}, {"w_profile", r.w_profile}});
        }
        detail::write_json(out, {{"schema", "wnrqc.coupled/1"}, {"n", cfg.n}, {"sigma", sigma}, {"rows", rows}});
        return kExitOk;
    }
    coupled_walk::write_csv(out, reports);
    return kExitOk;
}

/// eps* per n by bisection on the growth of ratio(s).
inline int cmd_threshold(const RunConfig &cfg, std::ostream &out) {
    ChannelKind kind = parse_channel_kind(cfg.channel);
    if (kind != ChannelKind::depolarizing && kind != ChannelKind::dephasing) {
        throw ConfigError("threshold scans need an eps-parameterized channel (depolarizing or dephasing)");
    }
    int q = cfg.q;
    metrics::ChannelFamily family = [kind, q](double eps) {
        return kind == ChannelKind::depolarizing ? make_depolarizing(q, eps) : make_dephasing(q, eps);
    };
    metrics::ThresholdConfig tc;
    tc.s_min = cfg.s_min;
    tc.s_max = cfg.s_max;
    tc.placement = detail::placement_of(cfg);
    std::vector<uint32_t> ns = cfg.n_list.empty() ? std::vector<uint32_t>{cfg.n} : cfg.n_list;
    std::vector<metrics::ThresholdResult> results(ns.size());
    parallel_for(ns.size(), cfg.threads, [&](size_t k) { results[k] = metrics::threshold_scan(ns[k], family, tc); });
    bool inconclusive = false;
    for (const auto &r : results) {
        inconclusive = inconclusive || r.status != metrics::ThresholdStatus::found;
    }
    if (cfg.format == "json") {
        json rows = json::array();
        for (const auto &r : results) {
            json trace = json::array();
            for (const auto &p : r.trace) {
                trace.push_back({{"eps", p.eps},
                                 {"slope", p.slope},
                                 {"dead_band", p.dead_band},
                                 {"growing", p.growing},
                                 {"defined", p.defined}});
            }
            rows.push_back({{"n", r.n},
                            {"status", std::string(metrics::to_string(r.status))},
                            {"eps_star", r.eps_star},
                            {"n_eps_star", r.n * r.eps_star},
                            {"bracket_lo", r.bracket_lo},
                            {"bracket_hi", r.bracket_hi},
                            {"s_min", r.s_min},
                            {"s_max", r.s_max},
                            {"message", r.message},
                            {"trace", trace}});
        }
        detail::write_json(out, {{"schema", "wnrqc.threshold/1"}, {"channel", cfg.channel}, {"q", q}, {"rows", rows}});
    } else {
        write_schema_line(out, "wnrqc.threshold", 1);
        out << "n,status,eps_star,n_eps_star,bracket_lo,bracket_hi,s_min,s_max,message\n";
        for (const auto &r : results) {
            out << r.n << ',' << metrics::to_string(r.status) << ',' << format_double(r.eps_star) << ','
                << format_double(r.n * r.eps_star) << ',' << format_double(r.bracket_lo) << ','
                << format_double(r.bracket_hi) << ',' << r.s_min << ',' << r.s_max << ",\"" << r.message << "\"\n";
        }
    }
    return inconclusive ? kExitInconclusive : kExitOk;
}

/// Density-matrix ensemble: per-instance Z terms and TVDs.
inline int cmd_qoracle(const RunConfig &cfg, std::ostream &out) {
    NoiseChannel ch = make_channel(cfg);
    EnsembleOptions opt;
    opt.threads = cfg.threads;
    opt.keep_distributions = true;
    Ensemble e = qoracle::run_ensemble(make_arch(cfg), ch, cfg.instances, cfg.seed, opt);
    if (cfg.format == "json") {
        double f = e.z.excess[1] / e.z.excess[0];
        MomentSums wn;
        for (const auto &r : e.instances) {
            wn.add(qoracle::tvd_to_white_noise(r.p_noisy, r.p_ideal, f));
        }
        detail::write_json(out, {{"schema", "wnrqc.qoracle/1"},
                                 {"n", e.n},
                                 {"arch", cfg.arch},
                                 {"channel", detail::channel_json(ch)},
                                 {"instances", cfg.instances},
                                 {"z_minus_1", e.z.excess},
                                 {"se", e.z.se},
                                 {"fbar", f},
                                 {"tvd_uniform", e.tvd_uniform.mean()},
                                 {"tvd_uniform_se", e.tvd_uniform.standard_error()},
                                 {"tvd_wn", wn.mean()},
                                 {"tvd_wn_se", wn.standard_error()}});
        return kExitOk;
    }
    qoracle::write_ensemble_csv(out, e);
    return kExitOk;
}

/// Exact Z excesses of the walk for the configured architecture, used as the
/// XEB prediction.
inline ZTriple walk_prediction(const RunConfig &cfg, const NoiseChannel &ch) {
    if (parse_arch_kind(cfg.arch) == ArchKind::complete_graph) {
        return cg_chain::run_ztriple(cfg.n, cfg.s, ch, detail::placement_of(cfg));
    }
    return walk_exact::run_ztriple(detail::diagram_of(cfg), ch);
}

/// Linear XEB from sampled outcomes, compared with the walk's F-bar.
inline int cmd_xeb(const RunConfig &cfg, std::ostream &out) {
    NoiseChannel ch = make_channel(cfg);
    EnsembleOptions opt;
    opt.threads = cfg.threads;
    XebEstimate x = qoracle::xeb_estimate(make_arch(cfg), ch, cfg.instances, cfg.shots, cfg.seed, opt);
    ZTriple pred = walk_prediction(cfg, ch);
    double fbar = pred.excess[1] / pred.excess[0];
    double norm = pred.excess[0];
    if (cfg.format == "json") {
        detail::write_json(out, {{"schema", "wnrqc.xeb/1"},
                                 {"n", cfg.n},
                                 {"arch", cfg.arch},
                                 {"channel", detail::channel_json(ch)},
                                 {"instances", x.instances},
                                 {"shots", x.shots},
                                 {"xeb", x.value},
                                 {"se", x.se},
                                 {"ci_low", x.ci_low},
                                 {"ci_high", x.ci_high},
                                 {"z0_minus_1", pred.excess[0]},
                                 {"z1_minus_1", pred.excess[1]},
                                 {"fbar", fbar},
                                 {"xeb_over_z0_minus_1", x.value / norm}});
        return kExitOk;
    }
    write_schema_line(out, "wnrqc.xeb", 1);
    out << "n,instances,shots,xeb,se,ci_low,ci_high,z0_minus_1,z1_minus_1,fbar,xeb_over_z0_minus_1\n";
    out << cfg.n << ',' << x.instances << ',' << x.shots << ',' << format_double(x.value) << ','
        << format_double(x.se) << ',' << format_double(x.ci_low) << ',' << format_double(x.ci_high) << ','
        << format_double(pred.excess[0]) << ',' << format_double(pred.excess[1]) << ',' << format_double(fbar)
        << ',' << format_double(x.value / norm) << '\n';
    return kExitOk;
}

/// p_ideal of one noiseless circuit instance drawn from the configured
/// architecture.
inline std::vector<double> ideal_distribution(const RunConfig &cfg) {
    Rng rng = stream_rng(cfg.seed, 0);
    CircuitDiagram d = make_arch(cfg).draw(rng);
    return qoracle::simulate_instance(d, cfg.q, qoracle::kraus_for(make_noiseless(cfg.q)), rng).p_ideal;
}

/// Rejection-sampling reduction over an F grid.
inline int cmd_reduction_demo(const RunConfig &cfg, std::ostream &out) {
    std::vector<double> p_ideal = ideal_distribution(cfg);
    std::vector<double> fs = cfg.f_list.empty() ? std::vector<double>{1.0, 0.5, 0.25} : cfg.f_list;
    std::vector<ReductionReport> reports;
    for (double f : fs) {
        ReductionRunConfig rc;
        rc.k = cfg.k;
        rc.f = f;
        rc.nu = cfg.nu;
        rc.mu = cfg.mu;
        rc.samples = cfg.samples;
        rc.seed = cfg.seed;
        reports.push_back(reduction::run_reduction(p_ideal, cfg.n, cfg.q, rc));
    }
    if (cfg.format == "json") {
        json rows = json::array();
        for (const auto &r : reports) {
            rows.push_back({{"n", r.n},
                            {"q", r.q},
                            {"F", r.f},
                            {"k", r.k},
                            {"nu", r.nu},
                            {"accept_rate", r.accept_rate},
                            {"mean_rounds", r.mean_rounds},
                            {"mean_rounds_se", r.mean_rounds_se},
                            {"expected_rounds", r.expected_rounds},
                            {"capped", r.capped},
                            {"tvd_to_ideal", r.tvd_to_ideal},
                            {"tvd_se", r.tvd_se},
                            {"oracle_cost", r.oracle_cost},
                            {"bound_terms",
                             {{"z_prime", r.z_prime},
                              {"z_prime_over_k", r.z_prime / r.k},
                              {"tvd_to_ideal_exact", r.tvd_to_ideal_exact},
                              {"accepted_mass", r.accepted_mass}}}});
        }
        detail::write_json(out, {{"schema", "wnrqc.reduction/1"}, {"rows", rows}});
        return kExitOk;
    }
    write_schema_line(out, "wnrqc.reduction", 1);
    out << "f,k,nu,samples,accept_rate,mean_rounds,mean_rounds_se,expected_rounds,capped,tvd_to_ideal,tvd_se,"
           "tvd_to_ideal_exact,z_prime,z_prime_over_k,oracle_cost\n";
    for (const auto &r : reports) {
        out << format_double(r.f) << ',' << format_double(r.k) << ',' << format_double(r.nu) << ',' << r.samples
            << ',' << format_double(r.accept_rate) << ',' << format_double(r.mean_rounds) << ','
            << format_double(r.mean_rounds_se) << ',' << format_double(r.expected_rounds) << ',' << r.capped << ','
            << format_double(r.tvd_to_ideal) << ',' << format_double(r.tvd_se) << ','
            << format_double(r.tvd_to_ideal_exact) << ',' << format_double(r.z_prime) << ','
            << format_double(r.z_prime / r.k) << ',' << format_double(r.oracle_cost) << '\n';
    }
    return kExitOk;
}

struct ValidationCheck {
    std::string name;
    double value = 0;
    double reference = 0;
    double tolerance = 0;
    bool pass = false;
};

/// Cross-checks between the engines at desk scale. With corrupt_sigma the
/// walk side uses a flip rate 1.5x too large, which the quantum F-bar check
/// must catch.
inline std::vector<ValidationCheck> validation_checks(const RunConfig &cfg) {
    std::vector<ValidationCheck> checks;
    auto add = [&](std::string name, double value, double reference, double tol) {
        checks.push_back({std::move(name), value, reference, tol, std::abs(value - reference) <= tol});
    };
    const int q = 2;
    NoiseChannel dep = make_depolarizing(q, 0.05);
    NoiseChannel walk_side = dep;
    if (cfg.corrupt_sigma) {
        walk_side = make_custom(q, dep.sigma1() * 1.5 * (q - 1.0) / q, 1.0 - dep.sigma2());
    }

    {
        CircuitDiagram d{2, std::vector<GatePair>(7, GatePair{0, 1}), ArchKind::complete_graph};
        auto a = cg_chain::run_ztriple(2, 7, dep);
        auto b = walk_exact::run_ztriple(d, dep);
        add("cg_chain_vs_walk_exact_n2", a.excess[1], b.excess[1], 1e-12);
    }
    {
        const uint32_t n = 4;
        std::vector<GatePair> pairs;
        for (uint32_t i = 0; i < n; i++) {
            for (uint32_t j = i + 1; j < n; j++) {
                pairs.push_back({i, j});
            }
        }
        double avg = 0;
        for (const auto &a : pairs) {
            for (const auto &b : pairs) {
                avg += walk_exact::run_ztriple({n, {a, b}, ArchKind::custom}, dep).excess[1];
            }
        }
        avg /= static_cast<double>(pairs.size() * pairs.size());
        add("cg_chain_vs_diagram_average_n4_s2", cg_chain::run_ztriple(n, 2, dep).excess[1], avg, 1e-13);
    }
    CircuitDiagram ring = gen_ring1d(4, 6);
    ZTriple exact = walk_exact::run_ztriple(ring, walk_side);
    {
        WalkMcOptions opt;
        opt.threads = cfg.threads;
        auto st = walk_mc::estimate_z(ring, q, walk_side.sigma1(), 200000, cfg.seed, opt);
        add("walk_mc_vs_walk_exact_ring4", st.mean - 1.0, exact.excess[1], 4 * st.se);
    }
    {
        EnsembleOptions opt;
        opt.threads = cfg.threads;
        auto zt = qoracle::estimate_ztriple_quantum(ArchitectureSpec::fixed(ring), dep, 4000, cfg.seed, opt);
        add("qoracle_vs_walk_exact_z0_ring4", zt.excess[0], exact.excess[0], 4 * zt.se[0]);
        add("qoracle_vs_walk_exact_z1_ring4", zt.excess[1], exact.excess[1], 4 * zt.se[1]);
        double fq = zt.excess[1] / zt.excess[0];
        double fw = exact.excess[1] / exact.excess[0];
        // First-order error of a ratio of two estimates.
        double se = fq * std::hypot(zt.se[0] / zt.excess[0], zt.se[1] / zt.excess[1]);
        add("qoracle_vs_walk_fbar_ring4", fq, fw, 4 * se);
    }
    {
        CircuitDiagram d = gen_complete_graph(5, 25, cfg.seed);
        double sigma = walk_side.sigma1();
        auto v = coupled_walk::initial_vector(5, q);
        auto y = walk_exact::initial_vector(5, q);
        for (const auto &g : d.gates) {
            v = coupled_walk::coupled_step(v, g, q, sigma);
            walk_exact::step_in_place(y, g, q, sigma);
        }
        auto marg = coupled_walk::y_marginal(v);
        double worst = 0;
        for (size_t k = 0; k < y.probs.size(); k++) {
            worst = std::max(worst, std::abs(marg.probs[k] - y.probs[k]));
        }
        add("coupled_marginal_vs_walk_exact_n5", worst, 0.0, 1e-12);
        auto reports = coupled_walk::run_exact(d, q, sigma);
        double z = walk_exact::run_z_excess(d, q, sigma);
        double floor = (std::pow(2.0, 5) - 1) * reports.back().m_ss;
        add("destined_mass_lower_bound_n5", std::min(0.0, z - floor), 0.0, 1e-12);
    }
    {
        double worst = 0;
        for (uint32_t n : {3u, 8u, 16u}) {
            auto closed = metrics::toy_model_ztriple(n, dep, 40);
            auto engine = metrics::toy_engine_ztriple(n, dep, 40);
            for (int k = 0; k < 3; k++) {
                worst = std::max(worst, std::abs(closed.excess[k] - engine.excess[k]));
            }
        }
        add("toy_engine_vs_closed_form", worst, 0.0, 1e-12);
    }
    return checks;
}

inline int cmd_validate(const RunConfig &cfg, std::ostream &out) {
    auto checks = validation_checks(cfg);
    bool ok = true;
    for (const auto &c : checks) {
        ok = ok && c.pass;
    }
    if (cfg.format == "json") {
        json rows = json::array();
        for (const auto &c : checks) {
            rows.push_back({{"check", c.name},
                            {"value", c.value},
                            {"reference", c.reference},
                            {"tolerance", c.tolerance},
                            {"pass", c.pass}});
        }
        detail::write_json(out, {{"schema", "wnrqc.validate/1"}, {"all_pass", ok}, {"rows", rows}});
    } else {
        write_schema_line(out, "wnrqc.validate", 1);
        out << "check,value,reference,tolerance,pass\n";
        for (const auto &c : checks) {
            out << c.name << ',' << format_double(c.value) << ',' << format_double(c.reference) << ','
                << format_double(c.tolerance) << ',' << (c.pass ? 1 : 0) << '\n';
        }
    }
    return ok ? kExitOk : kExitCheckFailed;
}

inline const std::vector<std::string> &command_names() {
    static const std::vector<std::string> names{"cg-sweep", "walk-exact", "walk-mc",        "coupled", "threshold",
                                                "qoracle",  "xeb",        "reduction-demo", "validate"};
    return names;
}

/// Validates the config and runs the named subcommand.
inline int run_command(const RunConfig &cfg, std::ostream &out) {
    validate(cfg);
    const std::string &c = cfg.command;
    if (c == "cg-sweep") return cmd_cg_sweep(cfg, out);
    if (c == "walk-exact") return cmd_walk_exact(cfg, out);
    if (c == "walk-mc") return cmd_walk_mc(cfg, out);
    if (c == "coupled") return cmd_coupled(cfg, out);
    if (c == "threshold") return cmd_threshold(cfg, out);
    if (c == "qoracle") return cmd_qoracle(cfg, out);
    if (c == "xeb") return cmd_xeb(cfg, out);
    if (c == "reduction-demo") return cmd_reduction_demo(cfg, out);
    if (c == "validate") return cmd_validate(cfg, out);
    throw ConfigError("unknown command '" + c + "'");
}

}  // namespace wnrqc::cli
