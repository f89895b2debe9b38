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
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "wnrqc/cg_chain.hpp"
#include "wnrqc/errors.hpp"
#include "wnrqc/io.hpp"
#include "wnrqc/noise_model.hpp"
#include "wnrqc/ztriple.hpp"

namespace wnrqc {

/// Which white-noise fidelity F the distance bound is evaluated at.
enum class FidelityChoice {
    /// F = (Z1-1)/(Z0-1), the minimizer of the two-norm objective.
    fbar,
    /// F = (Z2-1)/(Z1-1).
    alternate,
};

struct BoundReport {
    double fbar = 0;
    /// The F the white-noise bound was evaluated at (fbar unless alternate).
    double f = 0;
    double tvd_uniform_bound = 0;
    /// NaN when the radicand is negative.
    double tvd_wn_bound = 0;
    /// tvd_wn_bound / f.
    double ratio = 0;
    /// Z-scaled two-norm objective at f; negative only through MC noise.
    double radicand = 0;
    bool radicand_ok = true;
    /// The white-noise bound says something only when ratio < 1.
    bool valid = false;
};

namespace metrics {

/// q^n E||p_noisy - F p_ideal - (1-F) p_unif||_2^2 expressed through Z's.
inline double white_noise_objective(const ZTriple &zt, double f) {
    return zt.excess[2] - 2.0 * f * zt.excess[1] + f * f * zt.excess[0];
}

inline double tvd_uniform_bound(const ZTriple &zt) {
    return 0.5 * std::sqrt(std::max(0.0, zt.excess[2]));
}

inline BoundReport bounds_from_ztriple(const ZTriple &zt, FidelityChoice choice = FidelityChoice::fbar) {
    double e0 = zt.excess[0];
    double e1 = zt.excess[1];
    double e2 = zt.excess[2];
    if (!(e0 > 0.0) || !(e1 > 0.0)) {
        throw DegenerateInput("bounds need Z0 > 1 and Z1 > 1");
    }
    BoundReport r;
    r.fbar = e1 / e0;
    r.tvd_uniform_bound = tvd_uniform_bound(zt);
    if (choice == FidelityChoice::fbar) {
        r.f = r.fbar;
        // (Z2-1) - (Z1-1)^2/(Z0-1) = F^2 (Z0-1) ((Z0-1)(Z2-1)/(Z1-1)^2 - 1),
        // with the inner difference formed by expm1 to keep small values.
        if (e2 > 0.0) {
            double inner = std::expm1(std::log(e0) + std::log(e2) - 2.0 * std::log(e1));
            r.radicand = r.fbar * r.fbar * e0 * inner;
        } else {
            r.radicand = e2 - e1 * e1 / e0;
        }
    } else {
        r.f = e2 / e1;
        r.radicand = white_noise_objective(zt, r.f);
    }
    if (r.radicand >= 0.0) {
        r.tvd_wn_bound = 0.5 * std::sqrt(r.radicand);
        r.ratio = r.tvd_wn_bound / r.f;
        r.valid = r.ratio < 1.0;
    } else {
        r.radicand_ok = false;
        r.tvd_wn_bound = std::numeric_limits<double>::quiet_NaN();
        r.ratio = std::numeric_limits<double>::quiet_NaN();
        r.valid = false;
    }
    return r;
}

/// ln(tvd_wn_bound / fbar) from ln(Z_k - 1); finite where the excesses
/// themselves underflow. NaN when the radicand is not positive.
inline double log_ratio_from_log_excess(const std::array<double, 3> &le) {
    double x = le[0] + le[2] - 2.0 * le[1];
    if (!(x > 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::log(0.5) + 0.5 * (le[0] + std::log(std::expm1(x)));
}

/// The reference curve 2 eps sqrt(s) / 3 the ratio approaches at large s.
inline double reference_ratio(double eps, double s) {
    return 2.0 * eps * std::sqrt(s) / 3.0;
}

// ---------------------------------------------------------------------------
// Toy model: a global re-equilibration after every noise location, 2s
// noise locations for s gates.

/// Fraction of the S^n fixed point lost per noise location with flip rate
/// sigma: sigma (1 - q^-2) / (1 - q^-2n).
inline double toy_loss_per_location(uint32_t n, int q, double sigma) {
    double lq = std::log(static_cast<double>(q));
    return sigma * -std::expm1(-2.0 * lq) / -std::expm1(-2.0 * n * lq);
}

inline double toy_fixed_point_excess(uint32_t n, int q) {
    double qn = std::pow(static_cast<double>(q), static_cast<double>(n));
    return std::isinf(qn) ? 1.0 : (qn - 1.0) / (qn + 1.0);
}

/// Closed forms: Z_k - 1 = ((q^n-1)/(q^n+1)) (1 - loss_k)^{2s}.
inline ZTriple toy_model_ztriple(uint32_t n, const NoiseChannel &channel, uint64_t s) {
    detail::require(n >= 1, "need at least one qudit");
    int q = channel.q();
    double c = toy_fixed_point_excess(n, q);
    double l1 = toy_loss_per_location(n, q, channel.sigma1());
    double l2 = toy_loss_per_location(n, q, channel.sigma2());
    detail::require(l1 <= 1.0 && l2 <= 1.0, "toy model needs per-location loss <= 1");
    double twice = 2.0 * static_cast<double>(s);
    return ZTriple::from_excess(c, c * std::pow(1.0 - l1, twice), c * std::pow(1.0 - l2, twice));
}

inline ZTriple toy_model_ztriple(uint32_t n, int q, double eps, uint64_t s) {
    return toy_model_ztriple(n, make_depolarizing(q, eps), s);
}

/// Re-equilibration engine: a weight distribution that is collapsed onto
/// {I^n, S^n} (mass to S^n with probability L_S(w)) before and after every
/// single-site noise location. Independent of the closed forms above.
inline double toy_engine_excess(uint32_t n, int q, double sigma, uint64_t s) {
    WeightDistribution d = cg_chain::initial_weights(n, q);
    double lq = std::log(static_cast<double>(q));
    auto l_s = [&](uint32_t w) {
        return std::expm1(2.0 * w * lq) * std::exp(-2.0 * n * lq) / -std::expm1(-2.0 * n * lq);
    };
    auto collapse = [&] {
        double to_s = 0;
        double total = 0;
        for (uint32_t w = 0; w <= n; w++) {
            to_s += d.probs[w] * l_s(w);
            total += d.probs[w];
        }
        std::fill(d.probs.begin(), d.probs.end(), 0.0);
        d.probs[n] = to_s;
        d.probs[0] = total - to_s;
    };
    auto noise = [&] {
        // The location hits an S with probability w/n.
        std::vector<double> next(n + 1, 0.0);
        for (uint32_t w = 0; w <= n; w++) {
            double hit = sigma * w / n;
            next[w] += d.probs[w] * (1.0 - hit);
            if (w > 0) {
                next[w - 1] += d.probs[w] * hit;
            }
        }
        d.probs.swap(next);
    };
    collapse();
    for (uint64_t k = 0; k < 2 * s; k++) {
        noise();
        collapse();
    }
    return cg_chain::z_excess(d, q);
}

inline ZTriple toy_engine_ztriple(uint32_t n, const NoiseChannel &channel, uint64_t s) {
    int q = channel.q();
    return ZTriple::from_excess(
        toy_engine_excess(n, q, 0.0, s), toy_engine_excess(n, q, channel.sigma1(), s),
        toy_engine_excess(n, q, channel.sigma2(), s));
}

// ---------------------------------------------------------------------------
// Fidelity decay.

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    size_t points = 0;
};

inline LinearFit fit_line(const std::vector<double> &x, const std::vector<double> &y) {
    detail::require(x.size() == y.size() && x.size() >= 2, "line fit needs two or more points");
    double n = static_cast<double>(x.size());
    double mx = 0;
    double my = 0;
    for (size_t i = 0; i < x.size(); i++) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0;
    double sxy = 0;
    for (size_t i = 0; i < x.size(); i++) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    detail::require(sxx > 0, "line fit needs distinct abscissae");
    return {sxy / sxx, my - (sxy / sxx) * mx, x.size()};
}

struct DecayFit {
    /// Fitted d ln(fbar) / ds.
    double slope = 0;
    /// -2 r (1 + 1/q).
    double target = 0;
    /// slope/target - 1; zero when both vanish.
    double relative_deviation = 0;
    size_t points = 0;
    uint64_t window_start = 0;
};

/// Smallest s used in decay fits: 3 n ln n, past the anti-concentration spike.
inline uint64_t decay_window_start(uint32_t n) {
    return static_cast<uint64_t>(std::ceil(3.0 * n * std::log(static_cast<double>(n))));
}

/// Least-squares slope of ln(fbar) against s over sweep points with
/// s >= 3 n ln n.
inline DecayFit fidelity_decay_check(
    uint32_t n, const std::vector<cg_chain::SweepPoint> &sweep, const NoiseChannel &channel) {
    DecayFit fit;
    fit.window_start = decay_window_start(n);
    fit.target = -2.0 * channel.r() * (1.0 + 1.0 / channel.q());
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto &pt : sweep) {
        if (pt.s >= fit.window_start) {
            xs.push_back(static_cast<double>(pt.s));
            ys.push_back(pt.log_excess[1] - pt.log_excess[0]);
        }
    }
    LinearFit line = fit_line(xs, ys);
    fit.slope = line.slope;
    fit.points = line.points;
    if (fit.target != 0.0) {
        fit.relative_deviation = fit.slope / fit.target - 1.0;
    } else {
        fit.relative_deviation = fit.slope;
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Threshold scan.

enum class ThresholdStatus { found, inconclusive };

inline std::string_view to_string(ThresholdStatus s) {
    return s == ThresholdStatus::found ? "found" : "inconclusive";
}

struct ThresholdConfig {
    /// s range; s_max = 0 selects 20 n ln n.
    uint64_t s_min = 0;
    uint64_t s_max = 0;
    /// Number of s points sampled in the top quartile.
    uint32_t points = 21;
    uint32_t iterations = 25;
    /// Bisection bracket as multiples of 1/n.
    double eps_lo_times_n = 0.05;
    double eps_hi_times_n = 1.0;
    /// Growth dead-band is kappa * eps^2 per gate.
    double kappa = 4.0;
    NoisePlacement placement = NoisePlacement::gate_sites;
};

struct ThresholdProbe {
    double eps = 0;
    /// Top-quartile slope of ln(ratio / sqrt(s)) per gate.
    double slope = 0;
    double dead_band = 0;
    bool growing = false;
    bool defined = true;
};

struct ThresholdResult {
    ThresholdStatus status = ThresholdStatus::inconclusive;
    uint32_t n = 0;
    double eps_star = std::numeric_limits<double>::quiet_NaN();
    double bracket_lo = 0;
    double bracket_hi = 0;
    uint64_t s_min = 0;
    uint64_t s_max = 0;
    std::string message;
    std::vector<ThresholdProbe> trace;
};

using ChannelFamily = std::function<NoiseChannel(double eps)>;

/// Classifies one eps by whether ratio(s) outgrows the c*eps*sqrt(s) law at
/// the top of the s range.
inline ThresholdProbe classify_growth(
    uint32_t n, const ChannelFamily &family, double eps, uint64_t s_min, uint64_t s_max, const ThresholdConfig &cfg) {
    ThresholdProbe probe;
    probe.eps = eps;
    probe.dead_band = cfg.kappa * eps * eps;
    uint64_t lo = s_min + (s_max - s_min) * 3 / 4;
    std::vector<uint64_t> s_list;
    for (uint32_t k = 0; k < cfg.points; k++) {
        uint64_t s = lo + (s_max - lo) * k / (cfg.points - 1);
        if (s_list.empty() || s != s_list.back()) {
            s_list.push_back(s);
        }
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto &pt : cg_chain::sweep(n, family(eps), s_list, cfg.placement)) {
        double lr = log_ratio_from_log_excess(pt.log_excess);
        if (!std::isfinite(lr) || pt.s == 0) {
            probe.defined = false;
            return probe;
        }
        xs.push_back(static_cast<double>(pt.s));
        ys.push_back(lr - 0.5 * std::log(static_cast<double>(pt.s)));
    }
    if (xs.size() < 2) {
        probe.defined = false;
        return probe;
    }
    probe.slope = fit_line(xs, ys).slope;
    probe.growing = probe.slope > probe.dead_band;
    return probe;
}

/// Bisects eps between decaying (ratio ~ c eps sqrt(s)) and exponentially
/// growing ratio(s). Returns an inconclusive status rather than a guess when
/// the s range is too short or the bracket does not separate the regimes.
inline ThresholdResult threshold_scan(uint32_t n, const ChannelFamily &family, const ThresholdConfig &cfg = {}) {
    detail::require(n >= 4, "threshold scan needs n >= 4");
    detail::require(cfg.points >= 3, "threshold scan needs at least three s points");
    ThresholdResult res;
    res.n = n;
    double nln = n * std::log(static_cast<double>(n));
    res.s_min = cfg.s_min;
    res.s_max = cfg.s_max == 0 ? static_cast<uint64_t>(std::ceil(20.0 * nln)) : cfg.s_max;
    res.bracket_lo = cfg.eps_lo_times_n / n;
    res.bracket_hi = cfg.eps_hi_times_n / n;
    if (res.s_max <= res.s_min || static_cast<double>(res.s_max) < 10.0 * nln ||
        (res.s_max - res.s_min) / 4 < cfg.points) {
        res.message = "s range must reach 10 n ln n with a top quartile of at least `points` gates";
        return res;
    }
    auto probe = [&](double eps) {
        ThresholdProbe p = classify_growth(n, family, eps, res.s_min, res.s_max, cfg);
        res.trace.push_back(p);
        return p;
    };
    ThresholdProbe lo = probe(res.bracket_lo);
    ThresholdProbe hi = probe(res.bracket_hi);
    if (!lo.defined || !hi.defined) {
        res.message = "ratio undefined at a bracket end";
        return res;
    }
    if (lo.growing || !hi.growing) {
        res.message = "bracket does not separate decaying from growing ratio";
        return res;
    }
    double a = res.bracket_lo;
    double b = res.bracket_hi;
    for (uint32_t it = 0; it < cfg.iterations; it++) {
        double mid = 0.5 * (a + b);
        ThresholdProbe p = probe(mid);
        if (!p.defined) {
            res.message = "ratio undefined inside the bracket";
            return res;
        }
        (p.growing ? b : a) = mid;
    }
    res.bracket_lo = a;
    res.bracket_hi = b;
    res.eps_star = 0.5 * (a + b);
    res.status = ThresholdStatus::found;
    return res;
}

inline ThresholdResult threshold_scan_depolarizing(uint32_t n, int q, const ThresholdConfig &cfg = {}) {
    return threshold_scan(n, [q](double eps) { return make_depolarizing(q, eps); }, cfg);
}

// ---------------------------------------------------------------------------
// CSV rows.

inline void write_bounds_csv_header(std::ostream &out) {
    write_schema_line(out, "wnrqc.bounds", 1);
    out << "s,z0,z1,z2,z0_minus_1,z1_minus_1,z2_minus_1,fbar,tvd_uniform_bound,tvd_wn_bound,ratio,"
           "reference,valid,radicand_ok\n";
}

inline void write_bounds_csv_row(
    std::ostream &out, uint64_t s, const ZTriple &zt, const BoundReport &b, double reference) {
    out << s << ',' << format_double(zt.z0()) << ',' << format_double(zt.z1()) << ',' << format_double(zt.z2())
        << ',' << format_double(zt.excess[0]) << ',' << format_double(zt.excess[1]) << ','
        << format_double(zt.excess[2]) << ',' << format_double(b.fbar) << ','
        << format_double(b.tvd_uniform_bound) << ',' << format_double(b.tvd_wn_bound) << ','
        << format_double(b.ratio) << ',' << format_double(reference) << ',' << (b.valid ? 1 : 0) << ','
        << (b.radicand_ok ? 1 : 0) << '\n';
}

}  // namespace metrics

}  // namespace wnrqc
