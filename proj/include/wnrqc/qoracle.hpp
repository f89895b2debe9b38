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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "wnrqc/architectures.hpp"
#include "wnrqc/errors.hpp"
#include "wnrqc/io.hpp"
#include "wnrqc/noise_model.hpp"
#include "wnrqc/parallel.hpp"
#include "wnrqc/rng.hpp"
#include "wnrqc/stats.hpp"
#include "wnrqc/ztriple.hpp"

namespace wnrqc {

using cplx = std::complex<double>;

/// Largest q^n the density-matrix oracle accepts by default (q=2, n=7).
inline constexpr uint64_t kQoracleMaxDim = 128;

/// A single-qudit operator with at most one nonzero per column:
/// K|j> = coeff[j] |target[j]>. Generalized Paulis, basis projectors and
/// diagonal rotations all have this form.
struct MonomialOp {
    std::vector<uint32_t> target;
    std::vector<cplx> coeff;

    Eigen::MatrixXcd dense() const {
        auto q = static_cast<Eigen::Index>(target.size());
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(q, q);
        for (Eigen::Index j = 0; j < q; j++) {
            m(target[j], j) = coeff[j];
        }
        return m;
    }
};

struct KrausSet {
    int q = 2;
    std::vector<MonomialOp> ops;

    /// Sum_k K_k^dagger K_k, which is the identity for a channel.
    Eigen::MatrixXcd completeness() const {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(q, q);
        for (const auto &op : ops) {
            Eigen::MatrixXcd d = op.dense();
            acc += d.adjoint() * d;
        }
        return acc;
    }

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd &rho) const {
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(q, q);
        for (const auto &op : ops) {
            Eigen::MatrixXcd d = op.dense();
            out += d * rho * d.adjoint();
        }
        return out;
    }
};

namespace qoracle {

/// X^a Z^b with X|j> = |j+1 mod q> and Z|j> = omega^j |j>.
inline MonomialOp generalized_pauli(int q, int a, int b, double scale = 1.0) {
    MonomialOp op{std::vector<uint32_t>(q), std::vector<cplx>(q)};
    for (int j = 0; j < q; j++) {
        double phase = 2.0 * std::numbers::pi * b * j / q;
        op.target[j] = static_cast<uint32_t>((j + a) % q);
        op.coeff[j] = scale * std::polar(1.0, phase);
    }
    return op;
}

/// Identity with weight 1-eps and each of the q^2-1 other generalized Paulis
/// with weight eps/(q^2-1); equal to (1-gamma) rho + gamma I/q.
inline KrausSet depolarizing_kraus(int q, double eps) {
    KrausSet k{q, {}};
    double others = eps / (q * q - 1.0);
    for (int a = 0; a < q; a++) {
        for (int b = 0; b < q; b++) {
            double w = (a == 0 && b == 0) ? 1.0 - eps : others;
            if (w > 0.0) {
                k.ops.push_back(generalized_pauli(q, a, b, std::sqrt(w)));
            }
        }
    }
    return k;
}

/// Measure in the computational basis with probability q eps/(q-1).
inline KrausSet dephasing_kraus(int q, double eps) {
    KrausSet k{q, {}};
    double p = q * eps / (q - 1.0);
    if (p < 1.0) {
        k.ops.push_back(generalized_pauli(q, 0, 0, std::sqrt(1.0 - p)));
    }
    for (int m = 0; m < q && p > 0.0; m++) {
        MonomialOp op{std::vector<uint32_t>(q), std::vector<cplx>(q, 0.0)};
        for (int j = 0; j < q; j++) {
            op.target[j] = static_cast<uint32_t>(j);
        }
        op.coeff[m] = std::sqrt(p);
        k.ops.push_back(op);
    }
    return k;
}

inline KrausSet rotation_kraus(int q, double theta) {
    MonomialOp op = generalized_pauli(q, 0, 0);
    op.coeff[0] = std::polar(1.0, -theta);
    return {q, {op}};
}

inline KrausSet kraus_for(const NoiseChannel &channel) {
    int q = channel.q();
    if (channel.is_noiseless()) {
        return {q, {generalized_pauli(q, 0, 0)}};
    }
    switch (channel.kind()) {
        case ChannelKind::depolarizing:
            return depolarizing_kraus(q, channel.param());
        case ChannelKind::dephasing:
            return dephasing_kraus(q, channel.param());
        case ChannelKind::rotation:
            return rotation_kraus(q, channel.param());
        case ChannelKind::custom:
            break;
    }
    throw ParameterError("custom (r, u) channels have no Kraus form; use a named channel for the quantum oracle");
}

/// Haar-random d x d unitary: QR of a complex Gaussian matrix with the
/// diagonal of R rotated to be real positive.
inline Eigen::MatrixXcd haar_unitary(int d, Rng &rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    Eigen::MatrixXcd g(d, d);
    for (int c = 0; c < d; c++) {
        for (int r = 0; r < d; r++) {
            double re = normal(rng);
            double im = normal(rng);
            g(r, c) = cplx(re, im);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < d; k++) {
        cplx diag = r(k, k);
        double mag = std::abs(diag);
        q.col(k) *= (mag > 0.0 ? diag / mag : cplx(1.0));
    }
    return q;
}

/// Haar-random pure state of dimension d.
inline Eigen::VectorXcd haar_state(int d, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXcd v(d);
    for (int k = 0; k < d; k++) {
        double re = normal(rng);
        double im = normal(rng);
        v(k) = cplx(re, im);
    }
    return v / v.norm();
}

/// Haar-averaged 1 - <psi|E(psi)|psi>, estimated by sampling.
inline MomentSums infidelity_mc(const KrausSet &k, uint64_t samples, Rng &rng) {
    MomentSums m;
    for (uint64_t t = 0; t < samples; t++) {
        Eigen::VectorXcd psi = haar_state(k.q, rng);
        Eigen::MatrixXcd out = k.apply(psi * psi.adjoint());
        m.add(1.0 - (psi.adjoint() * out * psi)(0, 0).real());
    }
    return m;
}

/// Unitarity of a unital channel, q/(q-1) (E tr[E(psi)^2] - 1/q), sampled.
inline MomentSums unitarity_mc(const KrausSet &k, uint64_t samples, Rng &rng) {
    MomentSums m;
    double scale = k.q / (k.q - 1.0);
    for (uint64_t t = 0; t < samples; t++) {
        Eigen::VectorXcd psi = haar_state(k.q, rng);
        Eigen::MatrixXcd out = k.apply(psi * psi.adjoint());
        double purity = (out * out).trace().real();
        m.add(scale * (purity - 1.0 / k.q));
    }
    return m;
}

/// Dense index arithmetic for n qudits of dimension q; site k is digit k,
/// least significant first.
struct Register {
    uint32_t n;
    int q;
    uint64_t dim;
    std::vector<uint64_t> place;

    Register(uint32_t n_, int q_) : n(n_), q(q_), dim(1), place(n_) {
        for (uint32_t k = 0; k < n; k++) {
            place[k] = dim;
            dim *= static_cast<uint64_t>(q);
        }
    }

    uint32_t digit(uint64_t idx, uint32_t site) const {
        return static_cast<uint32_t>(idx / place[site] % q);
    }
};

/// Applies a q^2 x q^2 unitary on (site i, site j) to every column of m;
/// the two-site index is digit_i + q * digit_j.
inline void apply_two_site(const Register &reg, Eigen::MatrixXcd &m, const Eigen::MatrixXcd &u, uint32_t i,
                           uint32_t j) {
    int q = reg.q;
    int d = q * q;
    std::vector<uint64_t> offs(d);
    for (int b = 0; b < q; b++) {
        for (int a = 0; a < q; a++) {
            offs[a + q * b] = a * reg.place[i] + b * reg.place[j];
        }
    }
    Eigen::VectorXcd buf(d);
    Eigen::VectorXcd out(d);
    for (Eigen::Index c = 0; c < m.cols(); c++) {
        cplx *col = m.col(c).data();
        for (uint64_t base = 0; base < reg.dim; base++) {
            if (reg.digit(base, i) != 0 || reg.digit(base, j) != 0) {
                continue;
            }
            for (int k = 0; k < d; k++) {
                buf(k) = col[base + offs[k]];
            }
            out.noalias() = u * buf;
            for (int k = 0; k < d; k++) {
                col[base + offs[k]] = out(k);
            }
        }
    }
}

inline void apply_one_site(const Register &reg, Eigen::MatrixXcd &m, const Eigen::MatrixXcd &u, uint32_t site) {
    int q = reg.q;
    Eigen::VectorXcd buf(q);
    Eigen::VectorXcd out(q);
    for (Eigen::Index c = 0; c < m.cols(); c++) {
        cplx *col = m.col(c).data();
        for (uint64_t base = 0; base < reg.dim; base++) {
            if (reg.digit(base, site) != 0) {
                continue;
            }
            for (int k = 0; k < q; k++) {
                buf(k) = col[base + k * reg.place[site]];
            }
            out.noalias() = u * buf;
            for (int k = 0; k < q; k++) {
                col[base + k * reg.place[site]] = out(k);
            }
        }
    }
}

/// rho -> U rho U^dagger for a unitary acting on some sites.
template <typename Apply>
void conjugate(Eigen::MatrixXcd &rho, Apply apply_left) {
    apply_left(rho);
    Eigen::MatrixXcd t = rho.adjoint();
    apply_left(t);
    rho = t.adjoint();
}

/// rho -> sum_k K_k rho K_k^dagger with every K_k acting on `site`.
inline void apply_channel(const Register &reg, Eigen::MatrixXcd &rho, const KrausSet &kraus, uint32_t site) {
    if (kraus.ops.size() == 1) {
        const auto &op = kraus.ops.front();
        bool identity = true;
        for (int j = 0; j < reg.q; j++) {
            identity = identity && op.target[j] == static_cast<uint32_t>(j) && op.coeff[j] == cplx(1.0);
        }
        if (identity) {
            return;
        }
    }
    auto dim = static_cast<Eigen::Index>(reg.dim);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<uint64_t> moved(reg.dim);
    std::vector<cplx> factor(reg.dim);
    for (const auto &op : kraus.ops) {
        for (uint64_t x = 0; x < reg.dim; x++) {
            uint32_t dx = reg.digit(x, site);
            moved[x] = x + (static_cast<int64_t>(op.target[dx]) - dx) * reg.place[site];
            factor[x] = op.coeff[dx];
        }
        for (Eigen::Index y = 0; y < dim; y++) {
            cplx fy = std::conj(factor[y]);
            if (fy == cplx(0.0)) {
                continue;
            }
            for (Eigen::Index x = 0; x < dim; x++) {
                if (factor[x] == cplx(0.0)) {
                    continue;
                }
                out(moved[x], moved[y]) += factor[x] * fy * rho(x, y);
            }
        }
    }
    rho.swap(out);
}

struct SimulationOptions {
    uint64_t max_dim = kQoracleMaxDim;
    /// Checks trace, Hermiticity and the smallest eigenvalue after every gate.
    bool check_cptp = false;
};

struct InstanceResult {
    std::vector<double> p_ideal;
    std::vector<double> p_noisy;
    double sum_ideal_sq = 0;
    double sum_cross = 0;
    double sum_noisy_sq = 0;
    double tvd_uniform = 0;
    /// Worst CPTP diagnostics seen when check_cptp is on.
    double max_trace_error = 0;
    double max_hermitian_error = 0;
    double min_eigenvalue = 0;
};

inline void check_capacity(uint32_t n, int q, uint64_t max_dim) {
    double dim = std::pow(static_cast<double>(q), static_cast<double>(n));
    if (dim > static_cast<double>(max_dim)) {
        throw CapacityError(
            "density matrix of dimension " + std::to_string(static_cast<uint64_t>(dim)) + " exceeds cap " +
            std::to_string(max_dim));
    }
}

inline double tvd(const std::vector<double> &a, const std::vector<double> &b) {
    double acc = 0;
    for (size_t k = 0; k < a.size(); k++) {
        acc += std::abs(a[k] - b[k]);
    }
    return 0.5 * acc;
}

/// 1/2 || p - (F p_ideal + (1-F) p_unif) ||_1
inline double tvd_to_white_noise(const std::vector<double> &p_noisy, const std::vector<double> &p_ideal, double f) {
    double uni = (1.0 - f) / static_cast<double>(p_noisy.size());
    double acc = 0;
    for (size_t k = 0; k < p_noisy.size(); k++) {
        acc += std::abs(p_noisy[k] - f * p_ideal[k] - uni);
    }
    return 0.5 * acc;
}

/// One random circuit instance: Haar single-qudit layers at both ends, a Haar
/// two-qudit gate per diagram entry followed by the channel on both sites.
/// The unitaries come from `rng`; the noise is applied exactly.
inline InstanceResult simulate_instance(
    const CircuitDiagram &diagram, int q, const KrausSet &kraus, Rng &rng, const SimulationOptions &opt = {}) {
    diagram.validate();
    check_capacity(diagram.n, q, opt.max_dim);
    detail::require(kraus.q == q, "Kraus operators have the wrong dimension");
    Register reg(diagram.n, q);
    auto dim = static_cast<Eigen::Index>(reg.dim);
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(dim, 1);
    psi(0, 0) = 1.0;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho(0, 0) = 1.0;
    InstanceResult res;
    res.min_eigenvalue = 0.0;

    auto single_layer = [&] {
        for (uint32_t k = 0; k < reg.n; k++) {
            Eigen::MatrixXcd u = haar_unitary(q, rng);
            apply_one_site(reg, psi, u, k);
            conjugate(rho, [&](Eigen::MatrixXcd &m) { apply_one_site(reg, m, u, k); });
        }
    };
    auto check = [&] {
        if (!opt.check_cptp) {
            return;
        }
        res.max_trace_error = std::max(res.max_trace_error, std::abs(rho.trace() - cplx(1.0)));
        res.max_hermitian_error = std::max(res.max_hermitian_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
        res.min_eigenvalue = std::min(res.min_eigenvalue, es.eigenvalues().minCoeff());
    };

    single_layer();
    for (const auto &g : diagram.gates) {
        Eigen::MatrixXcd u = haar_unitary(q * q, rng);
        apply_two_site(reg, psi, u, g.i, g.j);
        conjugate(rho, [&](Eigen::MatrixXcd &m) { apply_two_site(reg, m, u, g.i, g.j); });
        apply_channel(reg, rho, kraus, g.i);
        apply_channel(reg, rho, kraus, g.j);
        check();
    }
    single_layer();

    res.p_ideal.resize(reg.dim);
    res.p_noisy.resize(reg.dim);
    for (Eigen::Index x = 0; x < dim; x++) {
        res.p_ideal[x] = std::norm(psi(x, 0));
        res.p_noisy[x] = std::max(0.0, rho(x, x).real());
    }
    double uni = 1.0 / static_cast<double>(reg.dim);
    for (uint64_t x = 0; x < reg.dim; x++) {
        res.sum_ideal_sq += res.p_ideal[x] * res.p_ideal[x];
        res.sum_cross += res.p_ideal[x] * res.p_noisy[x];
        res.sum_noisy_sq += res.p_noisy[x] * res.p_noisy[x];
        res.tvd_uniform += 0.5 * std::abs(res.p_noisy[x] - uni);
    }
    return res;
}

struct EnsembleOptions {
    unsigned threads = default_threads();
    SimulationOptions sim;
    /// Keep every instance's distributions (needed for TVDs to p_wn).
    bool keep_distributions = false;
};

struct Ensemble {
    uint32_t n = 0;
    int q = 2;
    std::vector<InstanceResult> instances;
    ZTriple z;
    MomentSums tvd_uniform;
};

/// Instance k uses stream k+1 of `seed` for its diagram and unitaries, so
/// ensembles at different noise strengths share their random circuits.
inline Ensemble run_ensemble(
    const ArchitectureSpec &arch, const NoiseChannel &channel, uint64_t instances, uint64_t seed,
    const EnsembleOptions &opt = {}) {
    detail::require(instances >= 2, "need at least two instances");
    int q = channel.q();
    check_capacity(arch.n, q, opt.sim.max_dim);
    KrausSet kraus = kraus_for(channel);
    std::vector<InstanceResult> results(instances);
    parallel_for(instances, opt.threads, [&](size_t k) {
        Rng rng = stream_rng(seed, k + 1);
        CircuitDiagram d = arch.draw(rng);
        results[k] = simulate_instance(d, q, kraus, rng, opt.sim);
    });
    Ensemble e;
    e.n = arch.n;
    e.q = q;
    double qn = std::pow(static_cast<double>(q), static_cast<double>(arch.n));
    std::array<MomentSums, 3> m;
    for (auto &r : results) {
        m[0].add(qn * r.sum_ideal_sq - 1.0);
        m[1].add(qn * r.sum_cross - 1.0);
        m[2].add(qn * r.sum_noisy_sq - 1.0);
        e.tvd_uniform.add(r.tvd_uniform);
        if (!opt.keep_distributions) {
            r.p_ideal.clear();
            r.p_ideal.shrink_to_fit();
            r.p_noisy.clear();
            r.p_noisy.shrink_to_fit();
        }
    }
    e.z = ZTriple::from_excess(m[0].mean(), m[1].mean(), m[2].mean());
    e.z.provenance = Provenance::monte_carlo;
    e.z.se = {m[0].standard_error(), m[1].standard_error(), m[2].standard_error()};
    e.instances = std::move(results);
    return e;
}

/// Instance averages of q^n sum p_ideal^2, q^n sum p_ideal p_noisy and
/// q^n sum p_noisy^2.
inline ZTriple estimate_ztriple_quantum(
    const ArchitectureSpec &arch, const NoiseChannel &channel, uint64_t instances, uint64_t seed,
    const EnsembleOptions &opt = {}) {
    return run_ensemble(arch, channel, instances, seed, opt).z;
}

struct TvdEstimate {
    double f = 0;
    double tvd_uniform = 0;
    double tvd_uniform_se = 0;
    double tvd_wn = 0;
    double tvd_wn_se = 0;
    ZTriple z;
};

/// Expected exact TVDs of p_noisy to uniform and to F p_ideal + (1-F) p_unif.
/// Without `f`, F is the ensemble's own (Z1-1)/(Z0-1).
inline TvdEstimate estimate_tvds_quantum(
    const ArchitectureSpec &arch, const NoiseChannel &channel, uint64_t instances, uint64_t seed,
    std::optional<double> f = std::nullopt, EnsembleOptions opt = {}) {
    opt.keep_distributions = true;
    Ensemble e = run_ensemble(arch, channel, instances, seed, opt);
    TvdEstimate out;
    out.z = e.z;
    out.f = f.has_value() ? *f : e.z.excess[1] / e.z.excess[0];
    MomentSums wn;
    for (const auto &r : e.instances) {
        wn.add(tvd_to_white_noise(r.p_noisy, r.p_ideal, out.f));
    }
    out.tvd_uniform = e.tvd_uniform.mean();
    out.tvd_uniform_se = e.tvd_uniform.standard_error();
    out.tvd_wn = wn.mean();
    out.tvd_wn_se = wn.standard_error();
    return out;
}

struct XebEstimate {
    /// Mean over instances and shots of q^n p_ideal(x) - 1.
    double value = 0;
    double se = 0;
    double ci_low = 0;
    double ci_high = 0;
    uint64_t instances = 0;
    uint64_t shots = 0;
};

/// Draws index x ~ p by inverting the cumulative sum.
inline size_t sample_index(const std::vector<double> &p, Rng &rng) {
    double total = 0;
    for (double x : p) {
        total += x;
    }
    double target = uniform01(rng) * total;
    double acc = 0;
    for (size_t k = 0; k < p.size(); k++) {
        acc += p[k];
        if (target < acc) {
            return k;
        }
    }
    return p.size() - 1;
}

/// Linear cross-entropy statistic from `shots` samples of p_noisy per
/// instance; the 95% interval uses the instance-level standard error.
inline XebEstimate xeb_estimate(
    const ArchitectureSpec &arch, const NoiseChannel &channel, uint64_t instances, uint64_t shots, uint64_t seed,
    EnsembleOptions opt = {}) {
    detail::require(shots >= 1, "need at least one shot");
    opt.keep_distributions = true;
    Ensemble e = run_ensemble(arch, channel, instances, seed, opt);
    double qn = std::pow(static_cast<double>(e.q), static_cast<double>(e.n));
    MomentSums per_instance;
    for (size_t k = 0; k < e.instances.size(); k++) {
        const auto &r = e.instances[k];
        // Shot streams live above the circuit streams of the same seed.
        Rng rng = stream_rng(seed, (uint64_t{1} << 40) + k);
        double acc = 0;
        for (uint64_t t = 0; t < shots; t++) {
            acc += qn * r.p_ideal[sample_index(r.p_noisy, rng)] - 1.0;
        }
        per_instance.add(acc / static_cast<double>(shots));
    }
    XebEstimate x;
    x.value = per_instance.mean();
    x.se = per_instance.standard_error();
    x.ci_low = x.value - 1.96 * x.se;
    x.ci_high = x.value + 1.96 * x.se;
    x.instances = instances;
    x.shots = shots;
    return x;
}

inline void write_ensemble_csv(std::ostream &out, const Ensemble &e, std::optional<double> f = std::nullopt) {
    write_schema_line(out, "wnrqc.qoracle", 1);
    double qn = std::pow(static_cast<double>(e.q), static_cast<double>(e.n));
    double fv = f.has_value() ? *f : e.z.excess[1] / e.z.excess[0];
    out << "instance,z0_term,z1_term,z2_term,tvd_uniform,tvd_wn\n";
    MomentSums wn;
    for (size_t k = 0; k < e.instances.size(); k++) {
        const auto &r = e.instances[k];
        double t_wn = r.p_ideal.empty() ? std::nan("") : tvd_to_white_noise(r.p_noisy, r.p_ideal, fv);
        if (!r.p_ideal.empty()) {
            wn.add(t_wn);
        }
        out << k << ',' << format_double(qn * r.sum_ideal_sq) << ',' << format_double(qn * r.sum_cross) << ','
            << format_double(qn * r.sum_noisy_sq) << ',' << format_double(r.tvd_uniform) << ','
            << format_double(t_wn) << '\n';
    }
    out << "summary," << format_double(e.z.z0()) << ',' << format_double(e.z.z1()) << ','
        << format_double(e.z.z2()) << ',' << format_double(e.tvd_uniform.mean()) << ','
        << format_double(wn.count ? wn.mean() : std::nan("")) << '\n';
}

}  // namespace qoracle

}  // namespace wnrqc
