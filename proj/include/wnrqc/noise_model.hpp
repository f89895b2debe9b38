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
#include <string>
#include <string_view>

#include "wnrqc/errors.hpp"

namespace wnrqc {

enum class ChannelKind { depolarizing, dephasing, rotation, custom };

inline std::string_view to_string(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::depolarizing:
            return "depolarizing";
        case ChannelKind::dephasing:
            return "dephasing";
        case ChannelKind::rotation:
            return "rotation";
        case ChannelKind::custom:
            return "custom";
    }
    return "?";
}

inline ChannelKind parse_channel_kind(std::string_view text) {
    if (text == "depolarizing") return ChannelKind::depolarizing;
    if (text == "dephasing") return ChannelKind::dephasing;
    if (text == "rotation") return ChannelKind::rotation;
    if (text == "custom") return ChannelKind::custom;
    throw ParameterError("unknown channel kind '" + std::string(text) + "'");
}

/// Flip rates and incoherence gap derived from (q, r, u).
struct NoiseDerived {
    /// S->I flip probability per noise location in the one-noisy-copy walk.
    double sigma1;
    /// S->I flip probability per noise location in the two-noisy-copy walk.
    double sigma2;
    /// 2r(1+1/q) - (1-u)(1-1/q^2); O(eps^2) for incoherent channels.
    double delta;
};

/// A unital single-qudit channel, reduced to the average infidelity r and the
/// unitarity u. `kind` and `param` remember which constructor produced it so
/// that the density-matrix oracle can rebuild Kraus operators.
class NoiseChannel {
   public:
    int q() const { return q_; }
    double r() const { return r_; }
    double u() const { return u_; }
    ChannelKind kind() const { return kind_; }
    /// eps for depolarizing/dephasing, theta for rotation, unused for custom.
    double param() const { return param_; }

    double sigma1() const { return r_ * q_ / (q_ - 1.0); }
    double sigma2() const { return 1.0 - u_; }
    double delta() const {
        double qi = 1.0 / q_;
        return 2.0 * r_ * (1.0 + qi) - (1.0 - u_) * (1.0 - qi * qi);
    }
    NoiseDerived derived() const { return {sigma1(), sigma2(), delta()}; }

    bool is_noiseless() const { return r_ == 0.0 && u_ == 1.0; }

    friend NoiseChannel make_depolarizing(int q, double eps);
    friend NoiseChannel make_dephasing(int q, double eps);
    friend NoiseChannel make_rotation(int q, double theta);
    friend NoiseChannel make_custom(int q, double r, double u);

   private:
    NoiseChannel(ChannelKind kind, int q, double r, double u, double param)
        : kind_(kind), q_(q), r_(r), u_(u), param_(param) {
        validate();
    }

    void validate() const {
        detail::require(q_ >= 2, "local dimension q must be >= 2");
        detail::require(r_ >= 0.0 && r_ <= 1.0, "average infidelity r must lie in [0,1]");
        detail::require(u_ >= 0.0 && u_ <= 1.0, "unitarity u must lie in [0,1]");
        detail::require(sigma1() <= 1.0 + 1e-12, "flip rate r*q/(q-1) exceeds 1");
    }

    ChannelKind kind_;
    int q_;
    double r_;
    double u_;
    double param_;
};

/// (1-gamma) rho + gamma I/q with gamma = eps q^2/(q^2-1).
inline NoiseChannel make_depolarizing(int q, double eps) {
    detail::require(q >= 2, "local dimension q must be >= 2");
    double qq = static_cast<double>(q) * q;
    detail::require(eps >= 0.0 && eps <= (qq - 1.0) / qq, "depolarizing eps must lie in [0, (q^2-1)/q^2]");
    double r = eps * q / (q + 1.0);
    double shrink = 1.0 - eps * qq / (qq - 1.0);
    return NoiseChannel(ChannelKind::depolarizing, q, r, shrink * shrink, eps);
}

/// Computational-basis measurement with probability q eps/(q-1).
inline NoiseChannel make_dephasing(int q, double eps) {
    detail::require(q >= 2, "local dimension q must be >= 2");
    double qq = static_cast<double>(q) * q;
    detail::require(eps >= 0.0 && eps <= (q - 1.0) / q, "dephasing eps must lie in [0, (q-1)/q]");
    double r = eps * q / (q + 1.0);
    double u = 1.0 - (qq / (qq - 1.0)) * (2.0 * eps - eps * eps * q / (q - 1.0));
    // u can dip a few ulps below zero at the eps=(q-1)/q endpoint.
    if (u < 0.0 && u > -1e-12) {
        u = 0.0;
    }
    return NoiseChannel(ChannelKind::dephasing, q, r, u, eps);
}

/// exp(-i theta |0><0|); coherent, so u = 1.
inline NoiseChannel make_rotation(int q, double theta) {
    detail::require(q >= 2, "local dimension q must be >= 2");
    double r = (2.0 * (q - 1.0) / (q * (q + 1.0))) * (1.0 - std::cos(theta));
    return NoiseChannel(ChannelKind::rotation, q, r, 1.0, theta);
}

inline NoiseChannel make_custom(int q, double r, double u) {
    return NoiseChannel(ChannelKind::custom, q, r, u, 0.0);
}

inline NoiseChannel make_noiseless(int q) {
    return make_custom(q, 0.0, 1.0);
}

}  // namespace wnrqc
