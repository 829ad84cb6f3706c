// Copyright 2026 The cvqpon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CVQPON_NETWORK_HPP
#define CVQPON_NETWORK_HPP

/// @file network.hpp
/// Physical description of a 1:N broadcast network and its translation into
/// labeled multipartite covariance matrices.
///
/// The construction follows the equivalent entanglement-based picture:
///  1. a two-mode squeezed vacuum of variance V = 1 + modulation_variance,
///     with one mode split on a balanced beamsplitter (the provider's
///     heterodyne arms are retained as purification modes);
///  2. the provider-side channel (transmittance eta_a, excess noise eps_a)
///     realized as a beamsplitter coupling to one arm of a thermal-purifying
///     two-mode squeezed ancilla held by the eavesdropper;
///  3. an equal 1:N splitter cascade;
///  4. per-branch channels (eta_b[l], eps_b[l]) with the same noise model;
///  5. trusted heterodyne detectors: each user's mode is split into an x arm
///     and a p arm, and each arm is coupled (transmittance tau) to one mode
///     of a two-mode squeezed purification of the electronic noise.
///
/// Sign gauge: every splitter output arm is phase-normalized so that signal
/// coefficients are positive. All correlations between users then carry a
/// positive sign. Local phase flips do not change any entropy, mutual
/// information, or key rate, and the gauge makes assembled matrices
/// independent of the cascade topology.

#include <cvqpon/gaussian.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvqpon {

/// Detector transmittance is capped below 1 to keep the electronic-noise
/// purification variance finite; the perfect-detector limit is reached
/// numerically.
inline constexpr double kDetectorTransmittanceCap = 1.0 - 1e-9;

/// Channel transmittance cap applied only when excess noise must be injected
/// at a lossless link (the injection beamsplitter needs nonzero reflectivity).
inline constexpr double kChannelTransmittanceCap = 1.0 - 1e-12;

/// Modulated-source description. The generated state's quadrature variance is
/// 1 + modulation_variance (SNU), i.e. V = modulation_variance + 1 in the
/// equivalent entanglement-based picture.
struct SourceParams {
    double modulation_variance = 0.0;  ///< per-quadrature displacement variance, SNU
};

/// Link budget: provider-side segment plus per-user branch segments.
struct LinkParams {
    double eta_a = 1.0;          ///< provider-side transmittance, (0,1]
    double eps_a = 0.0;          ///< provider-side excess noise, SNU >= 0
    std::vector<double> eta_b;   ///< per-user branch transmittance, (0,1]
    std::vector<double> eps_b;   ///< per-user branch excess noise (at output), SNU >= 0
};

/// Trusted-receiver description.
struct DetectorParams {
    std::vector<double> tau;  ///< quantum efficiency per user, (0,1]
    std::vector<double> nu;   ///< electronic-noise variance per user, SNU >= 0
};

/// Full physical description of the broadcast network.
struct NetworkParams {
    int users = 1;
    SourceParams source;
    LinkParams link;
    DetectorParams detectors;
    /// Optional unequal splitter shares (must sum to 1); empty means the
    /// default equal 1/N split.
    std::vector<double> split_weights;

    /// Fraction of the broadcast signal routed to user l by the splitter.
    double split_weight(int l) const {
        return split_weights.empty() ? 1.0 / users : split_weights[static_cast<std::size_t>(l)];
    }
    /// Total transmittance of user l's end-to-end link, including the split.
    double eta_total(int l) const {
        return link.eta_a * link.eta_b[static_cast<std::size_t>(l)] * split_weight(l);
    }
    /// Total excess noise referred to user l's channel output.
    double eps_total(int l) const {
        return link.eps_a * link.eta_b[static_cast<std::size_t>(l)] * split_weight(l) +
               link.eps_b[static_cast<std::size_t>(l)];
    }
    /// Effective (capped) detector transmittance for user l.
    double tau_eff(int l) const {
        return std::min(detectors.tau[static_cast<std::size_t>(l)], kDetectorTransmittanceCap);
    }
    /// Electronic-noise purification variance V_D for user l.
    double purifier_variance(int l) const {
        const double t = tau_eff(l);
        return 1.0 + detectors.nu[static_cast<std::size_t>(l)] / (1.0 - t);
    }

    /// True when every user shares identical split share and branch/detector
    /// parameters.
    bool has_uniform_users(double tol = 1e-12) const {
        for (int l = 0; l < users; ++l) {
            if (std::abs(split_weight(l) - 1.0 / users) > tol) return false;
        }
        for (int l = 1; l < users; ++l) {
            const auto i = static_cast<std::size_t>(l);
            if (std::abs(link.eta_b[i] - link.eta_b[0]) > tol ||
                std::abs(link.eps_b[i] - link.eps_b[0]) > tol ||
                std::abs(detectors.tau[i] - detectors.tau[0]) > tol ||
                std::abs(detectors.nu[i] - detectors.nu[0]) > tol) {
                return false;
            }
        }
        return true;
    }

    /// Network with N identical users.
    static NetworkParams uniform(int n, double modulation_variance, double eta_b, double eps_b,
                                 double tau, double nu, double eta_a = 1.0, double eps_a = 0.0) {
        NetworkParams p;
        p.users = n;
        p.source.modulation_variance = modulation_variance;
        p.link.eta_a = eta_a;
        p.link.eps_a = eps_a;
        const auto un = static_cast<std::size_t>(n);
        p.link.eta_b.assign(un, eta_b);
        p.link.eps_b.assign(un, eps_b);
        p.detectors.tau.assign(un, tau);
        p.detectors.nu.assign(un, nu);
        p.validate();
        return p;
    }

    void validate() const {
        if (users < 1) throw std::invalid_argument("users must be >= 1");
        if (source.modulation_variance < 0.0) {
            throw std::invalid_argument("modulation_variance must be >= 0");
        }
        if (!(link.eta_a > 0.0 && link.eta_a <= 1.0)) {
            throw std::invalid_argument("eta_a must lie in (0,1]");
        }
        if (link.eps_a < 0.0) throw std::invalid_argument("eps_a must be >= 0");
        const auto n = static_cast<std::size_t>(users);
        if (link.eta_b.size() != n || link.eps_b.size() != n || detectors.tau.size() != n ||
            detectors.nu.size() != n) {
            throw std::invalid_argument("per-user parameter arrays must have length " +
                                        std::to_string(users));
        }
        for (int l = 0; l < users; ++l) {
            const auto i = static_cast<std::size_t>(l);
            const std::string who = "user " + std::to_string(l);
            if (!(link.eta_b[i] > 0.0 && link.eta_b[i] <= 1.0)) {
                throw std::invalid_argument(who + ": eta_b must lie in (0,1]");
            }
            if (link.eps_b[i] < 0.0) throw std::invalid_argument(who + ": eps_b must be >= 0");
            if (!(detectors.tau[i] > 0.0 && detectors.tau[i] <= 1.0)) {
                throw std::invalid_argument(who + ": tau must lie in (0,1]");
            }
            if (detectors.nu[i] < 0.0) throw std::invalid_argument(who + ": nu must be >= 0");
        }
        if (!split_weights.empty()) {
            if (split_weights.size() != n) {
                throw std::invalid_argument("split_weights must have one entry per user");
            }
            double sum = 0.0;
            for (double w : split_weights) {
                if (w <= 0.0) throw std::invalid_argument("split_weights must be positive");
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-9) {
                throw std::invalid_argument("split_weights must sum to 1");
            }
        }
    }
};

namespace detail {

/// Couple `mode` to a fresh two-mode squeezed ancilla so that the mode keeps
/// fraction `transmittance` of its signal and gains `excess` units of noise.
/// The ancilla pair is labeled as held by the eavesdropper.
inline GaussianState lossy_noisy_channel(const GaussianState& state, const ModeLabel& mode,
                                         double transmittance, double excess, int& eve_serial) {
    double t = transmittance;
    if (excess > 0.0) t = std::min(t, kChannelTransmittanceCap);
    if (t >= 1.0 && excess <= 0.0) return state;  // identity channel
    const double v_e = 1.0 + excess / (1.0 - t);
    const ModeLabel e_in = eve_label(eve_serial++), e_keep = eve_label(eve_serial++);
    auto out = tensor(state, tmsv(v_e, e_in, e_keep));
    return beamsplitter(out, mode, e_in, t);
}

/// Split `carrier` into one arm per entry of `weights` (weights sum to 1)
/// using a cascade of beamsplitters. Output arms are phase-normalized to
/// positive signal coefficients and are returned in user order. `balanced`
/// selects the log-depth tree (only valid for an equal power-of-two split);
/// otherwise a sequential tap-off chain is used.
inline GaussianState split_cascade(GaussianState state, const ModeLabel& carrier,
                                   const std::vector<double>& weights, bool balanced,
                                   std::vector<ModeLabel>& arms_out) {
    const int n = static_cast<int>(weights.size());
    arms_out.clear();
    if (n == 1) {
        arms_out.push_back(carrier);
        return state;
    }
    int next_vac = 0;
    if (balanced) {
        std::vector<ModeLabel> arms{carrier};
        while (static_cast<int>(arms.size()) < n) {
            std::vector<ModeLabel> next;
            next.reserve(arms.size() * 2);
            for (const auto& arm : arms) {
                const ModeLabel fresh = vacuum_label(next_vac++);
                state = tensor(state, vacuum_state({fresh}));
                state = beamsplitter(state, arm, fresh, 0.5);
                state = phase_flip(state, fresh);
                next.push_back(arm);
                next.push_back(fresh);
            }
            arms = std::move(next);
        }
        arms_out = arms;
    } else {
        // Tap off weight w_0 of the total, then w_1 of the remainder, and so
        // on; the carrier ends up holding the final share.
        double remaining = 1.0;
        for (int k = 0; k < n - 1; ++k) {
            const ModeLabel tap = vacuum_label(next_vac++);
            state = tensor(state, vacuum_state({tap}));
            const double w = weights[static_cast<std::size_t>(k)];
            const double keep = (remaining - w) / remaining;
            state = beamsplitter(state, carrier, tap, keep);
            state = phase_flip(state, tap);
            arms_out.push_back(tap);
            remaining -= w;
        }
        arms_out.push_back(carrier);
    }
    return state;
}

}  // namespace detail

/// How the 1:N splitter cascade is arranged. Both arrangements divide the
/// signal exactly equally, and the assembled covariance matrix is identical
/// (topology independence); `automatic_choice` uses the balanced tree for
/// powers of two and the sequential chain otherwise.
enum class SplitterTopology { automatic_choice, balanced_tree, sequential };

/// Provider's source stage: modes (alice_x, alice_p, signal).
/// A two-mode squeezed vacuum of variance V = modulation_variance + 1 has one
/// mode split on a balanced beamsplitter against vacuum; both retained arms
/// stay unmeasured as purification modes.
inline GaussianState build_signal_stage(const SourceParams& source) {
    if (source.modulation_variance < 0.0) {
        throw std::invalid_argument("modulation_variance must be >= 0");
    }
    const double v = source.modulation_variance + 1.0;
    auto state = tmsv(v, alice_x_label(), signal_label());
    state = tensor(state, vacuum_state({alice_p_label()}));
    state = beamsplitter(state, alice_x_label(), alice_p_label(), 0.5);
    state = phase_flip(state, alice_p_label());
    return restrict_to(state, {alice_x_label(), alice_p_label(), signal_label()});
}

/// Broadcast state after channels, before detection: modes
/// (alice_x, alice_p, user 0 .. user N-1). Eavesdropper ancillas are traced
/// out; they purify the returned state together with nothing else.
inline GaussianState build_broadcast_state(const NetworkParams& params,
                                           SplitterTopology topology = SplitterTopology::automatic_choice) {
    params.validate();
    const int n = params.users;
    int eve_serial = 0;

    auto state = build_signal_stage(params.source);
    state = detail::lossy_noisy_channel(state, signal_label(), params.link.eta_a,
                                        params.link.eps_a, eve_serial);

    const bool equal_split = params.split_weights.empty();
    const bool can_balance = equal_split && (n & (n - 1)) == 0;
    bool balanced = false;
    switch (topology) {
        case SplitterTopology::automatic_choice: balanced = can_balance; break;
        case SplitterTopology::balanced_tree:
            if (!can_balance) {
                throw std::invalid_argument(
                    "balanced_tree splitter requires an equal power-of-two split");
            }
            balanced = true;
            break;
        case SplitterTopology::sequential: balanced = false; break;
    }
    std::vector<double> weights(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) weights[static_cast<std::size_t>(l)] = params.split_weight(l);
    std::vector<ModeLabel> arms;
    state = detail::split_cascade(std::move(state), signal_label(), weights, balanced, arms);

    std::vector<ModeLabel> keep{alice_x_label(), alice_p_label()};
    for (int l = 0; l < n; ++l) {
        const auto i = static_cast<std::size_t>(l);
        state = relabel(state, arms[i], user_label(l));
        state = detail::lossy_noisy_channel(state, user_label(l), params.link.eta_b[i],
                                            params.link.eps_b[i], eve_serial);
        keep.push_back(user_label(l));
    }
    return restrict_to(state, keep);
}

/// Trusted detection stage: each user's mode is split into x/p arms, and each
/// arm is coupled to a fresh electronic-noise purification. Output modes per
/// user: (arm x, arm p, noise x, purifier x, noise p, purifier p); the full
/// state has 2 + 6N modes in that canonical order.
inline GaussianState attach_trusted_detectors(const GaussianState& broadcast,
                                              const NetworkParams& params) {
    params.validate();
    auto state = broadcast;
    std::vector<ModeLabel> keep{alice_x_label(), alice_p_label()};
    for (int l = 0; l < params.users; ++l) {
        if (!state.has(user_label(l))) {
            throw std::invalid_argument("broadcast state is missing mode " +
                                        to_string(user_label(l)));
        }
        const ModeLabel het = vacuum_label(1000 + l);
        state = tensor(state, vacuum_state({het}));
        state = beamsplitter(state, user_label(l), het, 0.5);
        state = phase_flip(state, het);
        state = relabel(state, user_label(l), user_label(l, Arm::x));
        state = relabel(state, het, user_label(l, Arm::p));

        const double t = params.tau_eff(l);
        const double v_d = params.purifier_variance(l);
        for (Arm arm : {Arm::x, Arm::p}) {
            const ModeLabel d = detector_noise_label(l, arm), f = purifier_label(l, arm);
            state = tensor(state, tmsv(v_d, d, f));
            state = beamsplitter(state, user_label(l, arm), d, t);
        }
        for (const auto& m : {user_label(l, Arm::x), user_label(l, Arm::p),
                              detector_noise_label(l, Arm::x), purifier_label(l, Arm::x),
                              detector_noise_label(l, Arm::p), purifier_label(l, Arm::p)}) {
            keep.push_back(m);
        }
    }
    return restrict_to(state, keep);
}

/// Full trusted-side state (2 + 6N modes) from physical parameters.
inline GaussianState build_network_state(const NetworkParams& params,
                                         SplitterTopology topology = SplitterTopology::automatic_choice) {
    return attach_trusted_detectors(build_broadcast_state(params, topology), params);
}

/// Closed form of the broadcast state (modes alice_x, alice_p, user 0..N-1):
///  - provider block [[a I, b I], [b I, a I]] with a = (V+1)/2, b = (V-1)/2;
///  - provider-user correlation sqrt(eta_l (V^2-1)/2) * diag(1,-1);
///  - user variance 1 + eta_l (V-1) + eps_l;
///  - user-user correlation sqrt(eta_i eta_j) (V-1), plus the provider-side
///    noise contribution sqrt(w_i eta_b_i w_j eta_b_j) * eps_a when eps_a > 0
///    (w_l the splitter share, 1/N for the equal split).
inline GaussianState broadcast_closed_form(const NetworkParams& params) {
    params.validate();
    const int n = params.users;
    const double v = params.source.modulation_variance + 1.0;
    Matrix g = Matrix::Zero(2 * (2 + n), 2 * (2 + n));
    const double a = (v + 1.0) / 2.0, b = (v - 1.0) / 2.0;
    g.block<2, 2>(0, 0) = a * Matrix::Identity(2, 2);
    g.block<2, 2>(2, 2) = a * Matrix::Identity(2, 2);
    g.block<2, 2>(0, 2) = b * Matrix::Identity(2, 2);
    g.block<2, 2>(2, 0) = b * Matrix::Identity(2, 2);
    Eigen::Matrix2d sz;
    sz << 1.0, 0.0, 0.0, -1.0;
    for (int l = 0; l < n; ++l) {
        const double eta = params.eta_total(l);
        const double eps = params.eps_total(l);
        const Eigen::Index r = 2 * (2 + l);
        const double c = std::sqrt(eta * (v * v - 1.0) / 2.0);
        g.block<2, 2>(0, r) = c * sz;
        g.block<2, 2>(r, 0) = c * sz;
        g.block<2, 2>(2, r) = c * sz;
        g.block<2, 2>(r, 2) = c * sz;
        g.block<2, 2>(r, r) = (1.0 + eta * (v - 1.0) + eps) * Matrix::Identity(2, 2);
        for (int j = 0; j < l; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            const auto ul = static_cast<std::size_t>(l);
            const Eigen::Index rj = 2 * (2 + j);
            double cross = std::sqrt(eta * params.eta_total(j)) * (v - 1.0);
            cross += std::sqrt(params.link.eta_b[ul] * params.split_weight(l) *
                               params.link.eta_b[uj] * params.split_weight(j)) *
                     params.link.eps_a;
            g.block<2, 2>(r, rj) = cross * Matrix::Identity(2, 2);
            g.block<2, 2>(rj, r) = cross * Matrix::Identity(2, 2);
        }
    }
    std::vector<ModeLabel> labels{alice_x_label(), alice_p_label()};
    for (int l = 0; l < n; ++l) labels.push_back(user_label(l));
    return GaussianState(std::move(g), std::move(labels));
}

/// Post-detection variance of one user's measured arm:
/// V_B = 1 + [eta_l (V-1) + eps_l] * tau/2 + nu_l.
inline double user_arm_variance(const NetworkParams& params, int l) {
    const double v = params.source.modulation_variance + 1.0;
    const double s = params.eta_total(l) * (v - 1.0) + params.eps_total(l);
    return 1.0 + params.tau_eff(l) * s / 2.0 + params.detectors.nu[static_cast<std::size_t>(l)];
}

/// Closed form of the 6x6 covariance block (arm, detector noise, purifier)
/// for one arm of user l after detection.
inline Matrix detector_arm_closed_form(const NetworkParams& params, int l) {
    params.validate();
    const double v = params.source.modulation_variance + 1.0;
    const double s = params.eta_total(l) * (v - 1.0) + params.eps_total(l);
    const double t = params.tau_eff(l);
    const double v_d = params.purifier_variance(l);
    const double v_in = 1.0 + s / 2.0;

    const double v_b = t * v_in + (1.0 - t) * v_d;
    const double bd = std::sqrt(t * (1.0 - t)) * (v_d - v_in);
    const double bf = std::sqrt(1.0 - t) * std::sqrt(v_d * v_d - 1.0);
    const double dd = (1.0 - t) * v_in + t * v_d;
    const double df = std::sqrt(t) * std::sqrt(v_d * v_d - 1.0);

    Matrix g = Matrix::Zero(6, 6);
    Eigen::Matrix2d id = Eigen::Matrix2d::Identity(), sz;
    sz << 1.0, 0.0, 0.0, -1.0;
    g.block<2, 2>(0, 0) = v_b * id;
    g.block<2, 2>(2, 2) = dd * id;
    g.block<2, 2>(4, 4) = v_d * id;
    g.block<2, 2>(0, 2) = bd * id;
    g.block<2, 2>(2, 0) = bd * id;
    g.block<2, 2>(0, 4) = bf * sz;
    g.block<2, 2>(4, 0) = bf * sz;
    g.block<2, 2>(2, 4) = df * sz;
    g.block<2, 2>(4, 2) = df * sz;
    return g;
}

/// Measured-arm correlation between two distinct users (x arm with x arm, in
/// the positive sign gauge):
/// sqrt(tau_i tau_j)/2 * [ sqrt(eta_i eta_j) (V-1) + provider-noise term ].
inline double cross_user_correlation(const NetworkParams& params, int i, int j) {
    params.validate();
    if (i == j || i < 0 || j < 0 || i >= params.users || j >= params.users) {
        throw std::invalid_argument("cross_user_correlation requires two distinct user indices");
    }
    const double v = params.source.modulation_variance + 1.0;
    double cross = std::sqrt(params.eta_total(i) * params.eta_total(j)) * (v - 1.0);
    cross += std::sqrt(params.link.eta_b[static_cast<std::size_t>(i)] * params.split_weight(i) *
                       params.link.eta_b[static_cast<std::size_t>(j)] * params.split_weight(j)) *
             params.link.eps_a;
    return std::sqrt(params.tau_eff(i) * params.tau_eff(j)) / 2.0 * cross;
}

}  // namespace cvqpon

#endif  // CVQPON_NETWORK_HPP
