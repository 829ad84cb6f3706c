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

#ifndef CVQPON_KEYRATE_HPP
#define CVQPON_KEYRATE_HPP

/// @file keyrate.hpp
/// Mutual informations, Holevo bounds under a trust partition, and the
/// resulting asymptotic secret key rates.
///
/// Information counting convention: the protocol encodes independent
/// Gaussians in both quadratures and the receiver measures both (heterodyne).
/// All per-symbol quantities therefore count both quadrature arms: the
/// provider-user mutual information is log2(1 + SNR_arm) per symbol, and the
/// Holevo bound conditions on both of the reference user's measured arms
/// (homodyne-x on the x arm, then homodyne-p on the p arm; the order is
/// immaterial and asserted elsewhere).
///
/// Security model: everything not explicitly trusted purifies the state for
/// the eavesdropper. Since the global state (including all channel ancillas)
/// is pure, S(E) equals the entropy of the trusted subsystem, so the bound is
/// evaluated entirely on trusted-side restrictions.

#include <cvqpon/gaussian.hpp>
#include <cvqpon/network.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvqpon {

/// Which users' detection systems are withheld from the eavesdropper when
/// bounding her information about the reference user's measurement.
struct TrustPartition {
    int reference_user = 0;
    std::vector<int> trusted_users;  ///< other users whose modes Eve does not hold

    void validate(int n_users) const {
        if (reference_user < 0 || reference_user >= n_users) {
            throw std::invalid_argument("reference_user out of range");
        }
        std::set<int> seen;
        for (int t : trusted_users) {
            if (t < 0 || t >= n_users) throw std::invalid_argument("trusted user index out of range");
            if (t == reference_user) {
                throw std::invalid_argument("reference_user must not appear in trusted_users");
            }
            if (!seen.insert(t).second) throw std::invalid_argument("duplicate trusted user index");
        }
    }

    bool all_others_trusted(int n_users) const {
        return static_cast<int>(trusted_users.size()) == n_users - 1;
    }

    static TrustPartition untrusted(int reference) { return TrustPartition{reference, {}}; }
};

/// Per-user entry of a key-rate evaluation.
struct UserKeyRecord {
    int user = 0;
    double snr = 0.0;                      ///< measured-arm signal-to-noise ratio
    double i_ab = 0.0;                     ///< provider-user MI, bits/symbol
    double holevo = 0.0;                   ///< Holevo bound, bits/symbol
    double key_per_symbol = 0.0;           ///< max(0, beta*i_ab - holevo)
    double throughput_bits_per_s = 0.0;    ///< key * symbol rate * (1 - FER)
    int trusted_count = 0;                 ///< size of the trusted set used
    bool unsafe_all_trusted = false;       ///< true when every other user was trusted
    std::vector<std::pair<int, double>> i_users;  ///< optional pairwise user-user MI
};

/// Aggregate of per-user results plus network totals.
struct KeyRateReport {
    std::vector<UserKeyRecord> users;
    double total_key_per_symbol = 0.0;
    double total_throughput_bits_per_s = 0.0;
};

/// Signal-to-noise ratio of user l's measured arm:
/// (eta_l * tau/2 * (V-1)) / (1 + nu_l + eps_l * tau/2).
inline double snr_arm(const NetworkParams& params, int l) {
    params.validate();
    if (l < 0 || l >= params.users) throw std::invalid_argument("user index out of range");
    const double v_mod = params.source.modulation_variance;
    const double half_tau = params.tau_eff(l) / 2.0;
    const double signal = params.eta_total(l) * half_tau * v_mod;
    const double noise = 1.0 + params.detectors.nu[static_cast<std::size_t>(l)] +
                         params.eps_total(l) * half_tau;
    return signal / noise;
}

/// Provider-user mutual information in bits per symbol (both quadratures):
/// 2 * (1/2) log2(1 + SNR_arm).
inline double mutual_information_ab(const NetworkParams& params, int l) {
    return std::log2(1.0 + snr_arm(params, l));
}

/// Pairwise user-user mutual information of the measured x arms, in bits:
/// (1/2) log2[ V_i / (V_i - C_ij^2 / V_j) ].
inline double mutual_information_users(const NetworkParams& params, int i, int j) {
    const double c = cross_user_correlation(params, i, j);
    const double vi = user_arm_variance(params, i);
    const double vj = user_arm_variance(params, j);
    const double conditional = vi - c * c / vj;
    if (conditional <= 0.0) {
        throw std::runtime_error("non-positive conditional variance in user-user MI");
    }
    return 0.5 * std::log2(vi / conditional);
}

namespace detail {

inline std::vector<ModeLabel> user_mode_labels(int l) {
    return {user_label(l, Arm::x),          user_label(l, Arm::p),
            detector_noise_label(l, Arm::x), purifier_label(l, Arm::x),
            detector_noise_label(l, Arm::p), purifier_label(l, Arm::p)};
}

/// chi = S(trusted) - S(trusted | reference user's heterodyne outcomes).
inline double holevo_from_trusted(const GaussianState& trusted, int reference) {
    const double before = von_neumann_entropy(trusted);
    auto conditioned = condition_on_homodyne(trusted, user_label(reference, Arm::x), Arm::x);
    conditioned = condition_on_homodyne(conditioned, user_label(reference, Arm::p), Arm::p);
    const double after = von_neumann_entropy(conditioned);
    double chi = before - after;
    if (chi < 0.0 && chi > -1e-9) chi = 0.0;  // numerical round-off only
    return chi;
}

}  // namespace detail

/// Holevo bound on Eve's information about the reference user's measurement,
/// evaluated on a full post-detection state (2 + 6N modes). The trusted
/// subsystem comprises the provider's two modes, the reference user's six
/// modes, and the six modes of every user in the trusted set; its entropy
/// equals S(E) by purity of the global state.
inline double holevo_bound(const GaussianState& full_state, const TrustPartition& partition) {
    std::vector<ModeLabel> keep{alice_x_label(), alice_p_label()};
    for (const auto& m : detail::user_mode_labels(partition.reference_user)) keep.push_back(m);
    std::vector<int> trusted = partition.trusted_users;
    std::sort(trusted.begin(), trusted.end());
    for (int t : trusted) {
        if (t == partition.reference_user) {
            throw std::invalid_argument("reference_user must not appear in trusted_users");
        }
        for (const auto& m : detail::user_mode_labels(t)) keep.push_back(m);
    }
    const auto trusted_state = restrict_to(full_state, keep);  // throws on missing modes
    return detail::holevo_from_trusted(trusted_state, partition.reference_user);
}

/// Holevo bound directly from physical parameters.
inline double holevo_bound(const NetworkParams& params, const TrustPartition& partition) {
    partition.validate(params.users);
    return holevo_bound(build_network_state(params), partition);
}

/// Devetak-Winter rate from a prebuilt post-detection state.
inline double key_rate(const GaussianState& full_state, const NetworkParams& params,
                       const TrustPartition& partition, double beta) {
    if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("beta must lie in [0,1]");
    partition.validate(params.users);
    const double i_ab = mutual_information_ab(params, partition.reference_user);
    const double chi = holevo_bound(full_state, partition);
    return std::max(0.0, beta * i_ab - chi);
}

/// Devetak-Winter rate max(0, beta * I_AB - chi) for user l in bits/symbol.
inline double key_rate(const NetworkParams& params, int l, const TrustPartition& partition,
                       double beta) {
    if (l != partition.reference_user) {
        throw std::invalid_argument("user index must match partition.reference_user");
    }
    return key_rate(build_network_state(params), params, partition, beta);
}

inline double key_rate(const NetworkParams& params, const TrustPartition& partition, double beta) {
    return key_rate(params, partition.reference_user, partition, beta);
}

/// --- Uniform-population fast path -----------------------------------------
///
/// When every user shares identical branch and detector parameters, the
/// trusted users other than the reference are exchangeable. An orthogonal
/// mode mixing splits them into one symmetric collective block plus k-1
/// difference blocks; the difference blocks decouple from the provider, the
/// reference user, and the symmetric block, and are untouched by the
/// reference user's measurement, so they cancel between the two entropies.
/// The bound therefore reduces to a fixed-size computation on
/// [provider (2), reference (6), symmetric collective (6)] modes whose cost
/// is independent of both N and the trusted count.
///
/// The required blocks (user marginal U, user-user cross W, provider-user
/// cross X) are extracted from a matched two-user network that reproduces
/// every pairwise moment of the N-user one exactly: eta_b' = 2 eta_b / N with
/// the same eps_b, tau, nu, provider segment, and modulation.

/// Holevo bound for a uniform network with `trusted_others` trusted users
/// besides the reference (0 <= trusted_others <= N-1). Requires N >= 2.
inline double holevo_bound_uniform(const NetworkParams& params, int trusted_others) {
    params.validate();
    if (params.users < 2) throw std::invalid_argument("uniform fast path requires users >= 2");
    if (!params.has_uniform_users()) {
        throw std::invalid_argument("uniform fast path requires identical user parameters");
    }
    if (trusted_others < 0 || trusted_others >= params.users) {
        throw std::invalid_argument("trusted_others must lie in [0, users-1]");
    }

    NetworkParams matched = params;
    matched.users = 2;
    const double eta_b_matched = 2.0 * params.link.eta_b[0] / params.users;
    matched.link.eta_b.assign(2, eta_b_matched);
    matched.link.eps_b.assign(2, params.link.eps_b[0]);
    matched.detectors.tau.assign(2, params.detectors.tau[0]);
    matched.detectors.nu.assign(2, params.detectors.nu[0]);

    std::vector<ModeLabel> order{alice_x_label(), alice_p_label()};
    for (const auto& m : detail::user_mode_labels(0)) order.push_back(m);
    for (const auto& m : detail::user_mode_labels(1)) order.push_back(m);
    const Matrix g = restrict_to(build_network_state(matched), order).cov();

    const Matrix a_block = g.topLeftCorner(4, 4);
    const Matrix x_block = g.block(0, 4, 4, 12);   // provider <-> user
    const Matrix u_block = g.block(4, 4, 12, 12);  // user marginal
    Matrix w_block = g.block(4, 16, 12, 12);       // user <-> user
    w_block = ((w_block + w_block.transpose()) / 2.0).eval();

    const int k = trusted_others;
    std::vector<ModeLabel> labels{alice_x_label(), alice_p_label()};
    for (const auto& m : detail::user_mode_labels(0)) labels.push_back(m);
    Matrix central;
    if (k == 0) {
        central = g.topLeftCorner(16, 16);
    } else {
        const double rk = std::sqrt(static_cast<double>(k));
        central = Matrix::Zero(28, 28);
        central.topLeftCorner(4, 4) = a_block;
        central.block(0, 4, 4, 12) = x_block;
        central.block(4, 0, 12, 4) = x_block.transpose();
        central.block(4, 4, 12, 12) = u_block;
        central.block(0, 16, 4, 12) = rk * x_block;
        central.block(16, 0, 12, 4) = rk * x_block.transpose();
        central.block(4, 16, 12, 12) = rk * w_block;
        central.block(16, 4, 12, 12) = rk * w_block;
        central.block(16, 16, 12, 12) = u_block + (k - 1) * w_block;
        for (const auto& m : detail::user_mode_labels(1)) labels.push_back(m);
    }
    return detail::holevo_from_trusted(GaussianState(std::move(central), std::move(labels)), 0);
}

/// Devetak-Winter rate via the uniform fast path.
inline double key_rate_uniform(const NetworkParams& params, int trusted_others, double beta) {
    if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("beta must lie in [0,1]");
    const double i_ab = mutual_information_ab(params, 0);
    const double chi = holevo_bound_uniform(params, trusted_others);
    return std::max(0.0, beta * i_ab - chi);
}

}  // namespace cvqpon

#endif  // CVQPON_KEYRATE_HPP
