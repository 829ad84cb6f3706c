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

#ifndef CVQPON_PROTOCOLS_HPP
#define CVQPON_PROTOCOLS_HPP

/// @file protocols.hpp
/// Network-level key distribution protocols on top of the key-rate engine:
/// time sharing, untrusted broadcast, trusted (hierarchical) broadcast, the
/// repeaterless upper bound as benchmark, and parameter sweeps.
///
/// Trusted broadcast assigns a trust hierarchy: the user at position k of the
/// realized order counts the detection systems of all users at positions < k
/// as trusted when bounding the eavesdropper's information. The first user's
/// key therefore equals their untrusted key, and totals can only improve.
/// A user that ends up trusting every other user is flagged as UNSAFE in the
/// per-user record: that bound assumes no coalition between the eavesdropper
/// and any other user and may underestimate leakage if that assumption fails.

#include <cvqpon/keyrate.hpp>
#include <cvqpon/network.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvqpon {

enum class Protocol { time_sharing, untrusted_broadcast, trusted_broadcast, plob };

inline std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::time_sharing: return "time_sharing";
        case Protocol::untrusted_broadcast: return "untrusted_broadcast";
        case Protocol::trusted_broadcast: return "trusted_broadcast";
        case Protocol::plob: return "plob";
    }
    return "unknown";
}

/// Strategy for ordering users in the trusted-broadcast hierarchy.
enum class TrustStrategy { ascending_untrusted_key, descending_untrusted_key, explicit_order };

struct TrustOrdering {
    TrustStrategy strategy = TrustStrategy::ascending_untrusted_key;
    std::vector<int> explicit_order;  ///< used only with TrustStrategy::explicit_order

    static TrustOrdering ascending() { return {}; }
    static TrustOrdering descending() {
        return {TrustStrategy::descending_untrusted_key, {}};
    }
    static TrustOrdering explicit_users(std::vector<int> order) {
        return {TrustStrategy::explicit_order, std::move(order)};
    }
};

/// Result of evaluating one protocol on one network.
struct ProtocolResult {
    Protocol protocol = Protocol::untrusted_broadcast;
    std::vector<UserKeyRecord> per_user;   ///< keys in bits/symbol, user-indexed
    double total_key_per_symbol = 0.0;
    double total_throughput_bits_per_s = 0.0;  ///< filled by apply_throughput
    std::vector<int> realized_order;       ///< trust hierarchy actually used
    std::vector<double> beta;              ///< per-user reconciliation efficiency
    bool unbounded = false;                ///< benchmark diverges (lossless link)
};

/// Repeaterless secret-key capacity benchmark of a pure-loss channel with
/// transmittance eta: -log2(1 - eta) bits per use. Returns +infinity for
/// eta = 1 (callers report this as "unbounded").
inline double plob_bound(double eta_total) {
    if (!(eta_total > 0.0 && eta_total <= 1.0)) {
        throw std::invalid_argument("plob_bound requires eta in (0,1]");
    }
    if (eta_total == 1.0) return std::numeric_limits<double>::infinity();
    return -std::log2(1.0 - eta_total);
}

/// bits/s from bits/symbol: key * symbol_rate * (1 - frame_error_rate).
inline double throughput(double key_per_symbol, double symbol_rate_hz, double fer) {
    if (fer < 0.0 || fer > 1.0) throw std::invalid_argument("fer must lie in [0,1]");
    if (symbol_rate_hz < 0.0) throw std::invalid_argument("symbol_rate must be >= 0");
    return key_per_symbol * symbol_rate_hz * (1.0 - fer);
}

namespace detail {

inline std::vector<double> expand_beta(const std::vector<double>& beta, int n) {
    std::vector<double> out;
    if (beta.size() == 1) {
        out.assign(static_cast<std::size_t>(n), beta[0]);
    } else if (static_cast<int>(beta.size()) == n) {
        out = beta;
    } else {
        throw std::invalid_argument("beta must be a scalar or have one entry per user");
    }
    for (double b : out) {
        if (b < 0.0 || b > 1.0) throw std::invalid_argument("beta must lie in [0,1]");
    }
    return out;
}

/// Untrusted per-user (i_ab, holevo) pairs, using the uniform fast path when
/// available; the full state is built at most once.
struct EngineCache {
    const NetworkParams& params;
    bool uniform;
    std::optional<GaussianState> full;

    explicit EngineCache(const NetworkParams& p)
        : params(p), uniform(p.users >= 2 && p.has_uniform_users()) {}

    const GaussianState& state() {
        if (!full) full = build_network_state(params);
        return *full;
    }

    double holevo(int user, const std::vector<int>& trusted) {
        if (uniform) {
            return holevo_bound_uniform(params, static_cast<int>(trusted.size()));
        }
        TrustPartition part{user, trusted};
        return holevo_bound(state(), part);
    }
};

inline UserKeyRecord make_record(const NetworkParams& params, int user, double beta, double chi,
                                 int trusted_count) {
    UserKeyRecord rec;
    rec.user = user;
    rec.snr = snr_arm(params, user);
    rec.i_ab = mutual_information_ab(params, user);
    rec.holevo = chi;
    rec.key_per_symbol = std::max(0.0, beta * rec.i_ab - chi);
    rec.trusted_count = trusted_count;
    rec.unsafe_all_trusted = params.users >= 2 && trusted_count == params.users - 1;
    return rec;
}

}  // namespace detail

/// Untrusted broadcast: every user distills a key assuming all other users'
/// modes belong to the eavesdropper; the network total is the sum.
inline ProtocolResult untrusted_total(const NetworkParams& params,
                                      const std::vector<double>& beta) {
    params.validate();
    const auto betas = detail::expand_beta(beta, params.users);
    detail::EngineCache cache(params);
    ProtocolResult out;
    out.protocol = Protocol::untrusted_broadcast;
    out.beta = betas;
    double chi_uniform = 0.0;
    if (cache.uniform) chi_uniform = cache.holevo(0, {});
    for (int l = 0; l < params.users; ++l) {
        const double chi = cache.uniform ? chi_uniform : cache.holevo(l, {});
        out.per_user.push_back(
            detail::make_record(params, l, betas[static_cast<std::size_t>(l)], chi, 0));
        out.total_key_per_symbol += out.per_user.back().key_per_symbol;
    }
    return out;
}

/// Trusted broadcast with a hierarchical trust order: the user at position k
/// of the realized order trusts the detection systems of all users at earlier
/// positions. Ascending/descending strategies sort by untrusted key (ties
/// broken by user index, so the ordering is deterministic).
inline ProtocolResult trusted_total(const NetworkParams& params, const std::vector<double>& beta,
                                    const TrustOrdering& ordering = TrustOrdering::ascending()) {
    params.validate();
    const int n = params.users;
    const auto betas = detail::expand_beta(beta, n);
    detail::EngineCache cache(params);

    std::vector<int> order(static_cast<std::size_t>(n));
    if (ordering.strategy == TrustStrategy::explicit_order) {
        order = ordering.explicit_order;
        if (static_cast<int>(order.size()) != n) {
            throw std::invalid_argument("explicit trust order must list every user once");
        }
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        for (int u : order) {
            if (u < 0 || u >= n || seen[static_cast<std::size_t>(u)]) {
                throw std::invalid_argument("explicit trust order must be a permutation of users");
            }
            seen[static_cast<std::size_t>(u)] = true;
        }
    } else {
        std::vector<double> untrusted_key(static_cast<std::size_t>(n));
        double chi0 = 0.0;
        if (cache.uniform) chi0 = cache.holevo(0, {});
        for (int l = 0; l < n; ++l) {
            const double chi = cache.uniform ? chi0 : cache.holevo(l, {});
            untrusted_key[static_cast<std::size_t>(l)] =
                std::max(0.0, betas[static_cast<std::size_t>(l)] *
                                      mutual_information_ab(params, l) -
                                  chi);
        }
        std::iota(order.begin(), order.end(), 0);
        const bool asc = ordering.strategy == TrustStrategy::ascending_untrusted_key;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            const double ka = untrusted_key[static_cast<std::size_t>(a)];
            const double kb = untrusted_key[static_cast<std::size_t>(b)];
            if (ka != kb) return asc ? ka < kb : ka > kb;
            return a < b;
        });
    }

    ProtocolResult out;
    out.protocol = Protocol::trusted_broadcast;
    out.beta = betas;
    out.realized_order = order;
    out.per_user.resize(static_cast<std::size_t>(n));
    std::vector<int> trusted;
    for (int pos = 0; pos < n; ++pos) {
        const int user = order[static_cast<std::size_t>(pos)];
        const double chi = cache.holevo(user, trusted);
        out.per_user[static_cast<std::size_t>(user)] = detail::make_record(
            params, user, betas[static_cast<std::size_t>(user)], chi, pos);
        out.total_key_per_symbol += out.per_user[static_cast<std::size_t>(user)].key_per_symbol;
        trusted.push_back(user);
    }
    return out;
}

/// Time sharing: one user at a time runs the untrusted protocol through the
/// same passive splitter; the network total equals that single user's key and
/// each user receives an equal 1/N time share of it. Asymmetric populations
/// must designate which user's parameters define the rate.
inline ProtocolResult time_sharing_total(const NetworkParams& params,
                                         const std::vector<double>& beta,
                                         std::optional<int> designated_user = std::nullopt) {
    params.validate();
    const int n = params.users;
    const auto betas = detail::expand_beta(beta, n);
    int user = 0;
    if (designated_user) {
        user = *designated_user;
        if (user < 0 || user >= n) throw std::invalid_argument("designated user out of range");
    } else if (!params.has_uniform_users()) {
        throw std::invalid_argument(
            "time_sharing_total requires uniform users or a designated user");
    }
    detail::EngineCache cache(params);
    const double chi = cache.holevo(user, {});
    const auto rec = detail::make_record(params, user, betas[static_cast<std::size_t>(user)], chi, 0);

    ProtocolResult out;
    out.protocol = Protocol::time_sharing;
    out.beta = betas;
    out.total_key_per_symbol = rec.key_per_symbol;
    for (int l = 0; l < n; ++l) {
        UserKeyRecord share = rec;
        share.user = l;
        share.key_per_symbol = rec.key_per_symbol / n;
        out.per_user.push_back(share);
    }
    return out;
}

/// Benchmark row: per-user repeaterless bound at each user's end-to-end
/// transmittance; the total sums the per-user bounds.
inline ProtocolResult plob_benchmark(const NetworkParams& params) {
    params.validate();
    ProtocolResult out;
    out.protocol = Protocol::plob;
    for (int l = 0; l < params.users; ++l) {
        UserKeyRecord rec;
        rec.user = l;
        rec.key_per_symbol = plob_bound(params.eta_total(l));
        out.per_user.push_back(rec);
        out.total_key_per_symbol += rec.key_per_symbol;
        if (std::isinf(rec.key_per_symbol)) out.unbounded = true;
    }
    return out;
}

/// Fill throughput fields from a symbol rate and per-user frame error rates
/// (scalar broadcasts; time sharing divides the symbol budget implicitly via
/// its per-user key shares).
inline void apply_throughput(ProtocolResult& result, double symbol_rate_hz,
                             const std::vector<double>& fer) {
    std::vector<double> fers;
    const int n = static_cast<int>(result.per_user.size());
    if (fer.empty()) {
        fers.assign(static_cast<std::size_t>(n), 0.0);
    } else if (fer.size() == 1) {
        fers.assign(static_cast<std::size_t>(n), fer[0]);
    } else if (static_cast<int>(fer.size()) == n) {
        fers = fer;
    } else {
        throw std::invalid_argument("fer must be empty, a scalar, or one entry per user");
    }
    result.total_throughput_bits_per_s = 0.0;
    for (auto& rec : result.per_user) {
        rec.throughput_bits_per_s =
            throughput(rec.key_per_symbol, symbol_rate_hz, fers[static_cast<std::size_t>(rec.user)]);
        result.total_throughput_bits_per_s += rec.throughput_bits_per_s;
    }
}

/// --- Parameter sweeps ------------------------------------------------------

enum class SweepAxis { channel_loss_db, users_n, modulation_variance };

inline std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::channel_loss_db: return "channel_loss_db";
        case SweepAxis::users_n: return "users_n";
        case SweepAxis::modulation_variance: return "modulation_variance";
    }
    return "unknown";
}

/// Optional linear scaling of branch excess noise with modulation variance,
/// eps_b = base + slope * V_mod, applied on the modulation-variance axis.
struct EpsilonModel {
    double base = 0.0;
    double slope = 0.0;
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::channel_loss_db;
    std::vector<double> grid;  ///< monotone axis values (user counts for users_n)
    std::vector<double> beta{1.0};
    TrustOrdering ordering;
    std::optional<EpsilonModel> epsilon_model;  ///< modulation axis only
};

/// One evaluated grid point.
struct SweepPoint {
    double axis_value = 0.0;
    int users = 0;
    ProtocolResult time_sharing;
    ProtocolResult untrusted;
    ProtocolResult trusted;
    ProtocolResult plob;
};

namespace detail {

inline NetworkParams at_grid_point(const NetworkParams& base, SweepAxis axis, double value,
                                   const std::optional<EpsilonModel>& eps_model) {
    NetworkParams p = base;
    switch (axis) {
        case SweepAxis::channel_loss_db: {
            // Axis value is the total provider-to-user channel loss in dB
            // (splitter excluded); the provider segment is kept and the
            // branch transmittance absorbs the remainder.
            const double eta_product = std::pow(10.0, -value / 10.0);
            const double eta_b = eta_product / p.link.eta_a;
            if (eta_b <= 0.0 || eta_b > 1.0 + 1e-12) {
                throw std::invalid_argument(
                    "channel_loss_db grid point below the provider segment's own loss");
            }
            p.link.eta_b.assign(p.link.eta_b.size(), std::min(eta_b, 1.0));
            break;
        }
        case SweepAxis::users_n: {
            const int n = static_cast<int>(std::lround(value));
            if (n < 1 || std::abs(value - n) > 1e-9) {
                throw std::invalid_argument("users_n grid points must be positive integers");
            }
            if (!base.has_uniform_users()) {
                throw std::invalid_argument("users_n sweeps require a uniform user template");
            }
            p.users = n;
            p.split_weights.clear();
            p.link.eta_b.assign(static_cast<std::size_t>(n), base.link.eta_b[0]);
            p.link.eps_b.assign(static_cast<std::size_t>(n), base.link.eps_b[0]);
            p.detectors.tau.assign(static_cast<std::size_t>(n), base.detectors.tau[0]);
            p.detectors.nu.assign(static_cast<std::size_t>(n), base.detectors.nu[0]);
            break;
        }
        case SweepAxis::modulation_variance: {
            if (value < 0.0) throw std::invalid_argument("modulation_variance must be >= 0");
            p.source.modulation_variance = value;
            if (eps_model) {
                const double eps = eps_model->base + eps_model->slope * value;
                if (eps < 0.0) throw std::invalid_argument("epsilon model produced eps < 0");
                p.link.eps_b.assign(p.link.eps_b.size(), eps);
            }
            break;
        }
    }
    p.validate();
    return p;
}

}  // namespace detail

/// Evaluate all protocols over a monotone grid. Grid points are independent;
/// results are returned in grid order regardless of evaluation order.
inline std::vector<SweepPoint> sweep(const NetworkParams& base, const SweepSpec& spec) {
    base.validate();
    if (spec.grid.empty()) throw std::invalid_argument("sweep grid must be non-empty");
    for (std::size_t i = 1; i < spec.grid.size(); ++i) {
        if ((spec.grid[i] - spec.grid[i - 1]) * (spec.grid[1] - spec.grid[0]) < 0.0 ||
            spec.grid[i] == spec.grid[i - 1]) {
            throw std::invalid_argument("sweep grid must be strictly monotone");
        }
    }
    std::vector<SweepPoint> out(spec.grid.size());
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        const double value = spec.grid[i];
        const auto p = detail::at_grid_point(base, spec.axis, value, spec.epsilon_model);
        std::vector<double> beta = spec.beta;
        if (spec.axis == SweepAxis::users_n && beta.size() > 1) {
            beta.assign(1, beta[0]);  // per-user vectors cannot follow a changing N
        }
        SweepPoint& row = out[i];
        row.axis_value = value;
        row.users = p.users;
        row.untrusted = untrusted_total(p, beta);
        row.trusted = trusted_total(p, beta, spec.ordering);
        row.time_sharing = p.has_uniform_users()
                               ? time_sharing_total(p, beta)
                               : time_sharing_total(p, beta, 0);
        row.plob = plob_benchmark(p);
    }
    return out;
}

}  // namespace cvqpon

#endif  // CVQPON_PROTOCOLS_HPP
