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

/**
 * @file estimation.hpp
 * @brief Monte Carlo prepare-and-measure simulation, moment-based parameter
 *        estimation with Gaussian confidence intervals, worst-case key
 *        evaluation, and empirical correlation analysis.
 *
 * The simulator draws Alice's per-quadrature modulation symbols and each
 * user's heterodyne outcomes from the same Gaussian model whose second
 * moments the network covariance matrices describe: per user l and
 * quadrature q, meas = sqrt(eta_l*tau_l/2)*alice_q + xi with
 * Var(xi) = 1 + nu_l + (tau_l/2)*eps_l. All randomness is derived
 * deterministically from a single 64-bit seed; every (seed, stream) pair
 * yields a bitwise-reproducible sequence on every platform.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "keyrate.hpp"
#include "network.hpp"

namespace cvqpon {

// ---------------------------------------------------------------------------
// Deterministic Gaussian stream
// ---------------------------------------------------------------------------

namespace detail {

/// SplitMix64 step; used to derive decorrelated per-stream seeds from a
/// master seed. Constants from the reference implementation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seed for logical stream `stream_id` of master seed `seed`. Streams are
/// statistically independent (distinct SplitMix64 outputs feeding distinct
/// mt19937_64 engines).
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t s = seed;
    // advance the splitmix state by the stream id so streams do not collide
    s ^= 0xd1b54a32d192ed03ull * (stream_id + 1);
    return splitmix64(s);
}

}  // namespace detail

/**
 * Deterministic standard-normal generator: mt19937_64 + Box-Muller.
 *
 * std::normal_distribution is implementation-defined, so the transform is
 * done by hand to guarantee identical output across standard libraries.
 * Doubles are drawn as 53-bit uniforms in (0,1].
 */
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : engine_(detail::stream_seed(seed, stream_id)) {}

    /// One standard-normal variate.
    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] so std::log is finite; u2 in [0,1)
        const double u1 =
            (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        constexpr double two_pi = 6.283185307179586476925286766559;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = two_pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Fill `n` variates scaled by `sigma`.
    void fill(std::vector<double>& out, std::size_t n, double sigma) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = sigma * (*this)();
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// One simulated prepare-and-measure run: Alice's modulation symbols and
/// every user's heterodyne outcomes, all in shot-noise units.
struct SampleBatch {
    std::vector<double> alice_x;  ///< modulation symbols, x quadrature
    std::vector<double> alice_p;  ///< modulation symbols, p quadrature
    /// per-user heterodyne outcomes; meas_x[l][k] is user l, round k
    std::vector<std::vector<double>> meas_x;
    std::vector<std::vector<double>> meas_p;
    std::uint64_t rng_seed = 0;
    NetworkParams ground_truth;

    std::size_t rounds() const { return alice_x.size(); }

    /// CSV serialization with fixed column order: alice_x, alice_p, then
    /// per-user (meas_x, meas_p) pairs. Header row documents units (SNU).
    void write_csv(std::ostream& os) const {
        os << "alice_x_snu,alice_p_snu";
        for (std::size_t l = 0; l < meas_x.size(); ++l) {
            os << ",user" << l << "_meas_x_snu,user" << l << "_meas_p_snu";
        }
        os << "\n";
        os.precision(17);
        for (std::size_t k = 0; k < rounds(); ++k) {
            os << alice_x[k] << ',' << alice_p[k];
            for (std::size_t l = 0; l < meas_x.size(); ++l) {
                os << ',' << meas_x[l][k] << ',' << meas_p[l][k];
            }
            os << "\n";
        }
    }
};

/// Point estimate with a symmetric Gaussian confidence interval.
struct EstimateWithCI {
    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double z = 6.5;        ///< standard-deviation multiplier
    double delta = 0.0;    ///< two-sided Gaussian failure probability for z

    bool contains(double value) const { return lower <= value && value <= upper; }
    double half_width() const { return 0.5 * (upper - lower); }
};

/// Two-sided Gaussian tail probability for a z-sigma interval.
inline double gaussian_failure_probability(double z) {
    return std::erfc(z / std::sqrt(2.0));
}

/// Default confidence multiplier: 6.5 sigma, failure probability ~8e-11.
inline constexpr double kDefaultConfidenceZ = 6.5;

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

/**
 * Simulate `rounds` prepare-and-measure rounds of the network.
 *
 * Alice's symbols are zero-mean Gaussians of variance V_mod per quadrature
 * (stream 0). User l's heterodyne outcome in each quadrature is
 * sqrt(eta_l*tau_l/2)*alice + xi, where xi is an independent Gaussian of
 * variance 1 + nu_l + (tau_l/2)*eps_l (stream l+1), so empirical second
 * moments converge to the detector-stage closed forms: Var(meas) ->
 * user_arm_variance(params, l) and Cov(alice, meas) -> sqrt(eta*tau/2)*V_mod.
 *
 * Identical (params, rounds, seed) triples produce bitwise-identical batches.
 */
inline SampleBatch simulate_channel(const NetworkParams& params,
                                    std::size_t rounds, std::uint64_t seed) {
    params.validate();
    if (rounds < 1) {
        throw std::invalid_argument("simulate_channel: rounds must be >= 1");
    }
    SampleBatch batch;
    batch.rng_seed = seed;
    batch.ground_truth = params;

    const double sigma_mod = std::sqrt(params.source.modulation_variance);
    GaussianStream alice_stream(seed, 0);
    batch.alice_x.resize(rounds);
    batch.alice_p.resize(rounds);
    for (std::size_t k = 0; k < rounds; ++k) {
        batch.alice_x[k] = sigma_mod * alice_stream();
        batch.alice_p[k] = sigma_mod * alice_stream();
    }

    const int n = params.users;
    batch.meas_x.resize(n);
    batch.meas_p.resize(n);
    for (int l = 0; l < n; ++l) {
        const double tau = params.detectors.tau[static_cast<std::size_t>(l)];
        const double gain = std::sqrt(params.eta_total(l) * tau / 2.0);
        const double noise_var =
            1.0 + params.detectors.nu[static_cast<std::size_t>(l)] +
            (tau / 2.0) * params.eps_total(l);
        const double sigma_noise = std::sqrt(noise_var);
        GaussianStream noise_stream(seed, static_cast<std::uint64_t>(l) + 1);
        auto& mx = batch.meas_x[static_cast<std::size_t>(l)];
        auto& mp = batch.meas_p[static_cast<std::size_t>(l)];
        mx.resize(rounds);
        mp.resize(rounds);
        for (std::size_t k = 0; k < rounds; ++k) {
            mx[k] = gain * batch.alice_x[k] + sigma_noise * noise_stream();
            mp[k] = gain * batch.alice_p[k] + sigma_noise * noise_stream();
        }
    }
    return batch;
}

// ---------------------------------------------------------------------------
// Moment statistics
// ---------------------------------------------------------------------------

namespace detail {

inline void check_same_length(const std::vector<double>& a,
                              const std::vector<double>& b, const char* where) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(where) +
                                    ": arrays must have equal length");
    }
    if (a.empty()) {
        throw std::invalid_argument(std::string(where) + ": arrays are empty");
    }
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Unbiased sample variance (divisor M-1; M=1 returns 0).
inline double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

/// Unbiased sample covariance (divisor M-1).
inline double sample_covariance(const std::vector<double>& a,
                                const std::vector<double>& b) {
    check_same_length(a, b, "sample_covariance");
    if (a.size() < 2) return 0.0;
    const double ma = mean(a), mb = mean(b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - ma) * (b[i] - mb);
    }
    return s / static_cast<double>(a.size() - 1);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parameter estimation
// ---------------------------------------------------------------------------

/// Trusted receiver calibration constants used when inverting measured
/// moments back to channel parameters.
struct ReceiverCalibration {
    double tau = 1.0;  ///< detector efficiency, in (0, 1]
    double nu = 0.0;   ///< electronic noise per quadrature, SNU, >= 0
};

/// Channel-parameter estimates for one user quadrature.
struct ChannelEstimates {
    EstimateWithCI eta_hat;  ///< channel transmittance estimate
    EstimateWithCI eps_hat;  ///< excess noise estimate, channel output, SNU
    double gain_hat = 0.0;   ///< raw least-squares gain Cov(y,a)/Var(a)
    double residual_variance = 0.0;  ///< Var(y - gain_hat*a)
};

/**
 * Least-squares residuals xi_k = meas_k − g_hat·alice_k with
 * g_hat = Cov(meas, alice)/Var(alice). By construction the residuals are
 * exactly uncorrelated with the symbols (up to floating-point round-off).
 */
inline std::vector<double> infer_noise(const std::vector<double>& meas,
                                       const std::vector<double>& alice) {
    detail::check_same_length(meas, alice, "infer_noise");
    const double var_a = detail::sample_variance(alice);
    if (!(var_a > 0.0)) {
        throw std::invalid_argument("infer_noise: alice variance is zero");
    }
    const double g = detail::sample_covariance(meas, alice) / var_a;
    std::vector<double> xi(meas.size());
    for (std::size_t k = 0; k < meas.size(); ++k) {
        xi[k] = meas[k] - g * alice[k];
    }
    return xi;
}

/**
 * Method-of-moments channel estimation from one quadrature's symbol/outcome
 * pair, given trusted receiver calibration (tau, nu).
 *
 *   g_hat  = Cov(meas, alice)/Var(alice)      (least squares)
 *   eta_hat= 2·g_hat²/tau                     (inverting gain = sqrt(eta·tau/2))
 *   eps_hat= (Var(xi) − 1 − nu)·2/tau         (inverting the residual model)
 *
 * Confidence intervals are Gaussian with multiplier z (default 6.5):
 *   SE(g_hat)  = sqrt(Var(xi)/((M−1)·Var(alice)))
 *   SE(eta_hat)= (4|g_hat|/tau)·SE(g_hat)            (delta method)
 *   SE(Var(xi))= Var(xi)·sqrt(2/(M−1))               (Gaussian fourth moment)
 *   SE(eps_hat)= (2/tau)·SE(Var(xi))
 */
inline ChannelEstimates estimate_parameters(const std::vector<double>& alice,
                                            const std::vector<double>& meas,
                                            const ReceiverCalibration& calib,
                                            double z = kDefaultConfidenceZ) {
    detail::check_same_length(alice, meas, "estimate_parameters");
    const std::size_t m = alice.size();
    if (m < 1000) {
        throw std::invalid_argument(
            "estimate_parameters: need at least 1000 samples for the "
            "confidence-interval method");
    }
    if (!(calib.tau > 0.0 && calib.tau <= 1.0)) {
        throw std::invalid_argument("estimate_parameters: tau must be in (0,1]");
    }
    if (!(calib.nu >= 0.0)) {
        throw std::invalid_argument("estimate_parameters: nu must be >= 0");
    }
    const double var_a = detail::sample_variance(alice);
    if (!(var_a > 0.0)) {
        throw std::invalid_argument(
            "estimate_parameters: degenerate alice variance");
    }

    const double g = detail::sample_covariance(meas, alice) / var_a;
    double var_xi = 0.0;
    {
        // residual variance without materializing xi twice
        const double ma = detail::mean(alice);
        const double mm = detail::mean(meas);
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double r = (meas[k] - mm) - g * (alice[k] - ma);
            s += r * r;
        }
        var_xi = s / static_cast<double>(m - 1);
    }

    const double md = static_cast<double>(m - 1);
    const double se_g = std::sqrt(var_xi / (md * var_a));
    const double se_eta = (4.0 * std::abs(g) / calib.tau) * se_g;
    const double se_var = var_xi * std::sqrt(2.0 / md);
    const double se_eps = (2.0 / calib.tau) * se_var;
    const double delta = gaussian_failure_probability(z);

    ChannelEstimates out;
    out.gain_hat = g;
    out.residual_variance = var_xi;
    out.eta_hat.point = 2.0 * g * g / calib.tau;
    out.eta_hat.lower = out.eta_hat.point - z * se_eta;
    out.eta_hat.upper = out.eta_hat.point + z * se_eta;
    out.eta_hat.z = z;
    out.eta_hat.delta = delta;
    out.eps_hat.point = (var_xi - 1.0 - calib.nu) * 2.0 / calib.tau;
    out.eps_hat.lower = out.eps_hat.point - z * se_eps;
    out.eps_hat.upper = out.eps_hat.point + z * se_eps;
    out.eps_hat.z = z;
    out.eps_hat.delta = delta;
    return out;
}

/// Pool both quadratures of user l from a batch into one estimate (the
/// calibration is taken from the batch's ground truth). Quadratures are
/// concatenated, doubling the effective sample count.
inline ChannelEstimates estimate_user(const SampleBatch& batch, int user,
                                      double z = kDefaultConfidenceZ) {
    const auto& p = batch.ground_truth;
    if (user < 0 || user >= p.users) {
        throw std::out_of_range("estimate_user: user index out of range");
    }
    const auto ul = static_cast<std::size_t>(user);
    std::vector<double> alice = batch.alice_x;
    alice.insert(alice.end(), batch.alice_p.begin(), batch.alice_p.end());
    std::vector<double> meas = batch.meas_x[ul];
    meas.insert(meas.end(), batch.meas_p[ul].begin(), batch.meas_p[ul].end());
    ReceiverCalibration calib{p.detectors.tau[ul], p.detectors.nu[ul]};
    return estimate_parameters(alice, meas, calib, z);
}

// ---------------------------------------------------------------------------
// Empirical mutual information
// ---------------------------------------------------------------------------

/// Gaussian mutual-information estimate from the sample correlation.
struct MutualInformationEstimate {
    double bits = 0.0;
    double correlation = 0.0;  ///< sample correlation coefficient
    bool saturated = false;    ///< |rho| = 1 within round-off (MI unbounded)
};

/**
 * Gaussian MI estimator −½·log2(1−ρ̂²) from the sample correlation of two
 * series. Perfectly correlated inputs are reported with saturated = true and
 * bits = +infinity.
 */
inline MutualInformationEstimate empirical_mi(const std::vector<double>& x,
                                              const std::vector<double>& y) {
    detail::check_same_length(x, y, "empirical_mi");
    if (x.size() < 1000) {
        throw std::invalid_argument("empirical_mi: need at least 1000 samples");
    }
    const double vx = detail::sample_variance(x);
    const double vy = detail::sample_variance(y);
    if (!(vx > 0.0) || !(vy > 0.0)) {
        throw std::invalid_argument("empirical_mi: degenerate variance");
    }
    const double rho = detail::sample_covariance(x, y) / std::sqrt(vx * vy);
    MutualInformationEstimate out;
    out.correlation = rho;
    const double one_minus = 1.0 - rho * rho;
    if (one_minus <= std::numeric_limits<double>::epsilon()) {
        out.saturated = true;
        out.bits = std::numeric_limits<double>::infinity();
        return out;
    }
    out.bits = -0.5 * std::log2(one_minus);
    return out;
}

// ---------------------------------------------------------------------------
// Worst-case key evaluation
// ---------------------------------------------------------------------------

/// Key evaluated at the estimate point and at the pessimistic/optimistic CI
/// corners: low at (eta lower, eps upper), high at (eta upper, eps lower).
struct WorstCaseKey {
    double key_low = 0.0;
    double key_point = 0.0;
    double key_high = 0.0;
};

/**
 * Devetak-Winter key of `partition.reference_user` evaluated at the CI
 * corners of that user's channel estimates. Transmittance is clamped to the
 * physical domain; keys are clamped at zero, so key_low ≤ key_point ≤
 * key_high always holds.
 */
inline WorstCaseKey worst_case_key(const NetworkParams& params_point,
                                   const ChannelEstimates& estimates,
                                   double beta,
                                   const TrustPartition& partition) {
    params_point.validate();
    partition.validate(params_point.users);
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("worst_case_key: beta must be in [0,1]");
    }
    const int l = partition.reference_user;
    const auto ul = static_cast<std::size_t>(l);

    const auto key_at = [&](double eta_tot, double eps) {
        NetworkParams p = params_point;
        // re-express the total transmittance through the branch factor,
        // keeping provider-side settings untouched
        const double w = p.split_weight(l);
        double eta_b = eta_tot / (p.link.eta_a * w);
        eta_b = std::clamp(eta_b, 1e-15, 1.0);
        p.link.eta_b[ul] = eta_b;
        p.link.eps_b[ul] = std::max(0.0, eps - p.link.eps_a * eta_b * w);
        return key_rate(p, partition, beta);
    };

    WorstCaseKey out;
    out.key_point =
        key_at(std::max(estimates.eta_hat.point, 0.0), estimates.eps_hat.point);
    out.key_low =
        key_at(std::max(estimates.eta_hat.lower, 0.0), estimates.eps_hat.upper);
    out.key_high =
        key_at(std::max(estimates.eta_hat.upper, 0.0), estimates.eps_hat.lower);
    return out;
}

}  // namespace cvqpon
