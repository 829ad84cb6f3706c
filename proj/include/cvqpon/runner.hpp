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
 * @file runner.hpp
 * @brief Executes a parsed Scenario: key-rate evaluation, parameter sweeps,
 *        and Monte Carlo estimation runs.
 *
 * These functions sit between the scenario schema and the numerical engine;
 * the command-line tool is a thin shell around them, and they are reused
 * directly by the test suite.
 */

#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "estimation.hpp"
#include "protocols.hpp"
#include "scenario.hpp"

namespace cvqpon {

// ---------------------------------------------------------------------------
// keyrate command
// ---------------------------------------------------------------------------

/// Evaluate every protocol the scenario selects at its network point.
/// Results come back in the scenario's protocol order. Throughputs are
/// filled in whenever a symbol rate is configured.
inline std::vector<ProtocolResult> run_keyrate(const Scenario& s) {
    const auto betas = scenario_beta(s);
    const auto fers = scenario_fer(s);
    std::vector<ProtocolResult> out;
    out.reserve(s.protocols.size());
    for (Protocol p : s.protocols) {
        ProtocolResult r;
        switch (p) {
            case Protocol::untrusted_broadcast:
                r = untrusted_total(s.network, betas);
                break;
            case Protocol::trusted_broadcast:
                r = trusted_total(s.network, betas, s.ordering);
                break;
            case Protocol::time_sharing:
                r = time_sharing_total(s.network, betas, s.time_sharing_user);
                break;
            case Protocol::plob:
                r = plob_benchmark(s.network);
                break;
        }
        if (s.symbol_rate_hz > 0.0) {
            if (p == Protocol::plob) {
                // capacity benchmark: scale by the symbol rate alone, frame
                // errors are a property of the deployed reconciliation codes
                apply_throughput(r, s.symbol_rate_hz, {0.0});
            } else {
                apply_throughput(r, s.symbol_rate_hz, fers);
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// sweep command
// ---------------------------------------------------------------------------

/// Evaluate the scenario's sweep block. When the scenario lists
/// `user_counts`, the sweep is repeated once per count over a uniform
/// re-templated network and the point lists are concatenated in count
/// order (each SweepPoint carries its user count). Throughputs are filled
/// in when a symbol rate is configured; a per-user FER list is only
/// compatible with a fixed user count, which parse-time validation
/// guarantees.
inline std::vector<SweepPoint> run_sweep(const Scenario& s) {
    if (!s.sweep) {
        throw std::invalid_argument("scenario has no sweep block");
    }
    std::vector<SweepPoint> points;
    if (s.sweep_user_counts.empty()) {
        points = sweep(s.network, *s.sweep);
    } else {
        for (int n : s.sweep_user_counts) {
            const NetworkParams base = detail::at_grid_point(
                s.network, SweepAxis::users_n, static_cast<double>(n),
                std::nullopt);
            auto part = sweep(base, *s.sweep);
            points.insert(points.end(), part.begin(), part.end());
        }
    }
    if (s.symbol_rate_hz > 0.0) {
        const auto fers = scenario_fer(s);
        for (auto& pt : points) {
            apply_throughput(pt.time_sharing, s.symbol_rate_hz, fers);
            apply_throughput(pt.untrusted, s.symbol_rate_hz, fers);
            apply_throughput(pt.trusted, s.symbol_rate_hz, fers);
            apply_throughput(pt.plob, s.symbol_rate_hz, {0.0});
        }
    }
    return points;
}

// ---------------------------------------------------------------------------
// montecarlo command
// ---------------------------------------------------------------------------

/// One user's estimation outcome within a Monte Carlo run.
struct UserEstimateRow {
    int user = 0;
    double eta_true = 0.0;       ///< ground-truth total transmittance
    double eps_true = 0.0;       ///< ground-truth excess noise (channel output)
    ChannelEstimates estimates;  ///< estimates with confidence intervals
    WorstCaseKey key;            ///< key evaluated at the CI corners
    double mi_alice_bits = 0.0;  ///< empirical provider-user MI, bits/symbol
    double beta = 1.0;           ///< efficiency used for the key bracket
};

/// One full prepare-and-measure simulation: a seed, its sample count, and
/// the per-user estimation results.
struct MonteCarloRun {
    std::uint64_t seed = 0;
    std::size_t rounds = 0;
    std::vector<UserEstimateRow> users;
};

/// Simulate one batch and estimate every user's channel from it.
inline MonteCarloRun run_montecarlo_single(const Scenario& s,
                                           std::uint64_t seed) {
    if (!s.montecarlo) {
        throw std::invalid_argument("scenario has no montecarlo block");
    }
    const auto& mc = *s.montecarlo;
    const auto betas = scenario_beta(s);

    MonteCarloRun run;
    run.seed = seed;
    run.rounds = mc.rounds;
    const SampleBatch batch = simulate_channel(s.network, mc.rounds, seed);
    run.users.reserve(static_cast<std::size_t>(s.network.users));
    for (int l = 0; l < s.network.users; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        UserEstimateRow row;
        row.user = l;
        row.eta_true = s.network.eta_total(l);
        row.eps_true = s.network.eps_total(l);
        row.beta = betas[ul];
        row.estimates = estimate_user(batch, l, mc.confidence_z);
        row.key = worst_case_key(s.network, row.estimates, betas[ul],
                                 TrustPartition::untrusted(l));
        const auto mi_x = empirical_mi(batch.alice_x, batch.meas_x[ul]);
        const auto mi_p = empirical_mi(batch.alice_p, batch.meas_p[ul]);
        row.mi_alice_bits = mi_x.bits + mi_p.bits;
        run.users.push_back(std::move(row));
    }
    return run;
}

/// Run every seed in the scenario's Monte Carlo block. Seeds are
/// independent, so they are distributed over `threads` workers; the result
/// order always matches the seed order regardless of thread count.
inline std::vector<MonteCarloRun> run_montecarlo(const Scenario& s,
                                                 int threads = 1) {
    if (!s.montecarlo) {
        throw std::invalid_argument("scenario has no montecarlo block");
    }
    const auto& seeds = s.montecarlo->seeds;
    std::vector<MonteCarloRun> runs(seeds.size());
    if (threads <= 1 || seeds.size() <= 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            runs[i] = run_montecarlo_single(s, seeds[i]);
        }
        return runs;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= seeds.size()) return;
            try {
                runs[i] = run_montecarlo_single(s, seeds[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    const int pool = std::min<int>(threads, static_cast<int>(seeds.size()));
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(pool));
    for (int t = 0; t < pool; ++t) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
    return runs;
}

}  // namespace cvqpon
