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
 * @file report.hpp
 * @brief Output serialization: machine-readable JSON reports and CSV tables
 *        with fixed, documented headers, written atomically.
 *
 * Column conventions: keys and Holevo quantities are in bits per symbol
 * (both quadratures counted), transmittances are linear total values
 * (provider segment x splitter share x branch), excess noise is in SNU at
 * the channel output, throughputs in bits per second. Non-finite totals
 * (unbounded benchmarks on a lossless link) serialize as JSON null with an
 * `unbounded` flag, and as `inf` in CSV.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ios>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "runner.hpp"
#include "scenario.hpp"

namespace cvqpon {

inline constexpr int kReportSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Atomic file output
// ---------------------------------------------------------------------------

/// Write `content` to `path` via a same-directory temporary file and an
/// atomic rename, so readers never observe a partially written file.
inline void atomic_write_text(const std::string& path,
                              const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            std::remove(tmp.c_str());
            throw std::runtime_error("failed writing " + tmp);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("failed renaming " + tmp + " to " + path);
    }
}

namespace detail {

/// CSV number format: shortest representation that survives a round trip
/// for plotting/regression purposes; infinities print as inf/-inf.
inline std::string csv_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

/// JSON-safe number: nlohmann serializes non-finite doubles as null, which
/// we make explicit so report consumers see the contract in one place.
inline Json json_number(double v) {
    if (!std::isfinite(v)) return Json();
    return Json(v);
}

inline Json per_user_json(const UserKeyRecord& u) {
    Json j;
    j["user"] = u.user;
    j["snr"] = json_number(u.snr);
    j["i_ab_bits_per_symbol"] = json_number(u.i_ab);
    j["holevo_bits_per_symbol"] = json_number(u.holevo);
    j["key_bits_per_symbol"] = json_number(u.key_per_symbol);
    j["throughput_bits_per_s"] = json_number(u.throughput_bits_per_s);
    j["trusted_count"] = u.trusted_count;
    j["unsafe_all_trusted"] = u.unsafe_all_trusted;
    return j;
}

inline Json protocol_result_json(const ProtocolResult& r) {
    Json j;
    j["protocol"] = to_string(r.protocol);
    j["total_key_bits_per_symbol"] = json_number(r.total_key_per_symbol);
    j["total_throughput_bits_per_s"] =
        json_number(r.total_throughput_bits_per_s);
    j["unbounded"] = r.unbounded;
    if (!r.realized_order.empty()) j["realized_order"] = r.realized_order;
    Json users = Json::array();
    for (const auto& u : r.per_user) users.push_back(per_user_json(u));
    j["per_user"] = users;
    return j;
}

inline int positive_users(const ProtocolResult& r) {
    int n = 0;
    for (const auto& u : r.per_user) {
        if (u.key_per_symbol > 0.0) ++n;
    }
    return n;
}

inline double min_user_key(const ProtocolResult& r) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& u : r.per_user) m = std::min(m, u.key_per_symbol);
    return r.per_user.empty() ? 0.0 : m;
}

inline double max_user_key(const ProtocolResult& r) {
    double m = 0.0;
    for (const auto& u : r.per_user) m = std::max(m, u.key_per_symbol);
    return m;
}

inline Json report_envelope(const Scenario& s, const std::string& command) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["command"] = command;
    if (!s.description.empty()) j["description"] = s.description;
    j["scenario"] = to_json(s);
    return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// keyrate outputs
// ---------------------------------------------------------------------------

inline constexpr const char* kKeyrateCsvHeader =
    "protocol,user,eta_total,snr,i_ab_bits_per_symbol,holevo_bits_per_symbol,"
    "key_bits_per_symbol,throughput_bits_per_s,trusted_count,beta";

/// One row per (protocol, user), protocols in evaluation order.
inline std::string keyrate_csv(const Scenario& s,
                               const std::vector<ProtocolResult>& results) {
    std::ostringstream os;
    os << kKeyrateCsvHeader << "\n";
    for (const auto& r : results) {
        for (const auto& u : r.per_user) {
            const auto ul = static_cast<std::size_t>(u.user);
            const double beta =
                r.beta.empty()
                    ? 1.0
                    : r.beta[r.beta.size() == 1 ? 0 : ul];
            os << to_string(r.protocol) << ',' << u.user << ','
               << detail::csv_number(s.network.eta_total(u.user)) << ','
               << detail::csv_number(u.snr) << ','
               << detail::csv_number(u.i_ab) << ','
               << detail::csv_number(u.holevo) << ','
               << detail::csv_number(u.key_per_symbol) << ','
               << detail::csv_number(u.throughput_bits_per_s) << ','
               << u.trusted_count << ',' << detail::csv_number(beta) << "\n";
        }
    }
    return os.str();
}

inline Json keyrate_report_json(const Scenario& s,
                                const std::vector<ProtocolResult>& results) {
    Json j = detail::report_envelope(s, "keyrate");
    Json arr = Json::array();
    for (const auto& r : results) arr.push_back(detail::protocol_result_json(r));
    j["results"] = arr;
    return j;
}

// ---------------------------------------------------------------------------
// sweep outputs
// ---------------------------------------------------------------------------

inline constexpr const char* kSweepCsvHeader =
    "axis,axis_value,users,protocol,total_key_bits_per_symbol,"
    "total_throughput_bits_per_s,positive_users,min_user_key_bits_per_symbol,"
    "max_user_key_bits_per_symbol";

/// One row per (grid point, protocol); grid points in axis order, protocols
/// in fixed order: time_sharing, untrusted_broadcast, trusted_broadcast,
/// plob.
inline std::string sweep_csv(const SweepSpec& spec,
                             const std::vector<SweepPoint>& points) {
    std::ostringstream os;
    os << kSweepCsvHeader << "\n";
    const std::string axis = to_string(spec.axis);
    for (const auto& pt : points) {
        const ProtocolResult* results[] = {&pt.time_sharing, &pt.untrusted,
                                           &pt.trusted, &pt.plob};
        for (const ProtocolResult* r : results) {
            os << axis << ',' << detail::csv_number(pt.axis_value) << ','
               << pt.users << ',' << to_string(r->protocol) << ','
               << detail::csv_number(r->total_key_per_symbol) << ','
               << detail::csv_number(r->total_throughput_bits_per_s) << ','
               << detail::positive_users(*r) << ','
               << detail::csv_number(detail::min_user_key(*r)) << ','
               << detail::csv_number(detail::max_user_key(*r)) << "\n";
        }
    }
    return os.str();
}

inline Json sweep_report_json(const Scenario& s,
                              const std::vector<SweepPoint>& points) {
    Json j = detail::report_envelope(s, "sweep");
    Json arr = Json::array();
    for (const auto& pt : points) {
        Json p;
        p["axis_value"] = detail::json_number(pt.axis_value);
        p["users"] = pt.users;
        const ProtocolResult* results[] = {&pt.time_sharing, &pt.untrusted,
                                           &pt.trusted, &pt.plob};
        Json protos = Json::array();
        for (const ProtocolResult* r : results) {
            Json e;
            e["protocol"] = to_string(r->protocol);
            e["total_key_bits_per_symbol"] =
                detail::json_number(r->total_key_per_symbol);
            e["total_throughput_bits_per_s"] =
                detail::json_number(r->total_throughput_bits_per_s);
            e["positive_users"] = detail::positive_users(*r);
            e["unbounded"] = r->unbounded;
            protos.push_back(e);
        }
        p["protocols"] = protos;
        arr.push_back(p);
    }
    if (s.sweep) j["axis"] = to_string(s.sweep->axis);
    j["results"] = arr;
    return j;
}

// ---------------------------------------------------------------------------
// montecarlo outputs
// ---------------------------------------------------------------------------

inline constexpr const char* kMonteCarloCsvHeader =
    "seed,user,rounds,eta_total_true,eta_total_hat,eta_total_low,"
    "eta_total_high,excess_noise_true_snu,excess_noise_hat_snu,"
    "excess_noise_low_snu,excess_noise_high_snu,key_low_bits_per_symbol,"
    "key_point_bits_per_symbol,key_high_bits_per_symbol,"
    "mi_alice_bits_per_symbol";

/// One row per (seed, user), seeds in scenario order.
inline std::string montecarlo_csv(const std::vector<MonteCarloRun>& runs) {
    std::ostringstream os;
    os << kMonteCarloCsvHeader << "\n";
    for (const auto& run : runs) {
        for (const auto& u : run.users) {
            os << run.seed << ',' << u.user << ',' << run.rounds << ','
               << detail::csv_number(u.eta_true) << ','
               << detail::csv_number(u.estimates.eta_hat.point) << ','
               << detail::csv_number(u.estimates.eta_hat.lower) << ','
               << detail::csv_number(u.estimates.eta_hat.upper) << ','
               << detail::csv_number(u.eps_true) << ','
               << detail::csv_number(u.estimates.eps_hat.point) << ','
               << detail::csv_number(u.estimates.eps_hat.lower) << ','
               << detail::csv_number(u.estimates.eps_hat.upper) << ','
               << detail::csv_number(u.key.key_low) << ','
               << detail::csv_number(u.key.key_point) << ','
               << detail::csv_number(u.key.key_high) << ','
               << detail::csv_number(u.mi_alice_bits) << "\n";
        }
    }
    return os.str();
}

inline Json montecarlo_report_json(const Scenario& s,
                                   const std::vector<MonteCarloRun>& runs) {
    Json j = detail::report_envelope(s, "montecarlo");
    Json arr = Json::array();
    for (const auto& run : runs) {
        Json r;
        r["seed"] = run.seed;
        r["rounds"] = run.rounds;
        Json users = Json::array();
        for (const auto& u : run.users) {
            Json e;
            e["user"] = u.user;
            e["beta"] = u.beta;
            e["eta_total"] = {{"true", detail::json_number(u.eta_true)},
                              {"point", detail::json_number(
                                            u.estimates.eta_hat.point)},
                              {"lower", detail::json_number(
                                            u.estimates.eta_hat.lower)},
                              {"upper", detail::json_number(
                                            u.estimates.eta_hat.upper)}};
            e["excess_noise_snu"] = {
                {"true", detail::json_number(u.eps_true)},
                {"point", detail::json_number(u.estimates.eps_hat.point)},
                {"lower", detail::json_number(u.estimates.eps_hat.lower)},
                {"upper", detail::json_number(u.estimates.eps_hat.upper)}};
            e["confidence_z"] = u.estimates.eta_hat.z;
            e["confidence_failure_probability"] = u.estimates.eta_hat.delta;
            e["key_bits_per_symbol"] = {
                {"worst_case", detail::json_number(u.key.key_low)},
                {"point", detail::json_number(u.key.key_point)},
                {"best_case", detail::json_number(u.key.key_high)}};
            e["mi_alice_bits_per_symbol"] =
                detail::json_number(u.mi_alice_bits);
            users.push_back(e);
        }
        r["users"] = users;
        arr.push_back(r);
    }
    j["results"] = arr;
    return j;
}

}  // namespace cvqpon
