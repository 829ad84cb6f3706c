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
 * @file scenario.hpp
 * @brief Scenario files: a single JSON document describing a network, the
 *        protocols to evaluate, and optional sweep / Monte Carlo blocks.
 *
 * Unit conventions are explicit in field names (`_snu`, `_db`, `_hz`); dB
 * values are converted to linear exactly once, at parse time. Excess noise
 * may be declared at either reference point: `channel_output` (the model's
 * native convention) or `user_station` (raw measured noise at the receiver,
 * scaled by the trusted detector efficiency), converted here via
 * eps_channel = eps_station / tau.
 *
 * Parse errors throw ScenarioError carrying a field path such as
 * `network.excess_noise_snu[3]` for precise diagnostics.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "estimation.hpp"
#include "protocols.hpp"

namespace cvqpon {

using Json = nlohmann::json;

/// Schema violation with the offending field's path.
class ScenarioError : public std::runtime_error {
  public:
    ScenarioError(std::string field_path, const std::string& message)
        : std::runtime_error(field_path + ": " + message),
          field_path_(std::move(field_path)) {}

    const std::string& field_path() const { return field_path_; }

  private:
    std::string field_path_;
};

/// Reference point at which scenario excess-noise values are declared.
enum class NoiseReference {
    channel_output,  ///< model-native: noise at the channel output, SNU
    user_station,    ///< measured at the receiver, after detector efficiency
};

/// Monte Carlo block: simulation size and the seeds to run.
struct MonteCarloSpec {
    std::size_t rounds = 0;
    std::vector<std::uint64_t> seeds;
    double confidence_z = kDefaultConfidenceZ;
};

/// A fully parsed scenario. The network is always stored in canonical form
/// (linear transmittances, channel-output excess noise).
struct Scenario {
    int schema_version = 1;
    std::string description;
    NetworkParams network;
    std::vector<Protocol> protocols;
    TrustOrdering ordering = TrustOrdering::ascending();
    std::vector<double> beta{1.0};  ///< scalar (size 1) or per-user
    double symbol_rate_hz = 0.0;    ///< 0: report per-symbol rates only
    std::vector<double> fer;        ///< empty, scalar (size 1), or per-user
    std::optional<int> time_sharing_user;
    std::optional<SweepSpec> sweep;
    /// optional list of user counts the sweep is repeated for (uniform
    /// template required); empty means "sweep at the network's own size"
    std::vector<int> sweep_user_counts;
    std::optional<MonteCarloSpec> montecarlo;
};

inline constexpr int kScenarioSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Parse helpers (field-path diagnostics)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string join_path(const std::string& base, const char* key) {
    return base.empty() ? std::string(key) : base + "." + key;
}

inline const Json& require_key(const Json& j, const std::string& path,
                               const char* key) {
    if (!j.is_object()) {
        throw ScenarioError(path.empty() ? "(root)" : path,
                            "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        throw ScenarioError(join_path(path, key), "required field is missing");
    }
    return *it;
}

inline double number_value(const Json& j, const std::string& path) {
    if (!j.is_number()) {
        throw ScenarioError(path, "expected a number");
    }
    return j.get<double>();
}

inline int int_value(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) {
        throw ScenarioError(path, "expected an integer");
    }
    return j.get<int>();
}

inline std::string string_value(const Json& j, const std::string& path) {
    if (!j.is_string()) {
        throw ScenarioError(path, "expected a string");
    }
    return j.get<std::string>();
}

/// Scalar-or-array numeric field broadcast to `n` entries.
inline std::vector<double> broadcast_numbers(const Json& j,
                                             const std::string& path, int n) {
    std::vector<double> out;
    if (j.is_number()) {
        out.assign(static_cast<std::size_t>(n), j.get<double>());
        return out;
    }
    if (!j.is_array()) {
        throw ScenarioError(path, "expected a number or an array of numbers");
    }
    if (j.size() != static_cast<std::size_t>(n)) {
        throw ScenarioError(path, "expected " + std::to_string(n) +
                                      " entries, found " +
                                      std::to_string(j.size()));
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            throw ScenarioError(path + "[" + std::to_string(i) + "]",
                                "expected a number");
        }
        out.push_back(j[i].get<double>());
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Network block
// ---------------------------------------------------------------------------

namespace detail {

/// Parse the `network` object into canonical NetworkParams. Exactly one of
/// `branch_transmittance`, `user_transmittance`, `channel_loss_db` selects
/// the transmittance convention; excess noise is converted to channel-output
/// reference here if declared `user_station`.
inline NetworkParams parse_network(const Json& j, const std::string& path) {
    NetworkParams p;
    p.users = int_value(require_key(j, path, "users"),
                        join_path(path, "users"));
    if (p.users < 1) {
        throw ScenarioError(join_path(path, "users"),
                            "need at least one user");
    }
    p.source.modulation_variance =
        number_value(require_key(j, path, "modulation_variance_snu"),
                     join_path(path, "modulation_variance_snu"));
    if (j.contains("provider_transmittance")) {
        p.link.eta_a = number_value(j["provider_transmittance"],
                                    join_path(path, "provider_transmittance"));
    }
    if (j.contains("provider_excess_noise_snu")) {
        p.link.eps_a =
            number_value(j["provider_excess_noise_snu"],
                         join_path(path, "provider_excess_noise_snu"));
    }
    if (j.contains("split_weights")) {
        p.split_weights = broadcast_numbers(
            j["split_weights"], join_path(path, "split_weights"), p.users);
    }

    const int given = (j.contains("branch_transmittance") ? 1 : 0) +
                      (j.contains("user_transmittance") ? 1 : 0) +
                      (j.contains("channel_loss_db") ? 1 : 0);
    if (given != 1) {
        throw ScenarioError(
            join_path(path, "branch_transmittance"),
            "exactly one of branch_transmittance, user_transmittance, "
            "channel_loss_db must be given");
    }
    if (j.contains("branch_transmittance")) {
        p.link.eta_b =
            broadcast_numbers(j["branch_transmittance"],
                              join_path(path, "branch_transmittance"), p.users);
    } else if (j.contains("user_transmittance")) {
        // end-to-end transmittance at the user, splitter share included;
        // divide out the provider segment and the splitter share to recover
        // the per-branch transmittance the model parameterizes
        const auto eta_total = broadcast_numbers(
            j["user_transmittance"], join_path(path, "user_transmittance"),
            p.users);
        for (int l = 0; l < p.users; ++l) {
            const double w =
                p.split_weights.empty()
                    ? 1.0 / static_cast<double>(p.users)
                    : p.split_weights[static_cast<std::size_t>(l)];
            const double eta_b =
                eta_total[static_cast<std::size_t>(l)] / (p.link.eta_a * w);
            if (eta_b > 1.0 + 1e-12) {
                throw ScenarioError(
                    join_path(path, "user_transmittance") + "[" +
                        std::to_string(l) + "]",
                    "total transmittance exceeds the splitter share " +
                        std::to_string(w) + " times the provider segment");
            }
            p.link.eta_b.push_back(std::min(eta_b, 1.0));
        }
    } else {
        // provider-to-user channel loss in dB, splitter share excluded
        // (same convention as the channel_loss_db sweep axis)
        const auto loss = broadcast_numbers(
            j["channel_loss_db"], join_path(path, "channel_loss_db"), p.users);
        for (int l = 0; l < p.users; ++l) {
            const double eta_b =
                std::pow(10.0, -std::abs(loss[static_cast<std::size_t>(l)]) /
                                   10.0) /
                p.link.eta_a;
            if (eta_b > 1.0 + 1e-12) {
                throw ScenarioError(
                    join_path(path, "channel_loss_db") + "[" +
                        std::to_string(l) + "]",
                    "loss is below the provider segment's own loss");
            }
            p.link.eta_b.push_back(std::min(eta_b, 1.0));
        }
    }

    p.detectors.tau =
        broadcast_numbers(require_key(j, path, "detector_efficiency"),
                          join_path(path, "detector_efficiency"), p.users);
    p.detectors.nu =
        broadcast_numbers(require_key(j, path, "electronic_noise_snu"),
                          join_path(path, "electronic_noise_snu"), p.users);

    NoiseReference ref = NoiseReference::channel_output;
    if (j.contains("excess_noise_reference")) {
        const std::string s =
            string_value(j["excess_noise_reference"],
                         join_path(path, "excess_noise_reference"));
        if (s == "channel_output") {
            ref = NoiseReference::channel_output;
        } else if (s == "user_station") {
            ref = NoiseReference::user_station;
        } else {
            throw ScenarioError(join_path(path, "excess_noise_reference"),
                                "expected \"channel_output\" or "
                                "\"user_station\", found \"" + s + "\"");
        }
    }
    p.link.eps_b = broadcast_numbers(require_key(j, path, "excess_noise_snu"),
                                     join_path(path, "excess_noise_snu"),
                                     p.users);
    if (ref == NoiseReference::user_station) {
        for (int l = 0; l < p.users; ++l) {
            const auto ul = static_cast<std::size_t>(l);
            p.link.eps_b[ul] /= p.detectors.tau[ul];
        }
    }

    try {
        p.validate();
    } catch (const std::exception& e) {
        throw ScenarioError(path, std::string("invalid network: ") + e.what());
    }
    return p;
}

inline Json network_to_json(const NetworkParams& p) {
    Json j;
    j["users"] = p.users;
    j["modulation_variance_snu"] = p.source.modulation_variance;
    j["provider_transmittance"] = p.link.eta_a;
    j["provider_excess_noise_snu"] = p.link.eps_a;
    j["branch_transmittance"] = p.link.eta_b;
    j["excess_noise_snu"] = p.link.eps_b;
    j["excess_noise_reference"] = "channel_output";
    j["detector_efficiency"] = p.detectors.tau;
    j["electronic_noise_snu"] = p.detectors.nu;
    if (!p.split_weights.empty()) j["split_weights"] = p.split_weights;
    return j;
}

// ---------------------------------------------------------------------------
// Protocol / ordering / sweep / Monte Carlo blocks
// ---------------------------------------------------------------------------

inline Protocol protocol_from_string(const std::string& s,
                                     const std::string& path) {
    if (s == "time_sharing") return Protocol::time_sharing;
    if (s == "untrusted") return Protocol::untrusted_broadcast;
    if (s == "trusted") return Protocol::trusted_broadcast;
    if (s == "plob") return Protocol::plob;
    throw ScenarioError(path, "unknown protocol \"" + s +
                                  "\" (expected time_sharing, untrusted, "
                                  "trusted, or plob)");
}

inline std::string protocol_to_scenario_string(Protocol p) {
    switch (p) {
        case Protocol::time_sharing: return "time_sharing";
        case Protocol::untrusted_broadcast: return "untrusted";
        case Protocol::trusted_broadcast: return "trusted";
        case Protocol::plob: return "plob";
    }
    throw std::logic_error("protocol_to_scenario_string: bad enum");
}

inline TrustOrdering parse_ordering(const Json& j, const std::string& path,
                                    int users) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "ascending") return TrustOrdering::ascending();
        if (s == "descending") return TrustOrdering::descending();
        throw ScenarioError(path, "expected \"ascending\", \"descending\", "
                                  "or an explicit user array");
    }
    if (j.is_array()) {
        std::vector<int> order;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (!j[i].is_number_integer()) {
                throw ScenarioError(path + "[" + std::to_string(i) + "]",
                                    "expected a user index");
            }
            order.push_back(j[i].get<int>());
        }
        if (order.size() != static_cast<std::size_t>(users)) {
            throw ScenarioError(path, "explicit order must list all " +
                                          std::to_string(users) + " users");
        }
        return TrustOrdering::explicit_users(order);
    }
    throw ScenarioError(path, "expected a string or an array");
}

inline Json ordering_to_json(const TrustOrdering& o) {
    switch (o.strategy) {
        case TrustStrategy::ascending_untrusted_key: return Json("ascending");
        case TrustStrategy::descending_untrusted_key:
            return Json("descending");
        case TrustStrategy::explicit_order: return Json(o.explicit_order);
    }
    throw std::logic_error("ordering_to_json: bad enum");
}

inline SweepSpec parse_sweep(const Json& j, const std::string& path) {
    SweepSpec spec;
    const std::string axis = string_value(require_key(j, path, "axis"),
                                          join_path(path, "axis"));
    if (axis == "channel_loss_db") {
        spec.axis = SweepAxis::channel_loss_db;
    } else if (axis == "users_n") {
        spec.axis = SweepAxis::users_n;
    } else if (axis == "modulation_variance") {
        spec.axis = SweepAxis::modulation_variance;
    } else {
        throw ScenarioError(join_path(path, "axis"),
                            "expected channel_loss_db, users_n, or "
                            "modulation_variance");
    }

    const Json& grid = require_key(j, path, "grid");
    const std::string grid_path = join_path(path, "grid");
    if (grid.is_array()) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!grid[i].is_number()) {
                throw ScenarioError(grid_path + "[" + std::to_string(i) + "]",
                                    "expected a number");
            }
            spec.grid.push_back(grid[i].get<double>());
        }
    } else if (grid.is_object()) {
        const double start = number_value(require_key(grid, grid_path, "start"),
                                          join_path(grid_path, "start"));
        const double stop = number_value(require_key(grid, grid_path, "stop"),
                                         join_path(grid_path, "stop"));
        const int points = int_value(require_key(grid, grid_path, "points"),
                                     join_path(grid_path, "points"));
        if (points < 1) {
            throw ScenarioError(join_path(grid_path, "points"),
                                "need at least one point");
        }
        if (points == 1) {
            spec.grid.push_back(start);
        } else {
            for (int i = 0; i < points; ++i) {
                spec.grid.push_back(start + (stop - start) * i / (points - 1));
            }
        }
    } else {
        throw ScenarioError(grid_path,
                            "expected an array or {start, stop, points}");
    }

    if (j.contains("epsilon_model")) {
        const Json& em = j["epsilon_model"];
        const std::string em_path = join_path(path, "epsilon_model");
        EpsilonModel model;
        model.base = number_value(require_key(em, em_path, "base_snu"),
                                  join_path(em_path, "base_snu"));
        model.slope =
            number_value(require_key(em, em_path, "slope_snu_per_unit"),
                         join_path(em_path, "slope_snu_per_unit"));
        spec.epsilon_model = model;
    }
    return spec;
}

inline Json sweep_to_json(const SweepSpec& spec) {
    Json j;
    j["axis"] = to_string(spec.axis);
    j["grid"] = spec.grid;
    if (spec.epsilon_model) {
        j["epsilon_model"] = {{"base_snu", spec.epsilon_model->base},
                              {"slope_snu_per_unit", spec.epsilon_model->slope}};
    }
    return j;
}

inline MonteCarloSpec parse_montecarlo(const Json& j, const std::string& path) {
    MonteCarloSpec mc;
    const double rounds = number_value(require_key(j, path, "rounds"),
                                       join_path(path, "rounds"));
    if (rounds < 1 || rounds != std::floor(rounds)) {
        throw ScenarioError(join_path(path, "rounds"),
                            "expected a positive integer sample count");
    }
    mc.rounds = static_cast<std::size_t>(rounds);

    const Json& seeds = require_key(j, path, "seeds");
    const std::string seeds_path = join_path(path, "seeds");
    if (seeds.is_array()) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            if (!seeds[i].is_number_integer()) {
                throw ScenarioError(seeds_path + "[" + std::to_string(i) + "]",
                                    "expected an integer seed");
            }
            mc.seeds.push_back(seeds[i].get<std::uint64_t>());
        }
        if (mc.seeds.empty()) {
            throw ScenarioError(seeds_path, "need at least one seed");
        }
    } else if (seeds.is_object()) {
        const int count = int_value(require_key(seeds, seeds_path, "count"),
                                    join_path(seeds_path, "count"));
        if (count < 1) {
            throw ScenarioError(join_path(seeds_path, "count"),
                                "need at least one seed");
        }
        std::uint64_t base = 1;
        if (seeds.contains("base")) {
            if (!seeds["base"].is_number_integer()) {
                throw ScenarioError(join_path(seeds_path, "base"),
                                    "expected an integer");
            }
            base = seeds["base"].get<std::uint64_t>();
        }
        for (int i = 0; i < count; ++i) {
            mc.seeds.push_back(base + static_cast<std::uint64_t>(i));
        }
    } else {
        throw ScenarioError(seeds_path,
                            "expected an array of seeds or {count, base}");
    }

    if (j.contains("confidence_z")) {
        mc.confidence_z = number_value(j["confidence_z"],
                                       join_path(path, "confidence_z"));
        if (!(mc.confidence_z > 0.0)) {
            throw ScenarioError(join_path(path, "confidence_z"),
                                "must be positive");
        }
    }
    return mc;
}

inline Json montecarlo_to_json(const MonteCarloSpec& mc) {
    Json j;
    j["rounds"] = mc.rounds;
    j["seeds"] = mc.seeds;
    j["confidence_z"] = mc.confidence_z;
    return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scenario parse / serialize
// ---------------------------------------------------------------------------

/// Parse a scenario document. Throws ScenarioError with a field path on any
/// schema violation.
inline Scenario parse_scenario(const Json& j) {
    if (!j.is_object()) {
        throw ScenarioError("(root)", "scenario must be a JSON object");
    }
    Scenario s;
    if (j.contains("schema_version")) {
        s.schema_version =
            detail::int_value(j["schema_version"], "schema_version");
        if (s.schema_version != kScenarioSchemaVersion) {
            throw ScenarioError("schema_version",
                                "unsupported version " +
                                    std::to_string(s.schema_version) +
                                    " (supported: " +
                                    std::to_string(kScenarioSchemaVersion) +
                                    ")");
        }
    }
    if (j.contains("description")) {
        s.description = detail::string_value(j["description"], "description");
    }
    s.network = detail::parse_network(detail::require_key(j, "", "network"),
                                      "network");

    if (j.contains("protocols")) {
        const Json& ps = j["protocols"];
        if (!ps.is_array() || ps.empty()) {
            throw ScenarioError("protocols", "expected a non-empty array");
        }
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const std::string path = "protocols[" + std::to_string(i) + "]";
            if (!ps[i].is_string()) {
                throw ScenarioError(path, "expected a protocol name");
            }
            s.protocols.push_back(
                detail::protocol_from_string(ps[i].get<std::string>(), path));
        }
    } else {
        s.protocols = {Protocol::time_sharing, Protocol::untrusted_broadcast,
                       Protocol::trusted_broadcast, Protocol::plob};
    }

    if (j.contains("trust_ordering")) {
        s.ordering = detail::parse_ordering(j["trust_ordering"],
                                            "trust_ordering", s.network.users);
    }
    if (j.contains("beta")) {
        s.beta = j["beta"].is_number()
                     ? std::vector<double>{j["beta"].get<double>()}
                     : detail::broadcast_numbers(j["beta"], "beta",
                                                 s.network.users);
    }
    for (std::size_t i = 0; i < s.beta.size(); ++i) {
        if (!(s.beta[i] >= 0.0 && s.beta[i] <= 1.0)) {
            throw ScenarioError("beta[" + std::to_string(i) + "]",
                                "must lie in [0, 1]");
        }
    }
    if (j.contains("symbol_rate_hz")) {
        s.symbol_rate_hz =
            detail::number_value(j["symbol_rate_hz"], "symbol_rate_hz");
        if (s.symbol_rate_hz < 0.0) {
            throw ScenarioError("symbol_rate_hz", "must be non-negative");
        }
    }
    if (j.contains("fer")) {
        s.fer = j["fer"].is_number()
                    ? std::vector<double>{j["fer"].get<double>()}
                    : detail::broadcast_numbers(j["fer"], "fer",
                                                s.network.users);
        for (std::size_t i = 0; i < s.fer.size(); ++i) {
            if (!(s.fer[i] >= 0.0 && s.fer[i] <= 1.0)) {
                throw ScenarioError("fer[" + std::to_string(i) + "]",
                                    "must lie in [0, 1]");
            }
        }
    }
    if (j.contains("time_sharing_user")) {
        const int u =
            detail::int_value(j["time_sharing_user"], "time_sharing_user");
        if (u < 0 || u >= s.network.users) {
            throw ScenarioError("time_sharing_user",
                                "user index out of range");
        }
        s.time_sharing_user = u;
    }
    if (j.contains("sweep")) {
        s.sweep = detail::parse_sweep(j["sweep"], "sweep");
        if (j["sweep"].contains("user_counts")) {
            const Json& uc = j["sweep"]["user_counts"];
            if (!uc.is_array() || uc.empty()) {
                throw ScenarioError("sweep.user_counts",
                                    "expected a non-empty array of counts");
            }
            for (std::size_t i = 0; i < uc.size(); ++i) {
                const std::string path =
                    "sweep.user_counts[" + std::to_string(i) + "]";
                if (!uc[i].is_number_integer() || uc[i].get<int>() < 1) {
                    throw ScenarioError(path, "expected a positive integer");
                }
                s.sweep_user_counts.push_back(uc[i].get<int>());
            }
            if (s.sweep->axis == SweepAxis::users_n) {
                throw ScenarioError("sweep.user_counts",
                                    "redundant with a users_n axis");
            }
            if (!s.network.has_uniform_users()) {
                throw ScenarioError("sweep.user_counts",
                                    "requires a uniform user template");
            }
        }
        const bool varies_users =
            s.sweep->axis == SweepAxis::users_n || !s.sweep_user_counts.empty();
        if (varies_users) {
            if (s.beta.size() > 1) {
                throw ScenarioError("beta",
                                    "a user-count sweep needs a scalar beta");
            }
            if (s.fer.size() > 1) {
                throw ScenarioError("fer",
                                    "a user-count sweep needs a scalar fer");
            }
        }
        s.sweep->beta = s.beta;
        s.sweep->ordering = s.ordering;
    }
    if (j.contains("montecarlo")) {
        s.montecarlo = detail::parse_montecarlo(j["montecarlo"], "montecarlo");
    }
    return s;
}

/// Parse a scenario from text.
inline Scenario parse_scenario_text(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw ScenarioError("(root)", "not valid JSON");
    }
    return parse_scenario(j);
}

/// Load a scenario from a file.
inline Scenario load_scenario(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) {
        throw ScenarioError("(file)", "cannot open " + file_path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

/// Serialize to the canonical JSON form (linear units, channel-output
/// noise). Canonical documents round-trip exactly through parse_scenario.
inline Json to_json(const Scenario& s) {
    Json j;
    j["schema_version"] = s.schema_version;
    if (!s.description.empty()) j["description"] = s.description;
    j["network"] = detail::network_to_json(s.network);
    Json protocols = Json::array();
    for (Protocol p : s.protocols) {
        protocols.push_back(detail::protocol_to_scenario_string(p));
    }
    j["protocols"] = protocols;
    j["trust_ordering"] = detail::ordering_to_json(s.ordering);
    j["beta"] = s.beta.size() == 1 ? Json(s.beta[0]) : Json(s.beta);
    if (s.symbol_rate_hz > 0.0) j["symbol_rate_hz"] = s.symbol_rate_hz;
    if (!s.fer.empty()) {
        j["fer"] = s.fer.size() == 1 ? Json(s.fer[0]) : Json(s.fer);
    }
    if (s.time_sharing_user) j["time_sharing_user"] = *s.time_sharing_user;
    if (s.sweep) {
        j["sweep"] = detail::sweep_to_json(*s.sweep);
        if (!s.sweep_user_counts.empty()) {
            j["sweep"]["user_counts"] = s.sweep_user_counts;
        }
    }
    if (s.montecarlo) {
        j["montecarlo"] = detail::montecarlo_to_json(*s.montecarlo);
    }
    return j;
}

/// Per-user beta vector for the engine (broadcasts a scalar).
inline std::vector<double> scenario_beta(const Scenario& s) {
    if (s.beta.size() == 1) {
        return std::vector<double>(static_cast<std::size_t>(s.network.users),
                                   s.beta[0]);
    }
    return s.beta;
}

/// Per-user FER vector (empty scenario field means zero frame errors).
inline std::vector<double> scenario_fer(const Scenario& s) {
    if (s.fer.empty()) {
        return std::vector<double>(static_cast<std::size_t>(s.network.users),
                                   0.0);
    }
    if (s.fer.size() == 1) {
        return std::vector<double>(static_cast<std::size_t>(s.network.users),
                                   s.fer[0]);
    }
    return s.fer;
}

}  // namespace cvqpon
