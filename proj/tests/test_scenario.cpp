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

#include <cvqpon/report.hpp>
#include <cvqpon/runner.hpp>
#include <cvqpon/scenario.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace {

using namespace cvqpon;

/// Expect a parse failure whose field path contains `path_fragment`.
void expect_schema_error(const std::string& text,
                         const std::string& path_fragment) {
    try {
        parse_scenario_text(text);
        FAIL("expected a schema error mentioning \"" << path_fragment
                                                     << "\"");
    } catch (const ScenarioError& e) {
        INFO("diagnostic: " << e.what());
        REQUIRE(e.field_path().find(path_fragment) != std::string::npos);
    }
}

/// A small symmetric scenario used across cases.
std::string uniform_scenario_text() {
    return R"({
      "schema_version": 1,
      "description": "three-user symmetric test network",
      "network": {
        "users": 3,
        "modulation_variance_snu": 4.0,
        "branch_transmittance": 0.8,
        "excess_noise_snu": 0.01,
        "detector_efficiency": 0.7,
        "electronic_noise_snu": 0.05
      },
      "beta": 0.95,
      "symbol_rate_hz": 1.0e8
    })";
}

}  // namespace

TEST_CASE("scenario parses every field into canonical form", "[scenario]") {
    const std::string text = R"({
      "schema_version": 1,
      "description": "full-schema document",
      "network": {
        "users": 2,
        "modulation_variance_snu": 1.5,
        "provider_transmittance": 0.9,
        "provider_excess_noise_snu": 0.002,
        "branch_transmittance": [0.5, 0.25],
        "excess_noise_snu": [0.01, 0.02],
        "excess_noise_reference": "channel_output",
        "detector_efficiency": [0.7, 0.6],
        "electronic_noise_snu": [0.05, 0.04],
        "split_weights": [0.25, 0.75]
      },
      "protocols": ["untrusted", "trusted", "time_sharing", "plob"],
      "trust_ordering": [1, 0],
      "beta": [0.9, 0.92],
      "symbol_rate_hz": 5.0e7,
      "fer": [0.1, 0.2],
      "time_sharing_user": 1,
      "montecarlo": { "rounds": 50000, "seeds": [7, 8, 9] }
    })";
    const Scenario s = parse_scenario_text(text);

    CHECK(s.schema_version == 1);
    CHECK(s.description == "full-schema document");
    CHECK(s.network.users == 2);
    CHECK(s.network.source.modulation_variance == 1.5);
    CHECK(s.network.link.eta_a == 0.9);
    CHECK(s.network.link.eps_a == 0.002);
    CHECK(s.network.link.eta_b == std::vector<double>{0.5, 0.25});
    CHECK(s.network.link.eps_b == std::vector<double>{0.01, 0.02});
    CHECK(s.network.detectors.tau == std::vector<double>{0.7, 0.6});
    CHECK(s.network.detectors.nu == std::vector<double>{0.05, 0.04});
    CHECK(s.network.split_weights == std::vector<double>{0.25, 0.75});
    REQUIRE(s.protocols.size() == 4);
    CHECK(s.ordering.strategy == TrustStrategy::explicit_order);
    CHECK(s.ordering.explicit_order == std::vector<int>{1, 0});
    CHECK(s.beta == std::vector<double>{0.9, 0.92});
    CHECK(s.symbol_rate_hz == 5.0e7);
    CHECK(s.fer == std::vector<double>{0.1, 0.2});
    REQUIRE(s.time_sharing_user.has_value());
    CHECK(*s.time_sharing_user == 1);
    REQUIRE(s.montecarlo.has_value());
    CHECK(s.montecarlo->rounds == 50000);
    CHECK(s.montecarlo->seeds == std::vector<std::uint64_t>{7, 8, 9});
    CHECK(s.montecarlo->confidence_z == kDefaultConfidenceZ);
}

TEST_CASE("scenario defaults fill in when fields are omitted", "[scenario]") {
    const Scenario s = parse_scenario_text(uniform_scenario_text());
    REQUIRE(s.protocols.size() == 4);  // all protocols by default
    CHECK(s.ordering.strategy == TrustStrategy::ascending_untrusted_key);
    CHECK(s.beta == std::vector<double>{0.95});
    CHECK(s.fer.empty());
    CHECK(scenario_beta(s) == std::vector<double>{0.95, 0.95, 0.95});
    CHECK(scenario_fer(s) == std::vector<double>{0.0, 0.0, 0.0});
    CHECK_FALSE(s.sweep.has_value());
    CHECK_FALSE(s.montecarlo.has_value());
    CHECK_FALSE(s.time_sharing_user.has_value());
}

TEST_CASE("user-station noise is rescaled by the detector efficiency",
          "[scenario]") {
    const std::string text = R"({
      "network": {
        "users": 2,
        "modulation_variance_snu": 1.26,
        "branch_transmittance": 0.3,
        "excess_noise_snu": [0.000794, 0.001558],
        "excess_noise_reference": "user_station",
        "detector_efficiency": 0.685,
        "electronic_noise_snu": 0.05
      }
    })";
    const Scenario s = parse_scenario_text(text);
    CHECK(s.network.link.eps_b[0] == Catch::Approx(0.000794 / 0.685));
    CHECK(s.network.link.eps_b[1] == Catch::Approx(0.001558 / 0.685));
    // the canonical serialization carries the converted channel-output form
    const Json round = to_json(s);
    CHECK(round["network"]["excess_noise_reference"] == "channel_output");
    CHECK(round["network"]["excess_noise_snu"][0].get<double>() ==
          Catch::Approx(0.000794 / 0.685));
}

TEST_CASE("transmittance conventions convert at parse time", "[scenario]") {
    SECTION("user_transmittance divides out provider and splitter share") {
        const std::string text = R"({
          "network": {
            "users": 4,
            "modulation_variance_snu": 2.0,
            "provider_transmittance": 0.8,
            "user_transmittance": 0.05,
            "excess_noise_snu": 0.0,
            "detector_efficiency": 0.9,
            "electronic_noise_snu": 0.0
          }
        })";
        const Scenario s = parse_scenario_text(text);
        // eta_total = eta_a * w * eta_b with w = 1/4
        CHECK(s.network.link.eta_b[0] == Catch::Approx(0.05 / (0.8 * 0.25)));
        CHECK(s.network.eta_total(0) == Catch::Approx(0.05));
    }
    SECTION("channel_loss_db excludes the splitter share") {
        const std::string text = R"({
          "network": {
            "users": 4,
            "modulation_variance_snu": 2.0,
            "channel_loss_db": 10.0,
            "excess_noise_snu": 0.0,
            "detector_efficiency": 0.9,
            "electronic_noise_snu": 0.0
          }
        })";
        const Scenario s = parse_scenario_text(text);
        CHECK(s.network.link.eta_b[0] == Catch::Approx(0.1));
        CHECK(s.network.eta_total(0) == Catch::Approx(0.1 / 4.0));
    }
    SECTION("a user cannot transmit more than its splitter share") {
        const std::string text = R"({
          "network": {
            "users": 2,
            "modulation_variance_snu": 2.0,
            "user_transmittance": 0.6,
            "excess_noise_snu": 0.0,
            "detector_efficiency": 0.9,
            "electronic_noise_snu": 0.0
          }
        })";
        expect_schema_error(text, "network.user_transmittance[0]");
    }
}

TEST_CASE("schema violations carry field paths", "[scenario]") {
    expect_schema_error("this is not json", "(root)");
    expect_schema_error(R"({"description": "no network"})", "network");
    expect_schema_error(R"({"schema_version": 99, "network": {}})",
                        "schema_version");

    const auto with_network = [](const std::string& body) {
        return R"({"network": {"users": 2, "modulation_variance_snu": 2.0,
                  "branch_transmittance": 0.5, "excess_noise_snu": 0.01,
                  "detector_efficiency": 0.7, "electronic_noise_snu": 0.05})" +
               body + "}";
    };

    expect_schema_error(R"({"network": {"users": 0}})", "network.users");
    expect_schema_error(
        R"({"network": {"users": 2, "modulation_variance_snu": "high"}})",
        "network.modulation_variance_snu");
    expect_schema_error(
        R"({"network": {"users": 2, "modulation_variance_snu": 2.0,
           "branch_transmittance": 0.5, "user_transmittance": 0.1,
           "excess_noise_snu": 0.01, "detector_efficiency": 0.7,
           "electronic_noise_snu": 0.05}})",
        "network.branch_transmittance");
    expect_schema_error(
        R"({"network": {"users": 3, "modulation_variance_snu": 2.0,
           "branch_transmittance": 0.5, "excess_noise_snu": [0.01, 0.02],
           "detector_efficiency": 0.7, "electronic_noise_snu": 0.05}})",
        "network.excess_noise_snu");
    expect_schema_error(
        R"({"network": {"users": 2, "modulation_variance_snu": 2.0,
           "branch_transmittance": 0.5, "excess_noise_snu": 0.01,
           "excess_noise_reference": "somewhere",
           "detector_efficiency": 0.7, "electronic_noise_snu": 0.05}})",
        "network.excess_noise_reference");

    expect_schema_error(with_network(R"(, "protocols": ["trusted", "bogus"])"),
                        "protocols[1]");
    expect_schema_error(with_network(R"(, "beta": 1.5)"), "beta[0]");
    expect_schema_error(with_network(R"(, "fer": [0.5, -0.1])"), "fer[1]");
    expect_schema_error(with_network(R"(, "time_sharing_user": 7)"),
                        "time_sharing_user");
    expect_schema_error(with_network(R"(, "trust_ordering": [0])"),
                        "trust_ordering");
    expect_schema_error(
        with_network(R"(, "sweep": {"axis": "sideways", "grid": [1.0]})"),
        "sweep.axis");
    expect_schema_error(
        with_network(
            R"(, "sweep": {"axis": "users_n",
                "grid": {"start": 2, "stop": 4, "points": 0}})"),
        "sweep.grid.points");
    expect_schema_error(
        with_network(
            R"(, "sweep": {"axis": "users_n", "grid": [2, 3],
                "user_counts": [2, 4]})"),
        "sweep.user_counts");
    expect_schema_error(
        with_network(
            R"(, "beta": [0.9, 0.95],
                "sweep": {"axis": "users_n", "grid": [2, 3]})"),
        "beta");
    expect_schema_error(
        with_network(R"(, "montecarlo": {"rounds": 10.5, "seeds": [1]})"),
        "montecarlo.rounds");
    expect_schema_error(
        with_network(R"(, "montecarlo": {"rounds": 100, "seeds": []})"),
        "montecarlo.seeds");
}

TEST_CASE("scenario round-trips through its canonical serialization",
          "[scenario]") {
    const std::string text = R"({
      "description": "round trip",
      "network": {
        "users": 3,
        "modulation_variance_snu": 1.26,
        "user_transmittance": [0.03, 0.04, 0.05],
        "excess_noise_snu": [0.0008, 0.0016, 0.0012],
        "excess_noise_reference": "user_station",
        "detector_efficiency": 0.685,
        "electronic_noise_snu": [0.051, 0.053, 0.055]
      },
      "protocols": ["untrusted", "trusted"],
      "trust_ordering": "descending",
      "beta": [0.91, 0.93, 0.92],
      "symbol_rate_hz": 1.0e8,
      "fer": 0.1,
      "sweep": {
        "axis": "channel_loss_db",
        "grid": { "start": 1.0, "stop": 5.0, "points": 5 },
        "epsilon_model": { "base_snu": 0.0001, "slope_snu_per_unit": 0.001 }
      },
      "montecarlo": { "rounds": 20000, "seeds": { "count": 3, "base": 11 } }
    })";
    const Scenario s = parse_scenario_text(text);
    const Json canonical = to_json(s);
    const Scenario reparsed = parse_scenario(canonical);
    CHECK(to_json(reparsed) == canonical);

    // derived seed list materialized into explicit seeds
    CHECK(canonical["montecarlo"]["seeds"] ==
          Json(std::vector<std::uint64_t>{11, 12, 13}));
    // linspace grid materialized into explicit values
    CHECK(canonical["sweep"]["grid"] ==
          Json(std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0}));
}

TEST_CASE("bundled-style sweep with user_counts repeats per count",
          "[scenario][runner]") {
    const std::string text = R"({
      "network": {
        "users": 8,
        "modulation_variance_snu": 4.0,
        "branch_transmittance": 1.0,
        "excess_noise_snu": 0.005,
        "detector_efficiency": 0.86,
        "electronic_noise_snu": 0.02
      },
      "beta": 0.95,
      "sweep": {
        "axis": "channel_loss_db",
        "grid": [2.0, 6.0, 10.0],
        "user_counts": [2, 4]
      }
    })";
    const Scenario s = parse_scenario_text(text);
    const auto points = run_sweep(s);
    REQUIRE(points.size() == 6);
    CHECK(points[0].users == 2);
    CHECK(points[2].users == 2);
    CHECK(points[3].users == 4);
    CHECK(points[5].users == 4);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(points[i].axis_value == Catch::Approx(2.0 + 4.0 * i));
        CHECK(points[i + 3].axis_value == Catch::Approx(2.0 + 4.0 * i));
    }

    // each block matches a direct sweep at that user count
    NetworkParams two = detail::at_grid_point(s.network, SweepAxis::users_n,
                                              2.0, std::nullopt);
    const auto direct = sweep(two, *s.sweep);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(points[i].trusted.total_key_per_symbol ==
              direct[i].trusted.total_key_per_symbol);
        CHECK(points[i].untrusted.total_key_per_symbol ==
              direct[i].untrusted.total_key_per_symbol);
    }
}

TEST_CASE("run_keyrate matches direct protocol evaluation",
          "[scenario][runner]") {
    const Scenario s = parse_scenario_text(uniform_scenario_text());
    const auto results = run_keyrate(s);
    REQUIRE(results.size() == 4);

    const auto betas = scenario_beta(s);
    const auto direct_ts = time_sharing_total(s.network, betas);
    const auto direct_u = untrusted_total(s.network, betas);
    const auto direct_t = trusted_total(s.network, betas, s.ordering);
    const auto direct_p = plob_benchmark(s.network);

    CHECK(results[0].protocol == Protocol::time_sharing);
    CHECK(results[0].total_key_per_symbol == direct_ts.total_key_per_symbol);
    CHECK(results[1].protocol == Protocol::untrusted_broadcast);
    CHECK(results[1].total_key_per_symbol == direct_u.total_key_per_symbol);
    CHECK(results[2].protocol == Protocol::trusted_broadcast);
    CHECK(results[2].total_key_per_symbol == direct_t.total_key_per_symbol);
    CHECK(results[3].protocol == Protocol::plob);
    CHECK(results[3].total_key_per_symbol == direct_p.total_key_per_symbol);

    // symbol rate present: throughputs are filled; the capacity benchmark
    // never takes a frame-error penalty
    CHECK(results[1].total_throughput_bits_per_s ==
          Catch::Approx(results[1].total_key_per_symbol * 1.0e8));
    CHECK(results[3].total_throughput_bits_per_s ==
          Catch::Approx(results[3].total_key_per_symbol * 1.0e8));
}

TEST_CASE("keyrate CSV has the documented fixed header and one row per "
          "protocol-user pair",
          "[scenario][report]") {
    const Scenario s = parse_scenario_text(uniform_scenario_text());
    const auto results = run_keyrate(s);
    const std::string csv = keyrate_csv(s, results);

    std::istringstream is(csv);
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == kKeyrateCsvHeader);
    int rows = 0;
    while (std::getline(is, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 4 * 3);

    const Json report = keyrate_report_json(s, results);
    CHECK(report["schema_version"] == kReportSchemaVersion);
    CHECK(report["command"] == "keyrate");
    CHECK(report["scenario"]["network"]["users"] == 3);
    REQUIRE(report["results"].size() == 4);
    CHECK(report["results"][0]["per_user"].size() == 3);
}

TEST_CASE("sweep CSV rows follow grid-then-protocol order",
          "[scenario][report]") {
    const std::string text = R"({
      "network": {
        "users": 2,
        "modulation_variance_snu": 4.0,
        "branch_transmittance": 1.0,
        "excess_noise_snu": 0.005,
        "detector_efficiency": 0.86,
        "electronic_noise_snu": 0.02
      },
      "beta": 0.95,
      "sweep": { "axis": "channel_loss_db", "grid": [1.0, 3.0] }
    })";
    const Scenario s = parse_scenario_text(text);
    const auto points = run_sweep(s);
    const std::string csv = sweep_csv(*s.sweep, points);

    std::istringstream is(csv);
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == kSweepCsvHeader);
    std::vector<std::string> rows;
    while (std::getline(is, line)) {
        if (!line.empty()) rows.push_back(line);
    }
    REQUIRE(rows.size() == 2 * 4);
    CHECK(rows[0].rfind("channel_loss_db,1,2,time_sharing", 0) == 0);
    CHECK(rows[1].rfind("channel_loss_db,1,2,untrusted_broadcast", 0) == 0);
    CHECK(rows[2].rfind("channel_loss_db,1,2,trusted_broadcast", 0) == 0);
    CHECK(rows[3].rfind("channel_loss_db,1,2,plob", 0) == 0);
    CHECK(rows[4].rfind("channel_loss_db,3,2,time_sharing", 0) == 0);

    const Json report = sweep_report_json(s, points);
    CHECK(report["command"] == "sweep");
    CHECK(report["axis"] == "channel_loss_db");
    REQUIRE(report["results"].size() == 2);
    CHECK(report["results"][0]["protocols"].size() == 4);
}

TEST_CASE("montecarlo runner produces ordered, bracketed estimates",
          "[scenario][runner][report]") {
    const std::string text = R"({
      "network": {
        "users": 2,
        "modulation_variance_snu": 4.0,
        "branch_transmittance": 0.5,
        "excess_noise_snu": 0.01,
        "detector_efficiency": 0.7,
        "electronic_noise_snu": 0.05
      },
      "beta": 0.95,
      "montecarlo": { "rounds": 20000, "seeds": [42, 43, 44] }
    })";
    const Scenario s = parse_scenario_text(text);
    const auto runs = run_montecarlo(s);
    REQUIRE(runs.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(runs[i].seed == 42 + i);
        CHECK(runs[i].rounds == 20000);
        REQUIRE(runs[i].users.size() == 2);
        for (const auto& u : runs[i].users) {
            CHECK(u.key.key_low <= u.key.key_point);
            CHECK(u.key.key_point <= u.key.key_high);
            CHECK(u.estimates.eta_hat.lower < u.estimates.eta_hat.upper);
            CHECK(u.eta_true == Catch::Approx(s.network.eta_total(u.user)));
            CHECK(u.mi_alice_bits > 0.0);
        }
    }

    SECTION("thread count does not change results") {
        const auto parallel = run_montecarlo(s, 3);
        REQUIRE(parallel.size() == runs.size());
        for (std::size_t i = 0; i < runs.size(); ++i) {
            for (std::size_t l = 0; l < runs[i].users.size(); ++l) {
                CHECK(parallel[i].users[l].estimates.eta_hat.point ==
                      runs[i].users[l].estimates.eta_hat.point);
                CHECK(parallel[i].users[l].estimates.eps_hat.point ==
                      runs[i].users[l].estimates.eps_hat.point);
                CHECK(parallel[i].users[l].key.key_point ==
                      runs[i].users[l].key.key_point);
            }
        }
    }

    SECTION("CSV and JSON serialization") {
        const std::string csv = montecarlo_csv(runs);
        std::istringstream is(csv);
        std::string line;
        REQUIRE(std::getline(is, line));
        CHECK(line == kMonteCarloCsvHeader);
        int rows = 0;
        while (std::getline(is, line)) {
            if (!line.empty()) ++rows;
        }
        CHECK(rows == 3 * 2);

        const Json report = montecarlo_report_json(s, runs);
        CHECK(report["command"] == "montecarlo");
        REQUIRE(report["results"].size() == 3);
        CHECK(report["results"][0]["users"].size() == 2);
        CHECK(report["results"][0]["users"][0]["confidence_z"] ==
              kDefaultConfidenceZ);
    }
}

TEST_CASE("non-finite totals serialize as JSON null with an unbounded flag",
          "[scenario][report]") {
    const std::string text = R"({
      "network": {
        "users": 1,
        "modulation_variance_snu": 2.0,
        "branch_transmittance": 1.0,
        "excess_noise_snu": 0.0,
        "detector_efficiency": 1.0,
        "electronic_noise_snu": 0.0
      },
      "protocols": ["plob"]
    })";
    const Scenario s = parse_scenario_text(text);
    const auto results = run_keyrate(s);
    REQUIRE(results.size() == 1);
    CHECK(results[0].unbounded);
    const Json report = keyrate_report_json(s, results);
    CHECK(report["results"][0]["unbounded"] == true);
    CHECK(report["results"][0]["total_key_bits_per_symbol"].is_null());
    // CSV spells out the infinity instead
    const std::string csv = keyrate_csv(s, results);
    CHECK(csv.find("inf") != std::string::npos);
}

TEST_CASE("atomic_write_text replaces files without leaving temporaries",
          "[report]") {
    const std::string path = "scenario_test_atomic.txt";
    atomic_write_text(path, "first\n");
    atomic_write_text(path, "second\n");
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(content == "second\n");
    std::ifstream tmp(path + ".tmp");
    CHECK_FALSE(tmp.good());
    std::remove(path.c_str());
}
