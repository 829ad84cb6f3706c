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
 * @file cvqpon.cpp
 * @brief Command-line front end: evaluates scenario files.
 *
 * Commands:
 *   cvqpon keyrate    <scenario-file> [--out DIR]
 *   cvqpon sweep      <scenario-file> [--out DIR]
 *   cvqpon montecarlo <scenario-file> [--out DIR] [--seed U64] [--threads K]
 *
 * Exit codes: 0 success, 2 scenario/schema errors (diagnostic names the
 * offending field path), 1 runtime failures.
 */

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvqpon/report.hpp"
#include "cvqpon/runner.hpp"
#include "cvqpon/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitSchema = 2;

struct Options {
    std::string scenario_file;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

void add_common_options(CLI::App* cmd, Options& opt, bool with_mc_options) {
    cmd->add_option("scenario", opt.scenario_file, "scenario file (JSON)")
        ->required();
    cmd->add_option("--out", opt.out_dir,
                    "directory for report.json and the CSV table "
                    "(created if missing)");
    if (with_mc_options) {
        cmd->add_option("--seed", opt.seed,
                        "override the scenario seed list with seeds "
                        "SEED, SEED+1, ... (same count as the scenario)");
        cmd->add_option("--threads", opt.threads,
                        "worker threads for Monte Carlo seeds")
            ->check(CLI::PositiveNumber);
    }
}

void write_outputs(const std::string& out_dir, const cvqpon::Json& report,
                   const std::string& csv_name, const std::string& csv) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto dir = fs::path(out_dir);
    cvqpon::atomic_write_text((dir / "report.json").string(),
                              report.dump(2) + "\n");
    cvqpon::atomic_write_text((dir / csv_name).string(), csv);
    std::cout << "wrote " << (dir / "report.json").string() << " and "
              << (dir / csv_name).string() << "\n";
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

int run_keyrate_cmd(const Options& opt) {
    const cvqpon::Scenario s = cvqpon::load_scenario(opt.scenario_file);
    const auto results = cvqpon::run_keyrate(s);

    if (!s.description.empty()) std::cout << s.description << "\n";
    std::cout << "network: " << s.network.users << " users, V_mod = "
              << fmt(s.network.source.modulation_variance) << " SNU\n";
    for (const auto& r : results) {
        std::cout << "  " << std::left << std::setw(20)
                  << cvqpon::to_string(r.protocol) << " total "
                  << fmt(r.total_key_per_symbol) << " bits/symbol";
        if (s.symbol_rate_hz > 0.0) {
            std::cout << "  (" << fmt(r.total_throughput_bits_per_s / 1e3)
                      << " kbit/s)";
        }
        if (r.unbounded) std::cout << "  [unbounded]";
        std::cout << "\n";
        if (s.network.users <= 16) {
            for (const auto& u : r.per_user) {
                std::cout << "    user " << u.user << ": "
                          << fmt(u.key_per_symbol) << " bits/symbol";
                if (s.symbol_rate_hz > 0.0) {
                    std::cout << "  (" << fmt(u.throughput_bits_per_s / 1e3)
                              << " kbit/s)";
                }
                std::cout << "\n";
            }
        }
    }

    if (!opt.out_dir.empty()) {
        write_outputs(opt.out_dir, cvqpon::keyrate_report_json(s, results),
                      "keyrate.csv", cvqpon::keyrate_csv(s, results));
    }
    return kExitOk;
}

int run_sweep_cmd(const Options& opt) {
    const cvqpon::Scenario s = cvqpon::load_scenario(opt.scenario_file);
    if (!s.sweep) {
        std::cerr << "schema error at sweep: required for the sweep command\n";
        return kExitSchema;
    }
    const auto points = cvqpon::run_sweep(s);

    if (!s.description.empty()) std::cout << s.description << "\n";
    std::cout << "sweep over " << cvqpon::to_string(s.sweep->axis) << ", "
              << points.size() << " points\n";
    if (!points.empty()) {
        const auto& first = points.front();
        const auto& last = points.back();
        std::cout << "  axis range [" << fmt(first.axis_value) << ", "
                  << fmt(last.axis_value) << "]\n"
                  << "  trusted total at last point: "
                  << fmt(last.trusted.total_key_per_symbol)
                  << " bits/symbol over " << last.users << " users\n";
    }

    if (!opt.out_dir.empty()) {
        write_outputs(opt.out_dir, cvqpon::sweep_report_json(s, points),
                      "sweep.csv", cvqpon::sweep_csv(*s.sweep, points));
    }
    return kExitOk;
}

int run_montecarlo_cmd(const Options& opt) {
    cvqpon::Scenario s = cvqpon::load_scenario(opt.scenario_file);
    if (!s.montecarlo) {
        std::cerr << "schema error at montecarlo: required for the "
                     "montecarlo command\n";
        return kExitSchema;
    }
    if (opt.seed) {
        auto& seeds = s.montecarlo->seeds;
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            seeds[i] = *opt.seed + i;
        }
    }
    const auto runs = cvqpon::run_montecarlo(s, opt.threads);

    if (!s.description.empty()) std::cout << s.description << "\n";
    std::cout << "montecarlo: " << runs.size() << " run(s) of "
              << s.montecarlo->rounds << " rounds, z = "
              << fmt(s.montecarlo->confidence_z) << "\n";
    std::size_t eta_hits = 0;
    std::size_t eps_hits = 0;
    std::size_t cells = 0;
    for (const auto& run : runs) {
        for (const auto& u : run.users) {
            ++cells;
            if (u.estimates.eta_hat.contains(u.eta_true)) ++eta_hits;
            if (u.estimates.eps_hat.contains(u.eps_true)) ++eps_hits;
        }
    }
    if (cells > 0) {
        std::cout << "  CI coverage: eta " << eta_hits << "/" << cells
                  << ", excess noise " << eps_hits << "/" << cells << "\n";
    }
    if (!runs.empty() && runs.front().users.size() <= 16) {
        for (const auto& u : runs.front().users) {
            std::cout << "  seed " << runs.front().seed << " user " << u.user
                      << ": eta_hat = " << fmt(u.estimates.eta_hat.point)
                      << " (true " << fmt(u.eta_true) << "), key in ["
                      << fmt(u.key.key_low) << ", " << fmt(u.key.key_high)
                      << "] bits/symbol\n";
        }
    }

    if (!opt.out_dir.empty()) {
        write_outputs(opt.out_dir, cvqpon::montecarlo_report_json(s, runs),
                      "montecarlo.csv", cvqpon::montecarlo_csv(runs));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CV-QPON key-rate calculator for passive optical networks"};
    app.require_subcommand(1);

    Options keyrate_opt, sweep_opt, mc_opt;
    CLI::App* keyrate =
        app.add_subcommand("keyrate", "evaluate protocols at one point");
    add_common_options(keyrate, keyrate_opt, false);
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "evaluate protocols over a grid");
    add_common_options(sweep_cmd, sweep_opt, false);
    CLI::App* mc = app.add_subcommand(
        "montecarlo", "simulate transmission and estimate channels");
    add_common_options(mc, mc_opt, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (keyrate->parsed()) return run_keyrate_cmd(keyrate_opt);
        if (sweep_cmd->parsed()) return run_sweep_cmd(sweep_opt);
        if (mc->parsed()) return run_montecarlo_cmd(mc_opt);
    } catch (const cvqpon::ScenarioError& e) {
        std::cerr << "schema error at " << e.what() << "\n";
        return kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
