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

#include <cvqpon/network.hpp>

#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace cvqpon;

namespace {

Matrix canonical_cov(const GaussianState& state, const std::vector<ModeLabel>& order) {
    return restrict_to(state, order).cov();
}

std::vector<ModeLabel> broadcast_order(int n) {
    std::vector<ModeLabel> order{alice_x_label(), alice_p_label()};
    for (int l = 0; l < n; ++l) order.push_back(user_label(l));
    return order;
}

}  // namespace

TEST_CASE("signal stage has the documented provider block and purity", "[network]") {
    SourceParams src;
    src.modulation_variance = 3.0;  // V = 4
    const auto state = build_signal_stage(src);
    REQUIRE(state.n_modes() == 3);

    const Matrix ax = state.block(state.index_of(alice_x_label()), state.index_of(alice_x_label()));
    const Matrix ap = state.block(state.index_of(alice_p_label()), state.index_of(alice_p_label()));
    const Matrix cross =
        state.block(state.index_of(alice_x_label()), state.index_of(alice_p_label()));
    CHECK(ax.isApprox(2.5 * Matrix::Identity(2, 2), 1e-12));
    CHECK(ap.isApprox(2.5 * Matrix::Identity(2, 2), 1e-12));
    CHECK(cross.isApprox(1.5 * Matrix::Identity(2, 2), 1e-12));

    // Both provider arms couple identically to the signal mode.
    const Matrix c1 = state.block(state.index_of(alice_x_label()), state.index_of(signal_label()));
    const Matrix c2 = state.block(state.index_of(alice_p_label()), state.index_of(signal_label()));
    const double expect = std::sqrt((4.0 * 4.0 - 1.0) / 2.0);
    Eigen::Matrix2d sz;
    sz << 1.0, 0.0, 0.0, -1.0;
    CHECK(c1.isApprox(expect * sz, 1e-12));
    CHECK(c2.isApprox(expect * sz, 1e-12));

    CHECK(von_neumann_entropy(state) < 1e-9);
    CHECK(is_bona_fide(state));

    SourceParams off;  // no modulation: the signal mode is vacuum
    const auto idle = build_signal_stage(off);
    CHECK(restrict_to(idle, {signal_label()}).cov().isApprox(Matrix::Identity(2, 2), 1e-12));
}

TEST_CASE("broadcast state matches the closed form", "[network]") {
    std::mt19937_64 rng(0xb0a5u);
    for (int draw = 0; draw < 30; ++draw) {
        const auto params = testing::random_network(rng);
        const auto assembled = build_broadcast_state(params);
        const auto closed = broadcast_closed_form(params);
        const auto order = broadcast_order(params.users);
        const Matrix d = canonical_cov(assembled, order) - canonical_cov(closed, order);
        INFO("draw " << draw << " users " << params.users << " eps_a " << params.link.eps_a);
        CHECK(d.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("splitter topology does not affect the assembled state", "[network]") {
    std::mt19937_64 rng(0x70b0u);
    for (int n : {2, 4, 8}) {
        auto params = testing::random_network(rng, /*max_users=*/1);
        // Re-dimension the draw to exactly n users with fresh per-user values.
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        params.users = n;
        params.link.eta_b.clear();
        params.link.eps_b.clear();
        params.detectors.tau.clear();
        params.detectors.nu.clear();
        for (int l = 0; l < n; ++l) {
            params.link.eta_b.push_back(0.2 + 0.8 * unit(rng));
            params.link.eps_b.push_back(0.05 * unit(rng));
            params.detectors.tau.push_back(0.5 + 0.5 * unit(rng));
            params.detectors.nu.push_back(0.2 * unit(rng));
        }
        params.validate();
        const auto order = broadcast_order(n);
        const Matrix tree =
            canonical_cov(build_broadcast_state(params, SplitterTopology::balanced_tree), order);
        const Matrix chain =
            canonical_cov(build_broadcast_state(params, SplitterTopology::sequential), order);
        CHECK((tree - chain).cwiseAbs().maxCoeff() < 1e-12);
    }
    const auto p3 = NetworkParams::uniform(3, 1.0, 0.8, 0.01, 0.9, 0.05);
    CHECK_THROWS_AS(build_broadcast_state(p3, SplitterTopology::balanced_tree),
                    std::invalid_argument);
}

TEST_CASE("detector stage matches its closed form", "[network]") {
    std::mt19937_64 rng(0xde7ecu);
    for (int draw = 0; draw < 20; ++draw) {
        const auto params = testing::random_network(rng, /*max_users=*/4);
        const auto full = build_network_state(params);
        for (int l = 0; l < params.users; ++l) {
            const Matrix expect = detector_arm_closed_form(params, l);
            for (Arm arm : {Arm::x, Arm::p}) {
                const auto block = restrict_to(
                    full, {user_label(l, arm), detector_noise_label(l, arm), purifier_label(l, arm)});
                INFO("draw " << draw << " user " << l);
                CHECK((block.cov() - expect).cwiseAbs().maxCoeff() < 1e-10);
            }
            CHECK(std::abs(expect(0, 0) - user_arm_variance(params, l)) < 1e-12);
        }
    }
}

TEST_CASE("measured-arm variance matches deployment-style parameters", "[network]") {
    // One asymmetric 8-user population with realistic loss/noise figures.
    NetworkParams p;
    p.users = 8;
    p.source.modulation_variance = 1.26;
    p.link.eta_a = 1.0;
    p.link.eps_a = 0.0;
    p.link.eta_b = {0.2952, 0.3392, 0.3512, 0.3176, 0.3688, 0.2696, 0.3184, 0.3704};
    p.link.eps_b = {0.794e-3, 1.558e-3, 1.23e-3, 0.912e-3, 0.814e-3, 1.002e-3, 1.578e-3, 0.866e-3};
    p.detectors.tau.assign(8, 0.685);
    p.detectors.nu = {51.24e-3, 52.76e-3, 55.42e-3, 49.74e-3, 60.14e-3, 53.14e-3, 75.18e-3,
                      52.66e-3};
    p.validate();

    CHECK(p.eta_total(4) == Catch::Approx(0.0461).margin(1e-12));
    const auto full = build_network_state(p);
    for (int l = 0; l < 8; ++l) {
        const double expect =
            1.0 + 0.685 * (p.eta_total(l) * 1.26 + p.eps_total(l)) / 2.0 + p.detectors.nu[l];
        const auto arm = restrict_to(full, {user_label(l, Arm::x)});
        CHECK(arm.cov()(0, 0) == Catch::Approx(expect).epsilon(1e-12));
        CHECK(user_arm_variance(p, l) == Catch::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("cross-user correlation matches the assembled state", "[network]") {
    std::mt19937_64 rng(0xc0ffu);
    for (int draw = 0; draw < 15; ++draw) {
        auto params = testing::random_network(rng);
        if (params.users < 2) params = NetworkParams::uniform(3, 2.0, 0.7, 0.01, 0.8, 0.05);
        const auto full = build_network_state(params);
        for (int i = 0; i < params.users; ++i) {
            for (int j = i + 1; j < params.users; ++j) {
                const Matrix b = full.block(full.index_of(user_label(i, Arm::x)),
                                            full.index_of(user_label(j, Arm::x)));
                const double expect = cross_user_correlation(params, i, j);
                INFO("draw " << draw << " pair " << i << "," << j);
                CHECK(std::abs(b(0, 0) - expect) < 1e-10);
                CHECK(std::abs(b(1, 1) - expect) < 1e-10);
                CHECK(std::abs(b(0, 1)) < 1e-10);
                CHECK(expect > 0.0);
            }
        }
    }
    const auto p = NetworkParams::uniform(2, 1.0, 0.5, 0.0, 0.9, 0.0);
    CHECK_THROWS_AS(cross_user_correlation(p, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(cross_user_correlation(p, 0, 2), std::invalid_argument);
}

TEST_CASE("assembled states are bona fide and pure when lossless", "[network]") {
    std::mt19937_64 rng(0xf1deu);
    for (int draw = 0; draw < 10; ++draw) {
        const auto params = testing::random_network(rng, /*max_users=*/4);
        const auto full = build_network_state(params);
        REQUIRE(full.n_modes() == 2 + 6 * params.users);
        INFO("draw " << draw);
        CHECK(is_bona_fide(full, 1e-7));
    }

    // No channel loss, no excess noise: the trusted state is globally pure
    // (detector purifiers are retained), so its entropy vanishes.
    for (int n : {1, 2, 3}) {
        const auto params = NetworkParams::uniform(n, 2.0, 1.0, 0.0, 0.7, 0.08);
        const auto full = build_network_state(params);
        CHECK(von_neumann_entropy(full) < 1e-7);
    }
}

TEST_CASE("unequal splitter shares are honored end to end", "[network]") {
    NetworkParams p = NetworkParams::uniform(3, 2.0, 0.6, 0.008, 0.8, 0.05, 0.9, 0.01);
    p.split_weights = {0.5, 0.3, 0.2};
    p.validate();

    CHECK(p.eta_total(0) == Catch::Approx(0.9 * 0.6 * 0.5).epsilon(1e-12));
    CHECK_FALSE(p.has_uniform_users());

    const auto order = broadcast_order(3);
    const Matrix assembled = canonical_cov(build_broadcast_state(p), order);
    const Matrix closed = canonical_cov(broadcast_closed_form(p), order);
    CHECK((assembled - closed).cwiseAbs().maxCoeff() < 1e-10);

    const auto full = build_network_state(p);
    const Matrix c01 = full.block(full.index_of(user_label(0, Arm::x)),
                                  full.index_of(user_label(1, Arm::x)));
    CHECK(std::abs(c01(0, 0) - cross_user_correlation(p, 0, 1)) < 1e-10);

    CHECK_THROWS_AS(build_broadcast_state(p, SplitterTopology::balanced_tree),
                    std::invalid_argument);
    auto bad = p;
    bad.split_weights = {0.5, 0.3, 0.3};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.split_weights = {0.5, 0.5, 0.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.split_weights = {0.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("parameter validation rejects unphysical networks", "[network]") {
    auto good = NetworkParams::uniform(2, 1.0, 0.5, 0.01, 0.9, 0.05);
    CHECK_NOTHROW(good.validate());

    auto bad = good;
    bad.users = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.link.eta_b[1] = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.link.eta_b[1] = 1.2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.link.eps_b[0] = -1e-6;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.detectors.tau[0] = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.detectors.nu[1] = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.detectors.tau.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.source.modulation_variance = -0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.link.eta_a = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    CHECK(good.has_uniform_users());
    good.detectors.nu[1] = 0.06;
    CHECK_FALSE(good.has_uniform_users());
}
