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

#ifndef CVQPON_TEST_SUPPORT_HPP
#define CVQPON_TEST_SUPPORT_HPP

#include <cvqpon/network.hpp>

#include <random>

namespace cvqpon::testing {

/// Draw a random physically valid network, spanning symmetric and asymmetric
/// user populations, lossy/noisy provider segments, and imperfect detectors.
inline NetworkParams random_network(std::mt19937_64& rng, int max_users = 6,
                                    bool allow_provider_noise = true) {
    std::uniform_int_distribution<int> users_dist(1, max_users);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    NetworkParams p;
    p.users = users_dist(rng);
    p.source.modulation_variance = 8.0 * unit(rng);
    p.link.eta_a = 0.3 + 0.7 * unit(rng);
    p.link.eps_a = (allow_provider_noise && unit(rng) < 0.5) ? 0.05 * unit(rng) : 0.0;
    for (int l = 0; l < p.users; ++l) {
        p.link.eta_b.push_back(0.1 + 0.9 * unit(rng));
        p.link.eps_b.push_back(0.08 * unit(rng));
        p.detectors.tau.push_back(0.4 + 0.6 * unit(rng));
        p.detectors.nu.push_back(0.3 * unit(rng));
    }
    p.validate();
    return p;
}

}  // namespace cvqpon::testing

#endif  // CVQPON_TEST_SUPPORT_HPP
