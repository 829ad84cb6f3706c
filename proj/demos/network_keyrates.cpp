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
 * @file network_keyrates.cpp
 * @brief Builds a small asymmetric broadcast network in code and compares
 *        the per-user keys of the three access protocols.
 */

#include <cvqpon/protocols.hpp>

#include <iomanip>
#include <iostream>

int main() {
    using namespace cvqpon;

    // four users behind one passive splitter, each with its own branch loss,
    // excess noise, and receiver imperfections
    NetworkParams net;
    net.users = 4;
    net.source.modulation_variance = 2.5;
    net.link.eta_a = 0.95;
    net.link.eps_a = 0.0005;
    net.link.eta_b = {0.70, 0.55, 0.40, 0.25};
    net.link.eps_b = {0.004, 0.006, 0.008, 0.010};
    net.detectors.tau = {0.70, 0.68, 0.72, 0.65};
    net.detectors.nu = {0.04, 0.05, 0.06, 0.05};
    net.validate();

    const std::vector<double> beta{0.95};
    const auto ts = time_sharing_total(net, beta, 0);
    const auto untrusted = untrusted_total(net, beta);
    const auto trusted = trusted_total(net, beta);
    const auto plob = plob_benchmark(net);

    std::cout << "per-user secret key, bits/symbol\n"
              << std::setw(6) << "user" << std::setw(14) << "time-share"
              << std::setw(14) << "untrusted" << std::setw(14) << "trusted"
              << std::setw(14) << "plob bound" << "\n";
    std::cout << std::fixed << std::setprecision(6);
    for (int l = 0; l < net.users; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        std::cout << std::setw(6) << l << std::setw(14)
                  << ts.per_user[ul].key_per_symbol << std::setw(14)
                  << untrusted.per_user[ul].key_per_symbol << std::setw(14)
                  << trusted.per_user[ul].key_per_symbol << std::setw(14)
                  << plob.per_user[ul].key_per_symbol << "\n";
    }
    std::cout << std::setw(6) << "total" << std::setw(14)
              << ts.total_key_per_symbol << std::setw(14)
              << untrusted.total_key_per_symbol << std::setw(14)
              << trusted.total_key_per_symbol << std::setw(14)
              << plob.total_key_per_symbol << "\n\n";

    std::cout << "realized trust order (weakest first):";
    for (int u : trusted.realized_order) std::cout << ' ' << u;
    std::cout << "\n";
    return 0;
}
