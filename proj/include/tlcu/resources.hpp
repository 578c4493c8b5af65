// Copyright 2026 The tlcu Authors
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
 * @file
 * Qubit and gate counts of the circuit-level construction. The simulator
 * never builds these circuits; the counts use explicit constants
 * (c_prep, c_toffoli) for the pieces that are only known up to O(.).
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "dyson.hpp"
#include "hamiltonian.hpp"
#include "taylor_lcu.hpp"

namespace tlcu {

struct ResourceConstants {
    /// Gates per amplitude of an arbitrary state preparation on one register.
    std::uint64_t c_prep = 2;
    /// Gates per control qubit of a generalized Toffoli.
    std::uint64_t c_toffoli = 6;
};

/// ceil(log2 x) for x >= 1.
constexpr std::uint64_t ceil_log2(std::uint64_t x) {
    std::uint64_t bits = 0;
    while ((std::uint64_t{1} << bits) < x) {
        ++bits;
    }
    return bits;
}

struct ResourceEstimate {
    std::uint64_t K = 0;
    std::uint64_t r = 0;
    std::uint64_t L = 0;
    std::uint64_t n = 0;
    std::uint64_t M = 1;
    double t = 0.0;
    double epsilon = 0.0;
    ResourceConstants constants;

    std::uint64_t ancilla_qubits = 0;
    std::uint64_t b_gates_per_segment = 0;
    std::uint64_t selectV_gates_per_segment = 0;
    std::uint64_t total_gates = 0;
    std::vector<std::string> asymptotic_labels;
};

/**
 * @brief Counts for given (K, r, L, n, M).
 *
 * Unary order register (K qubits), K index registers of ceil(log2 L) qubits,
 * K time registers of ceil(log2 M) qubits when M > 1, and one flag qubit for
 * the last segment. One amplification step uses sel(V) three times and B
 * (or its adjoint) six times.
 */
inline ResourceEstimate count_resources(std::uint64_t K, std::uint64_t r, std::uint64_t L,
                                        std::uint64_t n, std::uint64_t M = 1,
                                        const ResourceConstants &constants = {}) {
    if (L < 1 || n < 1 || M < 1) {
        throw ValidationError("L, n and M must be at least 1");
    }
    ResourceEstimate e;
    e.K = K;
    e.r = r;
    e.L = L;
    e.n = n;
    e.M = M;
    e.constants = constants;
    const std::uint64_t log_l = ceil_log2(L);
    e.ancilla_qubits = K + K * log_l + (M > 1 ? K * ceil_log2(M) : 0) + 1;
    e.b_gates_per_segment = K + K * constants.c_prep * L;
    e.selectV_gates_per_segment = K * L * (n + log_l + constants.c_toffoli * log_l);
    e.total_gates = r * (3 * e.b_gates_per_segment * 2 + e.selectV_gates_per_segment * 3);
    e.asymptotic_labels = {
        "K = O(log(T/eps) / log log(T/eps))",
        "ancilla qubits = O(log(L) log(T/eps) / log log(T/eps))",
        "sel(V) gates per segment = O(L (n + log L) log(T/eps) / log log(T/eps))",
        "total gates = O(T L (n + log L) log(T/eps) / log log(T/eps))",
        "sparse-oracle gates (formula only) = O(n log^2(T/eps) / log log(T/eps))",
    };
    return e;
}

inline ResourceEstimate estimate_resources(const LcuHamiltonian &h, double t, double epsilon,
                                           const ResourceConstants &constants = {},
                                           const Limits &limits = default_limits()) {
    const SegmentPlan plan = plan_segments(h, t, epsilon, limits);
    auto e = count_resources(static_cast<std::uint64_t>(plan.K),
                             static_cast<std::uint64_t>(plan.r), h.term_count(),
                             static_cast<std::uint64_t>(h.qubits()), 1, constants);
    e.t = t;
    e.epsilon = epsilon;
    return e;
}

/// Time-dependent counts; M comes from the same discretization search as simulate-td.
inline ResourceEstimate estimate_resources(const TimeDependentHamiltonian &hd, double t,
                                           double epsilon, const ResourceConstants &constants = {},
                                           const Limits &limits = default_limits()) {
    const SegmentPlan plan = plan_segments_td(hd, t, epsilon, limits);
    const std::size_t slices = choose_M(hd, plan, epsilon, limits);
    auto e = count_resources(static_cast<std::uint64_t>(plan.K),
                             static_cast<std::uint64_t>(plan.r), hd.term_count(),
                             static_cast<std::uint64_t>(hd.qubits()), slices, constants);
    e.t = t;
    e.epsilon = epsilon;
    return e;
}

struct SweepRow {
    ResourceEstimate estimate;
    /// K(eps^2) / K(eps); empty when eps^2 cannot be planned.
    std::optional<double> order_ratio_squared;
    /// total_gates(eps^2) / total_gates(eps).
    std::optional<double> gate_ratio_squared;
};

inline std::vector<SweepRow> sweep_report(const LcuHamiltonian &h, double t,
                                          const std::vector<double> &epsilons,
                                          const ResourceConstants &constants = {},
                                          const Limits &limits = default_limits()) {
    if (epsilons.empty()) {
        throw ValidationError("sweep needs at least one epsilon");
    }
    std::vector<SweepRow> rows;
    for (double eps : epsilons) {
        SweepRow row{estimate_resources(h, t, eps, constants, limits), std::nullopt,
                     std::nullopt};
        try {
            const auto squared = estimate_resources(h, t, eps * eps, constants, limits);
            row.order_ratio_squared =
                static_cast<double>(squared.K) / static_cast<double>(row.estimate.K);
            row.gate_ratio_squared = static_cast<double>(squared.total_gates) /
                                     static_cast<double>(row.estimate.total_gates);
        } catch (const Error &) {
            // eps^2 underflows or exceeds the order cap; leave the ratios empty.
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace tlcu
