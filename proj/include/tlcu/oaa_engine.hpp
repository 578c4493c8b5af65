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
 * Segment-by-segment simulation with robust oblivious amplitude amplification.
 *
 * Each segment starts the ancilla in |0>, applies A = -W R W^dagger R W,
 * projects the ancilla back onto |0>, records the leaked probability and
 * renormalizes the system block. A short final segment (s < 2) gets an extra
 * flag qubit rotated so that the good amplitude is exactly 1/2.
 */

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "hamiltonian.hpp"
#include "lcu_operators.hpp"
#include "taylor_lcu.hpp"
#include "unitary_sum.hpp"

namespace tlcu {

/// full: enumerate every (k, l_1..l_k); merged: one entry per Pauli class.
enum class AncillaMode { automatic, full, merged };

struct EngineOptions {
    Limits limits = default_limits();
    AncillaMode mode = AncillaMode::automatic;
    /// automatic mode enumerates the full table while m * 2^n stays below this.
    std::size_t full_joint_limit = std::size_t{1} << 20;
    /// Per-segment deficits are compared against deficit_constant * eps / r.
    double deficit_constant = 2.0;
};

struct SegmentReport {
    int segment_index = 0;
    double seg_time = 0.0;
    double s = 0.0;
    int K = 0;
    std::size_t ancilla_dim = 0;
    bool corrected = false;
    double flag_angle = 0.0;
    double kept_probability = 0.0;
    double oaa_identity_residual = 0.0;
    double post_projection_norm_deficit = 0.0;
    double error_budget = 0.0;
    double deficit_constant = 0.0;
    /// deficit <= deficit_constant * error_budget (true when no budget is set).
    bool deficit_within_bound = true;
};

struct SegmentOutcome {
    StateVector state;
    SegmentReport report;
};

struct EvolutionResult {
    StateVector final_state;
    std::vector<SegmentReport> reports;
    double total_trace_distance_bound = 0.0;
    std::chrono::duration<double> wall_time{0.0};
    std::optional<SegmentPlan> plan;
    std::size_t slices = 1;
};

/// Unitarily invariant random unit vector (normalized complex Gaussian).
inline StateVector random_unit_state(std::size_t dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> normal;
    StateVector psi(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        psi(i) = {re, im};
    }
    return psi.normalized();
}

namespace detail {

inline void require_unit(const StateVector &psi, std::size_t dim) {
    if (static_cast<std::size_t>(psi.size()) != dim) {
        throw ValidationError("state has dimension " + std::to_string(psi.size()) +
                              ", expected " + std::to_string(dim));
    }
    if (std::abs(psi.norm() - 1.0) > 1e-10) {
        throw ValidationError("state must have unit norm");
    }
}

template <UnitarySum U>
SegmentOutcome amplify(const StateVector &psi, const U &u, const PrepareUnitary &prep,
                       std::optional<double> flag_angle, SegmentReport report,
                       const EngineOptions &options) {
    require_unit(psi, u.dimension());
    const std::size_t m = u.size();
    const std::size_t anc = flag_angle ? 2 * m : m;
    JointState state = JointState::ancilla_zero(anc, psi);
    state = apply_A(std::move(state), prep, u, flag_angle);
    auto [projected, kept] = apply_projector_P(std::move(state));

    report.s = u.s();
    report.ancilla_dim = anc;
    report.corrected = flag_angle.has_value();
    report.flag_angle = flag_angle.value_or(0.0);
    report.kept_probability = std::clamp(kept, 0.0, 1.0);

    // P A |0>|psi> = |0>(3/s U~ - 4/s^3 U~ U~^dagger U~)|psi>, with s the
    // effective normalization (2 whenever the flag rotation is active).
    const double s_eff = flag_angle ? u.s() / std::cos(*flag_angle) : u.s();
    const StateVector u_psi = apply_u_tilde(u, psi);
    const StateVector cubic = apply_u_tilde(u, apply_u_tilde(u, u_psi, true));
    const StateVector expected = (3.0 / s_eff) * u_psi - (4.0 / (s_eff * s_eff * s_eff)) * cubic;
    const StateVector good = projected.block(0);
    report.oaa_identity_residual = (good - expected).norm();

    if (kept < options.limits.kept_floor) {
        std::ostringstream msg;
        msg << "segment " << report.segment_index << ": kept probability " << kept
            << " is below the floor " << options.limits.kept_floor << " (s = " << report.s
            << ", K = " << report.K << ", m = " << m << ")";
        throw InvariantViolation(msg.str());
    }
    const double kept_norm = std::sqrt(kept);
    report.post_projection_norm_deficit = std::abs(1.0 - kept_norm);
    report.deficit_constant = options.deficit_constant;
    report.deficit_within_bound =
        report.error_budget <= 0.0 ||
        report.post_projection_norm_deficit <= options.deficit_constant * report.error_budget;
    return {good / kept_norm, report};
}

} // namespace detail

/// One segment without the flag qubit (s expected within eps/r of 2).
template <UnitarySum U>
SegmentOutcome run_segment(const StateVector &psi, const U &u, const PrepareUnitary &prep,
                           SegmentReport meta = {}, const EngineOptions &options = {}) {
    return detail::amplify(psi, u, prep, std::nullopt, meta, options);
}

/// One segment with s <= 2, corrected by a flag qubit with cos(theta) = s/2.
template <UnitarySum U>
SegmentOutcome run_final_segment(const StateVector &psi, const U &u, const PrepareUnitary &prep,
                                 SegmentReport meta = {}, const EngineOptions &options = {}) {
    double s = u.s();
    if (s > 2.0 + 1e-12) {
        throw InvariantViolation("final segment normalization s = " + std::to_string(s) +
                                 " exceeds 2");
    }
    s = std::min(s, 2.0);
    return detail::amplify(psi, u, prep, std::acos(s / 2.0), meta, options);
}

namespace detail {

inline bool use_full_table(std::size_t terms, int order, std::size_t dim,
                           const EngineOptions &options) {
    switch (options.mode) {
    case AncillaMode::full:
        return true;
    case AncillaMode::merged:
        return false;
    case AncillaMode::automatic:
        break;
    }
    const std::size_t m = geometric_count(terms, order);
    return m <= options.limits.table_budget && m <= options.full_joint_limit / dim;
}

/// Build the unitary sum for one segment shape and hand it to `body`.
template <class Body>
void with_taylor_sum(const LcuHamiltonian &h, double seg_time, int order,
                     const EngineOptions &options, Body &&body) {
    if (use_full_table(h.term_count(), order, h.dimension(), options)) {
        const CoefficientTable table(h, seg_time, order, options.limits.table_budget);
        body(TaylorLcu(h, table));
    } else {
        body(merge_taylor(h, seg_time, order));
    }
}

} // namespace detail

/**
 * @brief Simulate exp(-iHt) psi0 to trace distance eps.
 *
 * r - 1 full segments plus one corrected final segment (or r full segments
 * when T is a multiple of ln 2). t = 0 returns psi0 with no segments.
 */
inline EvolutionResult run_evolution(const LcuHamiltonian &h, double t, double epsilon,
                                     const StateVector &psi0, const EngineOptions &options = {}) {
    const auto started = std::chrono::steady_clock::now();
    if (t < 0.0 || !std::isfinite(t)) {
        throw ValidationError("time must be nonnegative");
    }
    detail::require_unit(psi0, h.dimension());
    EvolutionResult result;
    result.final_state = psi0;
    if (t == 0.0) {
        return result;
    }
    const SegmentPlan plan = plan_segments(h, t, epsilon, options.limits);
    result.plan = plan;

    auto base_report = [&](int index) {
        SegmentReport meta;
        meta.segment_index = index;
        meta.seg_time = plan.segment_length(index);
        meta.K = plan.segment_order(index);
        meta.error_budget = plan.budget();
        return meta;
    };

    StateVector psi = psi0.normalized();
    if (plan.full_segments > 0) {
        detail::with_taylor_sum(h, plan.seg_time, plan.K, options, [&](const auto &u) {
            const PrepareUnitary prep(u);
            for (int i = 0; i < plan.full_segments; ++i) {
                auto outcome = run_segment(psi, u, prep, base_report(i), options);
                psi = std::move(outcome.state);
                result.reports.push_back(outcome.report);
            }
        });
    }
    if (!plan.final_is_full()) {
        detail::with_taylor_sum(h, plan.final_seg_time, plan.final_K, options,
                                [&](const auto &u) {
                                    const PrepareUnitary prep(u);
                                    auto outcome = run_final_segment(
                                        psi, u, prep, base_report(plan.r - 1), options);
                                    psi = std::move(outcome.state);
                                    result.reports.push_back(outcome.report);
                                });
    }
    for (const auto &rep : result.reports) {
        result.total_trace_distance_bound += rep.post_projection_norm_deficit;
    }
    result.final_state = std::move(psi);
    result.wall_time = std::chrono::steady_clock::now() - started;
    return result;
}

/**
 * @brief Largest deviation of P A |0>|psi> from |0>(3/s U~ - 4/s^3 U~U~^dagger U~)|psi>.
 *
 * The right-hand side is evaluated from the dense U~, so the check is
 * independent of the joint-space simulation. Random states are seeded.
 */
template <UnitarySum U>
double verify_oaa_identity(const U &u, const PrepareUnitary &prep, int trials,
                           std::uint64_t seed = 12345, const Limits &limits = default_limits()) {
    const DenseMatrix ut = dense_u_tilde(u, limits);
    const double s = u.s();
    const DenseMatrix predicted = (3.0 / s) * ut - (4.0 / (s * s * s)) * (ut * ut.adjoint() * ut);
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const StateVector psi = random_unit_state(u.dimension(), rng);
        const JointState out = apply_A(JointState::ancilla_zero(u.size(), psi), prep, u);
        worst = std::max(worst, (StateVector(out.block(0)) - predicted * psi).norm());
    }
    return worst;
}

inline double verify_oaa_identity(const LcuHamiltonian &h, const CoefficientTable &table,
                                  const PrepareUnitary &prep, int trials,
                                  std::uint64_t seed = 12345,
                                  const Limits &limits = default_limits()) {
    return verify_oaa_identity(TaylorLcu(h, table), prep, trials, seed, limits);
}

} // namespace tlcu
