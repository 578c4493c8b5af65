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

#include <cmath>
#include <random>

#include <catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace tlcu;
using Catch::Matchers::ContainsSubstring;
using tlcu::testing::basis_state;
using tlcu::testing::random_hamiltonian;

namespace {

// Empirical per-segment constant: trace distance after one segment <= c * eps / r.
constexpr double segment_constant = 2.0;

DenseMatrix random_unitary(std::mt19937_64 &rng, Eigen::Index dim) {
    std::normal_distribution<double> normal;
    DenseMatrix a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            a(i, j) = {normal(rng), normal(rng)};
        }
    }
    Eigen::HouseholderQR<DenseMatrix> qr(a);
    return qr.householderQ();
}

StateVector exact_evolution(const LcuHamiltonian &h, double t, const StateVector &psi) {
    return expm_hermitian(build_dense(h), t).matrix * psi;
}

} // namespace

TEST_CASE("single segments against the dense exponential") {
    const auto hz = parse_hamiltonian("1.0 Z");
    const CoefficientTable tz(hz, ln2, 5);
    const TaylorLcu uz(hz, tz);
    const auto out = run_segment(basis_state(2, 0), uz, PrepareUnitary(uz));
    const StateVector expected = std::exp(-imag_unit * ln2) * basis_state(2, 0);
    CHECK((out.state - expected).norm() <= 1e-3);
    CHECK(out.report.kept_probability <= 1.0);
    CHECK(out.report.oaa_identity_residual < 1e-12);

    const auto hi = parse_hamiltonian("1.0 I");
    const auto plan = plan_segments(hi, ln2, 1e-6);
    const CoefficientTable ti = build_coefficient_table(hi, plan);
    const TaylorLcu ui(hi, ti);
    std::mt19937_64 rng(51);
    const StateVector psi = random_unit_state(2, rng);
    const auto outi = run_segment(psi, ui, PrepareUnitary(ui));
    CHECK((outi.state - std::exp(-imag_unit * ln2) * psi).norm() <= plan.budget());

    const auto hxz = parse_hamiltonian("0.5 X\n0.5 Z\n");
    const auto pxz = plan_segments(hxz, ln2, 1e-3);
    REQUIRE(pxz.r == 1);
    const auto res = run_evolution(hxz, ln2, 1e-3, basis_state(2, 0));
    CHECK(trace_distance(res.final_state, exact_evolution(hxz, ln2, basis_state(2, 0))) <= 1e-3);
}

TEST_CASE("per-segment error and deficit scale with eps/r") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 12; ++trial) {
        const auto h = random_hamiltonian(rng, 1 + trial % 3, 1 + trial % 4);
        for (double eps : {1e-2, 1e-4, 1e-6}) {
            const auto plan = plan_segments(h, 2.0 * ln2 / h.alpha_sum(), eps);
            REQUIRE(plan.r == 2);
            const MergedLcu u = merge_taylor(h, plan.seg_time, plan.K);
            const StateVector psi = random_unit_state(h.dimension(), rng);
            const auto out = run_segment(psi, u, PrepareUnitary(u));
            const double dist = trace_distance(out.state, exact_evolution(h, plan.seg_time, psi));
            CHECK(dist <= segment_constant * plan.budget());
            CHECK(out.report.post_projection_norm_deficit <= segment_constant * plan.budget());
        }
    }
}

TEST_CASE("final-segment correction") {
    std::mt19937_64 rng(53);
    const auto h = parse_hamiltonian("0.6 X\n0.4 Z\n");

    // s = 2 exactly: the rotation is trivial and the output equals the uncorrected run.
    const DenseLcu two({DenseMatrix::Identity(2, 2), tlcu::testing::kron_pauli("X")}, {1.0, 1.0});
    const StateVector psi = random_unit_state(2, rng);
    const auto plain = run_segment(psi, two, PrepareUnitary(two));
    const auto flagged = run_final_segment(psi, two, PrepareUnitary(two));
    CHECK(flagged.report.flag_angle == 0.0);
    CHECK((plain.state - flagged.state).norm() < 1e-14);

    // s = sqrt(2): good amplitude before amplification is 1/2.
    const double seg = std::log(std::sqrt(2.0)) / h.alpha_sum();
    const CoefficientTable table(h, seg, 14);
    REQUIRE(std::abs(table.s() - std::sqrt(2.0)) < 1e-14);
    const TaylorLcu u(h, table);
    const PrepareUnitary prep(u);
    const JointState w =
        apply_W(JointState::ancilla_zero(2 * table.size(), psi), prep, u, false,
                std::acos(table.s() / 2.0));
    CHECK(std::abs(StateVector(w.block(0)).norm() - 0.5) < 1e-12);
    const auto corrected = run_final_segment(psi, u, prep);
    CHECK(corrected.report.corrected);
    CHECK(std::abs(corrected.report.kept_probability - 1.0) < 1e-12);
    CHECK(trace_distance(corrected.state, exact_evolution(h, seg, psi)) < 1e-12);

    // T = 1: two segments, the second one shorter.
    const auto res = run_evolution(h, 1.0, 1e-6, psi);
    REQUIRE(res.reports.size() == 2);
    CHECK_FALSE(res.reports[0].corrected);
    CHECK(res.reports[1].corrected);
    CHECK(trace_distance(res.final_state, exact_evolution(h, 1.0, psi)) <= 1e-6);

    const DenseLcu over({DenseMatrix::Identity(2, 2), DenseMatrix::Identity(2, 2)}, {1.0, 1.1});
    CHECK_THROWS_AS(run_final_segment(psi, over, PrepareUnitary(over)), InvariantViolation);
}

TEST_CASE("full evolutions against the dense exponential") {
    const StateVector psi0 = basis_state(2, 0);
    const auto h = parse_hamiltonian("0.6 X\n0.4 Z\n");
    const auto zero = run_evolution(h, 0.0, 1e-4, psi0);
    CHECK(zero.reports.empty());
    CHECK(zero.final_state == psi0);

    const auto res = run_evolution(h, 3.0, 1e-4, psi0);
    CHECK(trace_distance(res.final_state, exact_evolution(h, 3.0, psi0)) <= 1e-4);
    CHECK(std::abs(res.final_state.norm() - 1.0) < 1e-12);
    for (const auto &rep : res.reports) {
        CHECK(rep.deficit_constant == segment_constant);
        CHECK(rep.deficit_within_bound);
    }

    const auto hi = parse_hamiltonian("1.0 I");
    const auto resi = run_evolution(hi, 1.0, 1e-6, psi0);
    CHECK((resi.final_state - std::exp(-imag_unit) * psi0).norm() <= 1e-6);

    CHECK_THROWS_WITH(run_evolution(h, -1.0, 1e-4, psi0),
                      ContainsSubstring("time must be nonnegative"));
    CHECK_THROWS_AS(run_evolution(h, 1.0, 1e-4, StateVector(2.0 * psi0)), ValidationError);
    CHECK_THROWS_AS(run_evolution(h, 1.0, 1e-4, basis_state(4, 0)), ValidationError);
}

TEST_CASE("errors accumulate at most additively") {
    std::mt19937_64 rng(54);
    for (int trial = 0; trial < 6; ++trial) {
        const auto h = random_hamiltonian(rng, 2, 3);
        const double t = 3.0;
        const double eps = 1e-3;
        const auto plan = plan_segments(h, t, eps);
        StateVector psi = random_unit_state(4, rng);
        const StateVector psi0 = psi;
        double per_segment_sum = 0.0;
        for (int i = 0; i < plan.r; ++i) {
            const MergedLcu u = merge_taylor(h, plan.segment_length(i), plan.segment_order(i));
            const PrepareUnitary prep(u);
            const bool last = i == plan.r - 1 && !plan.final_is_full();
            auto out = last ? run_final_segment(psi, u, prep) : run_segment(psi, u, prep);
            per_segment_sum +=
                trace_distance(out.state, exact_evolution(h, plan.segment_length(i), psi));
            psi = out.state;
        }
        const auto res = run_evolution(h, t, eps, psi0);
        CHECK((res.final_state - psi).norm() < 1e-12);
        const double total = trace_distance(res.final_state, exact_evolution(h, t, psi0));
        CHECK(total <= per_segment_sum + 1e-10);
        CHECK(total <= eps);
    }
}

TEST_CASE("kept probability approaches one as eps shrinks") {
    const auto h = parse_hamiltonian("0.5 XY\n0.3 ZZ\n0.2 IX\n");
    const StateVector psi0 = basis_state(4, 1);
    // Merged classes keep m small, so rounding in B stays far below the deficits compared here.
    EngineOptions options;
    options.mode = AncillaMode::merged;
    double previous = 0.0;
    for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
        const auto res = run_evolution(h, 2.0, eps, psi0, options);
        double worst = 1.0;
        for (const auto &rep : res.reports) {
            worst = std::min(worst, rep.kept_probability);
        }
        CHECK(worst >= previous - 1e-15);
        previous = worst;
    }
    CHECK(previous > 1.0 - 1e-14);
}

TEST_CASE("full and merged ancilla modes agree") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 8; ++trial) {
        const auto h = random_hamiltonian(rng, 1 + trial % 3, 1 + trial % 3);
        const StateVector psi = random_unit_state(h.dimension(), rng);
        EngineOptions full;
        full.mode = AncillaMode::full;
        EngineOptions merged;
        merged.mode = AncillaMode::merged;
        const auto a = run_evolution(h, 1.7, 1e-4, psi, full);
        const auto b = run_evolution(h, 1.7, 1e-4, psi, merged);
        CHECK((a.final_state - b.final_state).norm() < 1e-12);
        REQUIRE(a.reports.size() == b.reports.size());
        for (std::size_t i = 0; i < a.reports.size(); ++i) {
            CHECK(std::abs(a.reports[i].s - b.reports[i].s) < 1e-13);
            CHECK(std::abs(a.reports[i].kept_probability - b.reports[i].kept_probability) < 1e-12);
            CHECK(a.reports[i].ancilla_dim >= b.reports[i].ancilla_dim);
        }
    }
}

TEST_CASE("runs are deterministic") {
    std::mt19937_64 rng(56);
    const auto h = random_hamiltonian(rng, 3, 5);
    const StateVector psi = random_unit_state(8, rng);
    const auto a = run_evolution(h, 2.0, 1e-6, psi);
    const auto b = run_evolution(h, 2.0, 1e-6, psi);
    CHECK(a.final_state == b.final_state);
    REQUIRE(a.reports.size() == b.reports.size());
    for (std::size_t i = 0; i < a.reports.size(); ++i) {
        CHECK(a.reports[i].kept_probability == b.reports[i].kept_probability);
        CHECK(a.reports[i].oaa_identity_residual == b.reports[i].oaa_identity_residual);
    }
}

TEST_CASE("robust amplification identity") {
    std::mt19937_64 rng(57);
    for (int trial = 0; trial < 10; ++trial) {
        const auto h = random_hamiltonian(rng, 1 + trial % 3, 1 + trial % 4);
        const auto plan = plan_segments(h, 1.0, trial % 2 == 0 ? 1e-3 : 1e-6);
        const CoefficientTable table = build_coefficient_table(h, plan);
        const PrepareUnitary prep(prepare_amplitudes(table));
        CHECK(verify_oaa_identity(h, table, prep, 20) <= 1e-11);
        const MergedLcu merged = merge_taylor(h, plan.seg_time, plan.K);
        CHECK(verify_oaa_identity(merged, PrepareUnitary(merged), 20) <= 1e-11);
    }

    const auto h = parse_hamiltonian("0.4 XY\n0.9 ZI\n");
    const CoefficientTable k0(h, 0.5, 0);
    const PrepareUnitary p0(prepare_amplitudes(k0));
    CHECK(verify_oaa_identity(h, k0, p0, 5) <= 1e-13);
    const StateVector psi = random_unit_state(4, rng);
    const JointState out = apply_A(JointState::ancilla_zero(1, psi), p0, TaylorLcu(h, k0));
    CHECK((StateVector(out.block(0)) + psi).norm() <= 1e-13);
}

TEST_CASE("exact amplification for a unitary sum with s = 2") {
    std::mt19937_64 rng(58);
    for (int trial = 0; trial < 10; ++trial) {
        const DenseMatrix v = random_unitary(rng, 4);
        const DenseMatrix w = random_unitary(rng, 4);
        const DenseLcu u({v, w, DenseMatrix(-w)}, {1.0, 0.5, 0.5});
        REQUIRE(u.s() == 2.0);
        const StateVector psi = random_unit_state(4, rng);
        const auto out = run_segment(psi, u, PrepareUnitary(u));
        CHECK(std::abs(out.report.kept_probability - 1.0) < 1e-12);
        CHECK((out.state - v * psi).norm() < 1e-12);
        CHECK(verify_oaa_identity(u, PrepareUnitary(u), 5) < 1e-12);
    }
}

TEST_CASE("kept-probability floor aborts a misconfigured segment") {
    const auto h = parse_hamiltonian("1.0 Z");
    const CoefficientTable bad(h, ln2, 1);
    const TaylorLcu u(h, bad);
    CHECK_THROWS_AS(run_segment(basis_state(2, 0), u, PrepareUnitary(u)), InvariantViolation);
    EngineOptions lenient;
    lenient.limits.kept_floor = 0.1;
    const auto out = run_segment(basis_state(2, 0), u, PrepareUnitary(u), {}, lenient);
    CHECK(out.report.kept_probability == Catch::Approx(0.4508).margin(1e-3));
}
