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
#include <map>
#include <random>

#include <catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace tlcu;
using Catch::Matchers::ContainsSubstring;
using tlcu::testing::kron_pauli;
using tlcu::testing::kron_word;
using tlcu::testing::random_hamiltonian;
using tlcu::testing::rotating_exact;
using tlcu::testing::rotating_hamiltonian;

namespace {

TimeDependentHamiltonian constant_copy(const LcuHamiltonian &h) {
    std::vector<TimeDependentTerm> terms;
    for (const auto &term : h.terms()) {
        const double sign = term.phase == Phase::minus_one ? -1.0 : 1.0;
        terms.push_back({term.axes, Phase::plus_one, Polynomial{{sign * term.weight}}});
    }
    return TimeDependentHamiltonian(std::move(terms));
}

TimeDependentHamiltonian random_td(std::mt19937_64 &rng, int qubits, int terms) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    const auto base = random_hamiltonian(rng, qubits, terms);
    std::vector<TimeDependentTerm> out;
    for (const auto &term : base.terms()) {
        out.push_back({term.axes, Phase::plus_one, Polynomial{{coeff(rng), coeff(rng), coeff(rng)}}});
    }
    return TimeDependentHamiltonian(std::move(out));
}

} // namespace

TEST_CASE("polynomials") {
    const Polynomial p{{1.0, -2.0, 3.0}};
    CHECK(p(2.0) == 9.0);
    CHECK(p.derivative() == Polynomial{{-2.0, 6.0}});
    CHECK(p.magnitude_bound(2.0) == 17.0);
    CHECK_FALSE(p.is_constant());
    CHECK(Polynomial{{4.0, 0.0}}.is_constant());
}

TEST_CASE("time-dependent parser") {
    const auto hd = parse_time_dependent("# ramp\npoly(1, 1) ZI\npoly(0,0,-0.5) XX # quadratic\n");
    REQUIRE(hd.term_count() == 2);
    CHECK(hd.qubits() == 2);
    CHECK(hd.coefficient(0, 0.5) == 1.5);
    CHECK(hd.coefficient(1, 2.0) == -2.0);
    CHECK(hd.signed_word(1, 2.0).phase == 2);
    CHECK(hd.signed_word(1, 0.0).phase == 0);
    CHECK_THROWS_WITH(parse_time_dependent("1.0 Z\n"), ContainsSubstring("line 1"));
    CHECK_THROWS_AS(parse_time_dependent("poly(1,x) Z\n"), ValidationError);
    CHECK_THROWS_AS(parse_time_dependent("poly(1,2 Z\n"), ValidationError);
    CHECK_THROWS_AS(parse_time_dependent("poly(1) Z X\n"), ValidationError);
    CHECK_THROWS_AS(parse_time_dependent("poly(1) Z\npoly(1) XX\n"), ValidationError);
    CHECK_THROWS_AS(parse_time_dependent("poly(1) Q\n"), ValidationError);
    CHECK_THROWS_WITH(parse_time_dependent("\n# only comments\n"), ContainsSubstring("empty"));
}

TEST_CASE("derivative and weight bounds dominate grid samples") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        const auto hd = random_td(rng, 2, 3);
        const double t_end = 0.5 + trial * 0.3;
        const double hp = hd.h_prime(t_end);
        const double bound = hd.weight_bound(t_end);
        for (int i = 0; i <= 10000; ++i) {
            const double tau = t_end * i / 10000.0;
            double deriv = 0.0;
            for (std::size_t l = 0; l < hd.term_count(); ++l) {
                deriv += std::abs(hd.terms()[l].coefficient.derivative()(tau));
            }
            CHECK(deriv <= hp + 1e-12);
            CHECK(hd.weight_sum_at(tau) <= bound + 1e-12);
        }
    }
}

TEST_CASE("Dyson coefficients") {
    const auto hd = parse_time_dependent("poly(1,1) Z\n");
    const DysonTable table(hd, 0.1, 1, 0.0, 2);
    REQUIRE(table.size() == 3);
    CHECK(table.betas()[0] == 1.0);
    CHECK(table.word(0) == PauliWord{});
    CHECK(table.betas()[1] == Catch::Approx(0.05).epsilon(1e-15));
    CHECK(table.betas()[2] == Catch::Approx(0.0525).epsilon(1e-15));
    CHECK(table.sample_time(1) == Catch::Approx(0.05));

    const auto two = parse_time_dependent("poly(1) X\npoly(0.5,2) Z\n");
    const DysonTable big(two, 0.2, 3, 0.4, 4);
    CHECK(big.size() == geometric_count(8, 3));
    for (std::size_t j = 0; j < big.size(); ++j) {
        CHECK(big.encode(big.decode(j)) == j);
    }
    CHECK_THROWS_AS(DysonTable(two, 0.2, 3, 0.0, 0), ValidationError);
    CHECK_THROWS_AS(DysonTable(two, 0.2, 6, 0.0, 4, 1000), CapExceeded);
}

TEST_CASE("time ordering of sampled factors") {
    const auto hd = parse_time_dependent("poly(1) X\npoly(1) Z\n");
    const DysonTable table(hd, 0.2, 2, 0.0, 2);
    const DenseMatrix x = kron_pauli("X");
    const DenseMatrix z = kron_pauli("Z");
    // Z sampled at slot 0, X at slot 1: X acts later, so V = (-i)^2 X Z.
    const std::size_t a = table.encode({2, {0, 1}, {1, 0}});
    const std::size_t b = table.encode({2, {1, 0}, {0, 1}});
    CHECK((kron_word(table.word(a), 1) + x * z).norm() < 1e-15);
    CHECK(table.word(a) == table.word(b));
    // Equal slots keep the tuple order.
    const std::size_t c = table.encode({2, {0, 1}, {1, 1}});
    CHECK((kron_word(table.word(c), 1) + x * z).norm() < 1e-15);
}

TEST_CASE("constant coefficients reduce to the Taylor table") {
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 6; ++trial) {
        const auto h = random_hamiltonian(rng, 1 + trial % 2, 1 + trial % 3);
        const auto hd = constant_copy(h);
        const double seg = ln2 / h.alpha_sum();
        const CoefficientTable taylor(h, seg, 3);
        const DenseMatrix ut = dense_U_tilde(h, taylor);
        const DysonTable one(hd, seg, 3, 0.0, 1);
        for (std::size_t j = 0; j < taylor.size(); ++j) {
            CHECK(one.word(j) == taylor.word(h, j));
            CHECK(one.betas()[j] == Catch::Approx(taylor.beta(j)).epsilon(1e-15));
        }
        for (std::size_t slices : {1U, 2U, 4U}) {
            const DysonTable table(hd, seg, 3, 0.7, slices);
            CHECK((dense_u_tilde(table) - ut).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((dyson_dense_u_tilde(hd, seg, 3, 0.7, slices) - ut).cwiseAbs().maxCoeff() <
                  1e-12);
        }
        const auto plan = plan_segments_td(hd, 2.0, 1e-4);
        CHECK(choose_M(hd, plan, 1e-4) == 1);
    }
}

TEST_CASE("slot factorization and merged classes match the enumerated table") {
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 6; ++trial) {
        const auto hd = random_td(rng, 1 + trial % 2, 1 + trial % 3);
        const double seg = 0.3;
        const double start = 0.25 * trial;
        const int order = 3;
        const std::size_t slices = 1 + trial % 3;
        const DysonTable table(hd, seg, order, start, slices);
        const DenseMatrix enumerated = dense_u_tilde(table);
        CHECK((dyson_dense_u_tilde(hd, seg, order, start, slices) - enumerated)
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);

        std::map<PauliWord, double> oracle;
        for (std::size_t j = 1; j < table.size(); ++j) {
            if (table.betas()[j] > 0.0) {
                oracle[table.word(j)] += table.betas()[j];
            }
        }
        const MergedLcu merged = merge_dyson(hd, seg, order, start, slices);
        REQUIRE(merged.size() == oracle.size() + 1);
        std::size_t j = 1;
        for (const auto &[word, beta] : oracle) {
            CHECK(merged.word(j) == word);
            CHECK(std::abs(merged.betas()[j] - beta) < 1e-14);
            ++j;
        }
        CHECK(std::abs(merged.s() - table.s()) < 1e-13);
        CHECK(verify_oaa_identity(table, PrepareUnitary(table), 10) <= 1e-11);
        CHECK(verify_oaa_identity(merged, PrepareUnitary(merged), 10) <= 1e-11);
    }
}

TEST_CASE("slice selection") {
    const auto hd = parse_time_dependent("poly(1,1) Z\n");
    const auto plan = plan_segments_td(hd, 0.5, 1e-4);
    const std::size_t slices = choose_M(hd, plan, 1e-4);
    CHECK(slices >= 2);
    CHECK((slices & (slices - 1)) == 0);
    CHECK_THROWS_AS(choose_M(hd, plan, 1.5), ValidationError);

    Limits tight;
    tight.max_slices = 4;
    CHECK_THROWS_AS(choose_M(hd, plan, 1e-8, tight), CapExceeded);

    // Refinement differences do not grow with M.
    const auto rot = rotating_hamiltonian();
    double previous = 1e9;
    for (std::size_t m = 1; m <= 64; m *= 2) {
        const double diff = spectral_norm(dyson_dense_u_tilde(rot, 0.5, 12, 0.0, 2 * m) -
                                          dyson_dense_u_tilde(rot, 0.5, 12, 0.0, m));
        CHECK(diff <= previous * (1 + 1e-9));
        previous = diff;
    }
}

TEST_CASE("time-dependent evolutions") {
    const auto linear = parse_time_dependent("poly(1,1) Z\n");
    StateVector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const auto res = run_evolution_td(linear, 1.0, 1e-3, plus);
    const StateVector analytic = expm_hermitian(kron_pauli("Z"), 1.5).matrix * plus;
    CHECK(trace_distance(res.final_state, analytic) <= 1e-3);
    CHECK(res.slices >= 1);

    const auto h = parse_hamiltonian("0.5 X\n0.5 Z\n");
    const auto hd = parse_time_dependent("poly(0.5) X\npoly(0.5) Z\n");
    for (double t : {0.4, 1.0, 2.5}) {
        const auto a = run_evolution(h, t, 1e-6, plus);
        const auto b = run_evolution_td(hd, t, 1e-6, plus);
        CHECK(b.slices == 1);
        CHECK(b.reports.size() == a.reports.size());
        CHECK((a.final_state - b.final_state).norm() < 1e-10);
    }

    const auto rot = rotating_hamiltonian();
    const auto ref = time_ordered_exact(rotating_exact, 1.0, 16);
    const auto rr = run_evolution_td(rot, 1.0, 1e-3, plus);
    CHECK(trace_distance(rr.final_state, ref.matrix * plus) <= 1e-3);

    CHECK(run_evolution_td(rot, 0.0, 1e-3, plus).reports.empty());
    CHECK_THROWS_WITH(run_evolution_td(rot, -0.1, 1e-3, plus),
                      ContainsSubstring("time must be nonnegative"));
}
