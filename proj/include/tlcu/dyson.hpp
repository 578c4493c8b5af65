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
 * Time-dependent Hamiltonians with polynomial coefficients and the discretized
 * truncated Dyson series
 *
 *   U~ = sum_{k<=K} (-i dt)^k / (M^k k!) sum_{j_1..j_k} T H(t_{j_k}) ... H(t_{j_1}),
 *
 * with left-endpoint samples t_j = start + (j/M) dt.
 *
 * ".thm" files hold lines `poly(c0,c1,...,cd) <axes>` meaning the coefficient
 * c0 + c1 t + ... + cd t^d on that Pauli string; '#' starts a comment.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "exact_oracle.hpp"
#include "hamiltonian.hpp"
#include "oaa_engine.hpp"
#include "pauli.hpp"
#include "taylor_lcu.hpp"
#include "unitary_sum.hpp"

namespace tlcu {

/// c0 + c1 t + ... + cd t^d.
struct Polynomial {
    std::vector<double> coefficients;

    [[nodiscard]] double operator()(double t) const {
        double acc = 0.0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
            acc = acc * t + *it;
        }
        return acc;
    }

    [[nodiscard]] Polynomial derivative() const {
        Polynomial d;
        for (std::size_t i = 1; i < coefficients.size(); ++i) {
            d.coefficients.push_back(static_cast<double>(i) * coefficients[i]);
        }
        return d;
    }

    /// max_{0 <= tau <= t_end} |p(tau)| <= sum_d |c_d| t_end^d.
    [[nodiscard]] double magnitude_bound(double t_end) const {
        double acc = 0.0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
            acc = acc * t_end + std::abs(*it);
        }
        return acc;
    }

    [[nodiscard]] bool is_constant() const {
        return std::all_of(coefficients.begin() + std::min<std::ptrdiff_t>(1, std::ssize(coefficients)),
                           coefficients.end(), [](double c) { return c == 0.0; });
    }

    friend bool operator==(const Polynomial &, const Polynomial &) = default;
};

struct TimeDependentTerm {
    std::string axes;
    Phase phase = Phase::plus_one;
    Polynomial coefficient;
};

/**
 * @brief H(t) = sum_l alpha_l(t) phase_l P_l with real polynomial alpha_l.
 *
 * Evaluated weights may be negative; their sign is folded into the unitary
 * when a coefficient table is built.
 */
class TimeDependentHamiltonian {
  public:
    explicit TimeDependentHamiltonian(std::vector<TimeDependentTerm> terms)
        : terms_(std::move(terms)) {
        if (terms_.empty()) {
            throw ValidationError("time-dependent Hamiltonian has no terms");
        }
        qubits_ = static_cast<int>(terms_.front().axes.size());
        for (const auto &term : terms_) {
            if (static_cast<int>(term.axes.size()) != qubits_) {
                throw ValidationError("inconsistent axes lengths: '" + terms_.front().axes +
                                      "' vs '" + term.axes + "'");
            }
            if (term.phase != Phase::plus_one && term.phase != Phase::minus_one) {
                throw ValidationError("imaginary term phase makes H(t) non-Hermitian");
            }
            if (term.coefficient.coefficients.empty()) {
                throw ValidationError("empty coefficient polynomial");
            }
            for (double c : term.coefficient.coefficients) {
                if (!std::isfinite(c)) {
                    throw ValidationError("polynomial coefficients must be finite");
                }
            }
            words_.push_back(to_word(term.phase, term.axes));
        }
    }

    [[nodiscard]] int qubits() const { return qubits_; }
    [[nodiscard]] std::size_t dimension() const { return std::size_t{1} << qubits_; }
    [[nodiscard]] std::size_t term_count() const { return terms_.size(); }
    [[nodiscard]] const std::vector<TimeDependentTerm> &terms() const { return terms_; }
    [[nodiscard]] const PauliWord &word(std::size_t l) const { return words_[l]; }

    [[nodiscard]] double coefficient(std::size_t l, double t) const {
        return terms_[l].coefficient(t);
    }

    /// Pauli word of term l at time t with the coefficient sign folded in.
    [[nodiscard]] PauliWord signed_word(std::size_t l, double t) const {
        return coefficient(l, t) < 0.0 ? words_[l].times_phase(2) : words_[l];
    }

    [[nodiscard]] bool is_constant() const {
        return std::all_of(terms_.begin(), terms_.end(),
                           [](const auto &term) { return term.coefficient.is_constant(); });
    }

    /// sum_l |alpha_l(t)|.
    [[nodiscard]] double weight_sum_at(double t) const {
        double acc = 0.0;
        for (std::size_t l = 0; l < terms_.size(); ++l) {
            acc += std::abs(coefficient(l, t));
        }
        return acc;
    }

    /// Upper bound on max_{[0, t_end]} ||dH/dt|| by the triangle inequality.
    [[nodiscard]] double h_prime(double t_end) const {
        double acc = 0.0;
        for (const auto &term : terms_) {
            acc += term.coefficient.derivative().magnitude_bound(t_end);
        }
        return acc;
    }

    /**
     * @brief Upper bound on max_{[0, t_end]} sum_l |alpha_l(t)|.
     *
     * Grid maximum plus the Lipschitz slack h' * spacing / 2, which covers the
     * gaps between grid points.
     */
    [[nodiscard]] double weight_bound(double t_end, int grid = 4096) const {
        double best = 0.0;
        for (int i = 0; i <= grid; ++i) {
            best = std::max(best, weight_sum_at(t_end * i / grid));
        }
        const double slack = h_prime(t_end) * (t_end / grid) / 2.0;
        return best + slack;
    }

    [[nodiscard]] DenseMatrix dense_at(double t, const Limits &limits = default_limits()) const {
        require_dense_cap(qubits_, limits);
        const auto dim = static_cast<Eigen::Index>(dimension());
        DenseMatrix out = DenseMatrix::Zero(dim, dim);
        for (std::size_t l = 0; l < terms_.size(); ++l) {
            const double a = coefficient(l, t);
            if (a == 0.0) {
                continue;
            }
            const PauliWord &w = words_[l];
            const cplx global = a * phase_factor(w.phase);
            for (Eigen::Index col = 0; col < dim; ++col) {
                const auto y = static_cast<std::uint64_t>(col);
                const bool odd = (std::popcount(y & w.z) & 1) != 0;
                out(static_cast<Eigen::Index>(y ^ w.x), col) += odd ? -global : global;
            }
        }
        return out;
    }

  private:
    std::vector<TimeDependentTerm> terms_;
    std::vector<PauliWord> words_;
    int qubits_ = 0;
};

inline TimeDependentHamiltonian parse_time_dependent(std::istream &in) {
    std::vector<TimeDependentTerm> terms;
    std::string raw;
    int line_no = 0;
    auto fail = [&](const std::string &what) {
        throw ValidationError("line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = detail::strip_comment(raw);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) {
            continue;
        }
        line = line.substr(first);
        if (!line.starts_with("poly(")) {
            fail("expected 'poly(c0,c1,...) <axes>'");
        }
        const auto close = line.find(')');
        if (close == std::string_view::npos) {
            fail("missing ')' in polynomial");
        }
        Polynomial poly;
        std::string_view list = line.substr(5, close - 5);
        while (true) {
            const auto comma = list.find(',');
            std::string_view item = list.substr(0, comma);
            const auto tokens = detail::split_ws(item);
            if (tokens.size() != 1) {
                fail("malformed polynomial coefficient list");
            }
            poly.coefficients.push_back(detail::parse_real(tokens.front(), line_no));
            if (comma == std::string_view::npos) {
                break;
            }
            list = list.substr(comma + 1);
        }
        const auto rest = detail::split_ws(line.substr(close + 1));
        if (rest.size() != 1) {
            fail("expected exactly one axes string after the polynomial");
        }
        try {
            validate_axes(rest.front());
        } catch (const ValidationError &e) {
            fail(e.what());
        }
        terms.push_back({std::string(rest.front()), Phase::plus_one, std::move(poly)});
    }
    if (terms.empty()) {
        throw ValidationError("empty time-dependent Hamiltonian: no term lines");
    }
    return TimeDependentHamiltonian(std::move(terms));
}

inline TimeDependentHamiltonian parse_time_dependent(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_time_dependent(in);
}

/// Segmentation with alpha_sum replaced by an upper bound on sum_l |alpha_l(t)|.
inline SegmentPlan plan_segments_td(const TimeDependentHamiltonian &hd, double t, double epsilon,
                                    const Limits &limits = default_limits()) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw ValidationError("time must be positive");
    }
    return plan_segments(hd.weight_bound(t), t, epsilon, limits);
}

struct DysonIndex {
    int order = 0;
    std::vector<std::size_t> terms;
    std::vector<std::size_t> slots;

    friend bool operator==(const DysonIndex &, const DysonIndex &) = default;
};

/**
 * @brief Explicit Dyson coefficient table for one segment.
 *
 * beta_(k, l, j) = dt^k / (M^k k!) |alpha_l1(t_j1)| ... |alpha_lk(t_jk)|.
 * Within order k the index is (l-digits base L) * M^k + (j-digits base M).
 * V_j multiplies the sampled terms in time order, later samples to the left;
 * equal sample times keep the tuple order H_l1 ... H_lk (higher position acts
 * first), which makes an M = 1 table coincide with the Taylor table entrywise.
 */
class DysonTable {
  public:
    DysonTable(const TimeDependentHamiltonian &hd, double seg_time, int order,
               double segment_start, std::size_t slices,
               std::size_t budget = default_limits().table_budget)
        : qubits_(hd.qubits()), order_(order), terms_(hd.term_count()), slices_(slices),
          seg_time_(seg_time), start_(segment_start) {
        if (slices < 1) {
            throw ValidationError("slice count M must be at least 1");
        }
        if (order < 0) {
            throw ValidationError("truncation order must be nonnegative");
        }
        const std::size_t m = geometric_count(terms_ * slices_, order);
        if (m > budget) {
            throw CapExceeded("Dyson table needs m = " +
                              (m == std::numeric_limits<std::size_t>::max()
                                   ? std::string("overflow")
                                   : std::to_string(m)) +
                              " entries, budget is " + std::to_string(budget) +
                              "; lower K or M");
        }
        magnitudes_.resize(terms_ * slices_);
        words_.resize(terms_ * slices_);
        for (std::size_t l = 0; l < terms_; ++l) {
            for (std::size_t j = 0; j < slices_; ++j) {
                const double tj = sample_time(j);
                magnitudes_[l * slices_ + j] = std::abs(hd.coefficient(l, tj));
                words_[l * slices_ + j] = hd.signed_word(l, tj);
            }
        }
        offsets_.push_back(0);
        std::size_t level = 1;
        for (int k = 0; k <= order; ++k) {
            offsets_.push_back(offsets_.back() + level);
            level *= terms_ * slices_;
        }
        betas_.reserve(m);
        double prefactor = 1.0;
        for (int k = 0; k <= order; ++k) {
            if (k > 0) {
                prefactor *= seg_time / (static_cast<double>(slices_) * k);
            }
            const std::size_t count = offsets_[static_cast<std::size_t>(k) + 1] -
                                      offsets_[static_cast<std::size_t>(k)];
            for (std::size_t idx = 0; idx < count; ++idx) {
                const DysonIndex d = decode(offsets_[static_cast<std::size_t>(k)] + idx);
                double beta = prefactor;
                for (int i = 0; i < k; ++i) {
                    beta *= magnitudes_[d.terms[static_cast<std::size_t>(i)] * slices_ +
                                        d.slots[static_cast<std::size_t>(i)]];
                }
                betas_.push_back(beta);
            }
        }
        detail::DoubleDouble sum;
        for (double b : betas_) {
            sum = sum + detail::DoubleDouble{b, 0.0};
        }
        s_ = sum.hi + sum.lo;
    }

    [[nodiscard]] std::size_t size() const { return betas_.size(); }
    [[nodiscard]] std::size_t dimension() const { return std::size_t{1} << qubits_; }
    [[nodiscard]] std::span<const double> betas() const { return betas_; }
    [[nodiscard]] double s() const { return s_; }
    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] std::size_t slices() const { return slices_; }
    [[nodiscard]] std::size_t term_count() const { return terms_; }
    [[nodiscard]] double sample_time(std::size_t slot) const {
        return start_ + (static_cast<double>(slot) / static_cast<double>(slices_)) * seg_time_;
    }

    [[nodiscard]] DysonIndex decode(std::size_t j) const {
        if (j >= offsets_.back()) {
            throw ValidationError("ancilla index " + std::to_string(j) + " out of range");
        }
        int k = 0;
        while (offsets_[static_cast<std::size_t>(k) + 1] <= j) {
            ++k;
        }
        const auto ku = static_cast<std::size_t>(k);
        DysonIndex d{k, std::vector<std::size_t>(ku), std::vector<std::size_t>(ku)};
        std::size_t rem = j - offsets_[ku];
        for (std::size_t i = ku; i-- > 0;) {
            d.slots[i] = rem % slices_;
            rem /= slices_;
        }
        for (std::size_t i = ku; i-- > 0;) {
            d.terms[i] = rem % terms_;
            rem /= terms_;
        }
        return d;
    }

    [[nodiscard]] std::size_t encode(const DysonIndex &d) const {
        const auto ku = static_cast<std::size_t>(d.order);
        if (d.order < 0 || d.order > order_ || d.terms.size() != ku || d.slots.size() != ku) {
            throw ValidationError("Dyson index does not fit this table");
        }
        std::size_t rem = 0;
        for (std::size_t l : d.terms) {
            if (l >= terms_) {
                throw ValidationError("term index out of range");
            }
            rem = rem * terms_ + l;
        }
        for (std::size_t s : d.slots) {
            if (s >= slices_) {
                throw ValidationError("slot index out of range");
            }
            rem = rem * slices_ + s;
        }
        return offsets_[ku] + rem;
    }

    /// (-i)^k times the time-ordered product of signed sampled terms.
    [[nodiscard]] PauliWord word(std::size_t j) const {
        const DysonIndex d = decode(j);
        std::vector<std::array<std::size_t, 3>> factors;
        factors.reserve(d.terms.size());
        for (std::size_t i = 0; i < d.terms.size(); ++i) {
            factors.push_back({d.slots[i], d.terms.size() - 1 - i, d.terms[i]});
        }
        std::sort(factors.begin(), factors.end());
        PauliWord w;
        for (const auto &f : factors) {
            w = words_[f[2] * slices_ + f[0]] * w;
        }
        return w.times_phase(3U * static_cast<unsigned>(d.order));
    }

    void apply_unitary(std::size_t j, Eigen::Ref<StateVector> block, bool adjoint) const {
        const PauliWord w = word(j);
        apply_word(adjoint ? tlcu::adjoint(w) : w, block);
    }

  private:
    int qubits_;
    int order_;
    std::size_t terms_;
    std::size_t slices_;
    double seg_time_;
    double start_;
    std::vector<double> magnitudes_;
    std::vector<PauliWord> words_;
    std::vector<std::size_t> offsets_;
    std::vector<double> betas_;
    double s_ = 0.0;
};

inline DysonTable build_dyson_table(const TimeDependentHamiltonian &hd, const SegmentPlan &plan,
                                    int segment_index, std::size_t slices,
                                    const Limits &limits = default_limits()) {
    return DysonTable(hd, plan.segment_length(segment_index), plan.segment_order(segment_index),
                      plan.segment_start(segment_index), slices, limits.table_budget);
}

namespace detail {

using GroupDistribution = std::map<PauliWord, double>;

/// (a * b)[g h] += a[g] b[h]: b acts first.
inline GroupDistribution convolve(const GroupDistribution &a, const GroupDistribution &b) {
    GroupDistribution out;
    for (const auto &[g, wa] : a) {
        for (const auto &[h, wb] : b) {
            out[g * h] += wa * wb;
        }
    }
    return out;
}

} // namespace detail

/**
 * @brief Collapse the Dyson table of one segment onto Pauli-group classes.
 *
 * Sweeps the M slots in time order. Choosing n factors at slot j contributes
 * (dt/M)^n / n! (sum_l |alpha_l(t_j)| signed H_l)^n, and the multinomial
 * count of tuple positions cancels the 1/k!. The cost is independent of m.
 */
inline MergedLcu merge_dyson(const TimeDependentHamiltonian &hd, double seg_time, int order,
                             double segment_start, std::size_t slices) {
    if (slices < 1) {
        throw ValidationError("slice count M must be at least 1");
    }
    using detail::GroupDistribution;
    const auto K = static_cast<std::size_t>(order);
    std::vector<GroupDistribution> levels(K + 1);
    levels[0][PauliWord{}] = 1.0;
    const double step = seg_time / static_cast<double>(slices);
    for (std::size_t slot = 0; slot < slices; ++slot) {
        const double tj =
            segment_start + (static_cast<double>(slot) / static_cast<double>(slices)) * seg_time;
        GroupDistribution single;
        for (std::size_t l = 0; l < hd.term_count(); ++l) {
            const double a = std::abs(hd.coefficient(l, tj));
            if (a != 0.0) {
                single[hd.signed_word(l, tj)] += a * step;
            }
        }
        std::vector<GroupDistribution> powers(K + 1);
        powers[0][PauliWord{}] = 1.0;
        for (std::size_t n = 1; n <= K; ++n) {
            powers[n] = detail::convolve(single, powers[n - 1]);
            for (auto &entry : powers[n]) {
                entry.second /= static_cast<double>(n);
            }
        }
        std::vector<GroupDistribution> next(K + 1);
        for (std::size_t k = 0; k <= K; ++k) {
            for (std::size_t n = 0; n <= k; ++n) {
                if (powers[n].empty() || levels[k - n].empty()) {
                    continue;
                }
                for (const auto &[g, w] : detail::convolve(powers[n], levels[k - n])) {
                    next[k][g] += w;
                }
            }
        }
        levels = std::move(next);
    }
    GroupDistribution classes;
    for (std::size_t k = 1; k <= K; ++k) {
        for (const auto &[g, w] : levels[k]) {
            classes[g.times_phase(3U * static_cast<unsigned>(k))] += w;
        }
    }
    std::vector<PauliWord> words{PauliWord{}};
    std::vector<double> betas{1.0};
    for (const auto &[g, w] : classes) {
        words.push_back(g);
        betas.push_back(w);
    }
    return MergedLcu(hd.qubits(), std::move(words), std::move(betas), order);
}

/**
 * @brief Dense U~ of one segment, evaluated in the time-slot factorized form.
 *
 * U~ = degree-K truncation of prod_{j descending} exp(-i dt H(t_j) / M), with
 * each factor expanded as its Taylor series. Independent of the table codec
 * and of the Pauli-group algebra.
 */
inline DenseMatrix dyson_dense_u_tilde(const TimeDependentHamiltonian &hd, double seg_time,
                                       int order, double segment_start, std::size_t slices,
                                       const Limits &limits = default_limits()) {
    require_dense_cap(hd.qubits(), limits);
    const auto dim = static_cast<Eigen::Index>(hd.dimension());
    const auto K = static_cast<std::size_t>(order);
    std::vector<DenseMatrix> levels(K + 1, DenseMatrix::Zero(dim, dim));
    levels[0] = DenseMatrix::Identity(dim, dim);
    const cplx scale = -imag_unit * (seg_time / static_cast<double>(slices));
    std::vector<DenseMatrix> powers(K + 1);
    for (std::size_t slot = 0; slot < slices; ++slot) {
        const double tj =
            segment_start + (static_cast<double>(slot) / static_cast<double>(slices)) * seg_time;
        const DenseMatrix g = scale * hd.dense_at(tj, limits);
        powers[0] = DenseMatrix::Identity(dim, dim);
        for (std::size_t n = 1; n <= K; ++n) {
            powers[n] = g * powers[n - 1] / static_cast<double>(n);
        }
        for (std::size_t k = K + 1; k-- > 0;) {
            DenseMatrix acc = levels[k];
            for (std::size_t n = 1; n <= k; ++n) {
                acc += powers[n] * levels[k - n];
            }
            levels[k] = std::move(acc);
        }
    }
    DenseMatrix total = DenseMatrix::Zero(dim, dim);
    for (const auto &level : levels) {
        total += level;
    }
    return total;
}

/**
 * @brief Smallest power-of-two M whose dense U~ agrees with the 2M one to eps/(4r)
 * in spectral norm on every segment of the plan.
 */
inline std::size_t choose_M(const TimeDependentHamiltonian &hd, const SegmentPlan &plan,
                            double epsilon, const Limits &limits = default_limits()) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ValidationError("epsilon must lie in (0, 1)");
    }
    require_dense_cap(hd.qubits(), limits);
    const double target = epsilon / (4.0 * plan.r);
    auto evaluate = [&](std::size_t slices) {
        std::vector<DenseMatrix> out;
        for (int i = 0; i < plan.r; ++i) {
            out.push_back(dyson_dense_u_tilde(hd, plan.segment_length(i), plan.segment_order(i),
                                              plan.segment_start(i), slices, limits));
        }
        return out;
    };
    std::size_t slices = 1;
    std::vector<DenseMatrix> coarse = evaluate(slices);
    while (true) {
        if (2 * slices > limits.max_slices) {
            throw CapExceeded("time discretization M exceeds the cap " +
                              std::to_string(limits.max_slices) + " (h' = " +
                              std::to_string(hd.h_prime(plan.t)) + ")");
        }
        std::vector<DenseMatrix> fine = evaluate(2 * slices);
        double worst = 0.0;
        for (std::size_t i = 0; i < fine.size(); ++i) {
            worst = std::max(worst, spectral_norm(fine[i] - coarse[i]));
        }
        if (worst <= target) {
            return slices;
        }
        slices *= 2;
        coarse = std::move(fine);
    }
}

namespace detail {

template <class Body>
void with_dyson_sum(const TimeDependentHamiltonian &hd, double seg_time, int order, double start,
                    std::size_t slices, const EngineOptions &options, Body &&body) {
    if (use_full_table(hd.term_count() * slices, order, hd.dimension(), options)) {
        const DysonTable table(hd, seg_time, order, start, slices, options.limits.table_budget);
        body(table);
    } else {
        body(merge_dyson(hd, seg_time, order, start, slices));
    }
}

} // namespace detail

/**
 * @brief Simulate the time-ordered evolution of H(t) on [0, t] to trace distance eps.
 *
 * Every segment gets its own Dyson table at its start time. Segments whose
 * s falls short of 2 by more than eps/r use the flag-qubit correction.
 */
inline EvolutionResult run_evolution_td(const TimeDependentHamiltonian &hd, double t,
                                        double epsilon, const StateVector &psi0,
                                        const EngineOptions &options = {}) {
    const auto started = std::chrono::steady_clock::now();
    if (t < 0.0 || !std::isfinite(t)) {
        throw ValidationError("time must be nonnegative");
    }
    detail::require_unit(psi0, hd.dimension());
    EvolutionResult result;
    result.final_state = psi0;
    if (t == 0.0) {
        return result;
    }
    const SegmentPlan plan = plan_segments_td(hd, t, epsilon, options.limits);
    result.plan = plan;
    result.slices = choose_M(hd, plan, epsilon, options.limits);

    StateVector psi = psi0.normalized();
    for (int i = 0; i < plan.r; ++i) {
        SegmentReport meta;
        meta.segment_index = i;
        meta.seg_time = plan.segment_length(i);
        meta.K = plan.segment_order(i);
        meta.error_budget = plan.budget();
        detail::with_dyson_sum(
            hd, meta.seg_time, meta.K, plan.segment_start(i), result.slices, options,
            [&](const auto &u) {
                const PrepareUnitary prep(u);
                const bool full = i < plan.full_segments && 2.0 - u.s() <= plan.budget();
                auto outcome = full ? run_segment(psi, u, prep, meta, options)
                                    : run_final_segment(psi, u, prep, meta, options);
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

} // namespace tlcu
