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
 * Segment planning and the truncated Taylor coefficient table.
 *
 * A full segment has alpha_sum * seg_time = ln 2, which puts the untruncated
 * coefficient sum at exactly 2. The truncation order K is the smallest order
 * whose series tail sum_{k>K} ln(2)^k / k! fits the per-segment budget eps/r.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "hamiltonian.hpp"
#include "pauli.hpp"
#include "unitary_sum.hpp"

namespace tlcu {

inline constexpr double ln2 = std::numbers::ln2;

namespace detail {

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;
};

inline DoubleDouble two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline DoubleDouble quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
    DoubleDouble s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
    const double p = a.hi * b.hi;
    double e = std::fma(a.hi, b.hi, -p);
    e += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p, e);
}

inline DoubleDouble operator/(DoubleDouble a, double k) {
    const double q = a.hi / k;
    const double p = q * k;
    const double e = std::fma(q, k, -p);
    const double r = ((a.hi - p) - e + a.lo) / k;
    return quick_two_sum(q, r);
}

// ln 2 to ~106 bits.
inline constexpr DoubleDouble ln2_dd{0x1.62e42fefa39efp-1, 0x1.abc9e3b39803fp-56};

inline DoubleDouble partial_exp_sum(int order, DoubleDouble x) {
    DoubleDouble term{1.0, 0.0};
    DoubleDouble sum = term;
    for (int k = 1; k <= order; ++k) {
        term = term * x / static_cast<double>(k);
        sum = sum + term;
    }
    return sum;
}

} // namespace detail

/// sum_{k=0}^{order} x^k / k!, accumulated in double-double.
inline double taylor_partial_sum(int order, double x) {
    const auto sum = detail::partial_exp_sum(order, {x, 0.0});
    return sum.hi + sum.lo;
}

/// sum_{k>order} x^k / k! for 0 <= x <= 1, summed forward over the positive tail.
inline double taylor_tail(int order, double x) {
    if (x == 0.0) {
        return 0.0;
    }
    double term = 1.0;
    for (int k = 1; k <= order + 1; ++k) {
        term *= x / static_cast<double>(k);
    }
    double sum = 0.0;
    for (int k = order + 1; k < order + 400 && term > sum * 1e-20; ++k) {
        sum += term;
        term *= x / static_cast<double>(k + 1);
    }
    return sum;
}

/**
 * @brief sum_{k>order} ln(2)^k / k!, computed as 2 minus the compensated partial sum.
 *
 * Below ~1e-28 the difference is dominated by double-double rounding, so the
 * positive forward series takes over there.
 */
inline double ln2_tail(int order) {
    const auto sum = detail::partial_exp_sum(order, detail::ln2_dd);
    const double tail = (2.0 - sum.hi) - sum.lo;
    return tail > 1e-28 ? tail : taylor_tail(order, ln2);
}

/**
 * @brief Segmentation of [0, t] into r segments with truncation orders.
 *
 * The first `full_segments` segments have length `seg_time` = ln2 / alpha_sum
 * and order `K`; the remaining (final) segment, if any, is shorter and has its
 * own order `final_K` chosen against the same per-segment budget eps/r.
 */
struct SegmentPlan {
    double t = 0.0;
    double epsilon = 0.0;
    double alpha_sum = 0.0;
    double T = 0.0;
    int r = 0;
    int full_segments = 0;
    double seg_time = 0.0;
    int K = 0;
    double s = 0.0;
    double final_seg_time = 0.0;
    int final_K = 0;
    double final_s = 0.0;

    [[nodiscard]] double budget() const { return epsilon / r; }
    [[nodiscard]] bool final_is_full() const { return full_segments == r; }
    [[nodiscard]] double segment_length(int index) const {
        return index < full_segments ? seg_time : final_seg_time;
    }
    [[nodiscard]] int segment_order(int index) const {
        return index < full_segments ? K : final_K;
    }
    [[nodiscard]] double segment_start(int index) const {
        return static_cast<double>(index) * seg_time;
    }
};

/// Smallest K with tail(K) <= budget.
template <class Tail> int truncation_order(Tail &&tail, double budget, int max_order) {
    for (int k = 0; k <= max_order; ++k) {
        if (tail(k) <= budget) {
            return k;
        }
    }
    throw CapExceeded("truncation order exceeds the cap K <= " + std::to_string(max_order) +
                      " for per-segment budget " + std::to_string(budget));
}

/// Plan for a Hamiltonian whose weights sum to (or are bounded by) `alpha_sum`.
inline SegmentPlan plan_segments(double alpha_sum, double t, double epsilon,
                                 const Limits &limits = default_limits()) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw ValidationError("time must be positive");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ValidationError("epsilon must lie in (0, 1)");
    }
    if (!(alpha_sum > 0.0) || !std::isfinite(alpha_sum)) {
        throw ValidationError("weight sum must be positive and finite");
    }
    SegmentPlan plan;
    plan.t = t;
    plan.epsilon = epsilon;
    plan.alpha_sum = alpha_sum;
    plan.T = alpha_sum * t;

    const double q = plan.T / ln2;
    if (q > 1e9) {
        throw CapExceeded("segment count " + std::to_string(q) + " is unreasonably large");
    }
    const double nearest = std::round(q);
    const bool exact = nearest >= 1.0 && std::abs(q - nearest) <= 1e-12 * std::max(1.0, q);
    plan.r = exact ? static_cast<int>(nearest) : static_cast<int>(std::ceil(q));
    plan.full_segments = exact ? plan.r : plan.r - 1;
    plan.seg_time = ln2 / alpha_sum;

    const double budget = plan.budget();
    plan.K = truncation_order([](int k) { return ln2_tail(k); }, budget, limits.max_order);
    plan.s = taylor_partial_sum(plan.K, ln2);

    if (exact) {
        plan.final_seg_time = plan.seg_time;
        plan.final_K = plan.K;
        plan.final_s = plan.s;
    } else {
        plan.final_seg_time = t - static_cast<double>(plan.full_segments) * plan.seg_time;
        const double x = alpha_sum * plan.final_seg_time;
        plan.final_K = truncation_order([x](int k) { return taylor_tail(k, x); }, budget,
                                        limits.max_order);
        plan.final_s = taylor_partial_sum(plan.final_K, x);
    }
    return plan;
}

inline SegmentPlan plan_segments(const LcuHamiltonian &h, double t, double epsilon,
                                 const Limits &limits = default_limits()) {
    return plan_segments(h.alpha_sum(), t, epsilon, limits);
}

/// Ancilla dimension sum_{k=0}^{K} base^k, or max() on overflow.
inline std::size_t geometric_count(std::size_t base, int order) {
    constexpr std::size_t huge = std::numeric_limits<std::size_t>::max();
    std::size_t total = 0;
    std::size_t power = 1;
    for (int k = 0; k <= order; ++k) {
        if (total > huge - power) {
            return huge;
        }
        total += power;
        if (k < order) {
            if (base != 0 && power > huge / base) {
                return huge;
            }
            power *= base;
        }
    }
    return total;
}

/// Ancilla index tuple (k; l_1, ..., l_k) with 0-based term indices.
struct IndexTuple {
    int order = 0;
    std::vector<std::size_t> terms;

    friend bool operator==(const IndexTuple &, const IndexTuple &) = default;
};

/**
 * @brief Coefficients beta_(k,l_1..l_k) = seg_time^k / k! * alpha_l1 ... alpha_lk.
 *
 * Entries are laid out in lexicographic order of (k, l_1, ..., l_k); index 0 is
 * the k = 0 identity term.
 */
class CoefficientTable {
  public:
    CoefficientTable(const LcuHamiltonian &h, double seg_time, int order,
                     std::size_t budget = default_limits().table_budget)
        : order_(order), terms_(h.term_count()), seg_time_(seg_time) {
        if (order < 0) {
            throw ValidationError("truncation order must be nonnegative");
        }
        if (!(seg_time > 0.0)) {
            throw ValidationError("segment time must be positive");
        }
        const std::size_t m = geometric_count(terms_, order);
        if (m > budget) {
            throw CapExceeded("coefficient table needs m = " +
                              (m == std::numeric_limits<std::size_t>::max()
                                   ? std::string("overflow")
                                   : std::to_string(m)) +
                              " entries, budget is " + std::to_string(budget) +
                              "; lower K (larger epsilon) or use fewer terms");
        }
        offsets_.reserve(static_cast<std::size_t>(order) + 2);
        betas_.reserve(m);
        offsets_.push_back(0);
        betas_.push_back(1.0);
        for (int k = 1; k <= order; ++k) {
            const std::size_t prev_begin = offsets_.back();
            const std::size_t prev_end = betas_.size();
            offsets_.push_back(prev_end);
            const double step = seg_time / static_cast<double>(k);
            for (std::size_t i = prev_begin; i < prev_end; ++i) {
                for (std::size_t l = 0; l < terms_; ++l) {
                    betas_.push_back(betas_[i] * step * h.term(l).weight);
                }
            }
        }
        offsets_.push_back(betas_.size());
        detail::DoubleDouble sum;
        for (double b : betas_) {
            sum = sum + detail::DoubleDouble{b, 0.0};
        }
        s_ = sum.hi + sum.lo;
    }

    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] std::size_t term_count() const { return terms_; }
    [[nodiscard]] std::size_t size() const { return betas_.size(); }
    [[nodiscard]] double seg_time() const { return seg_time_; }
    [[nodiscard]] std::span<const double> betas() const { return betas_; }
    [[nodiscard]] double beta(std::size_t j) const { return betas_.at(j); }
    [[nodiscard]] double s() const { return s_; }

    /// Order k of index j.
    [[nodiscard]] int order_of(std::size_t j) const {
        check_index(j);
        int k = 0;
        while (offsets_[static_cast<std::size_t>(k) + 1] <= j) {
            ++k;
        }
        return k;
    }

    [[nodiscard]] IndexTuple decode(std::size_t j) const {
        const int k = order_of(j);
        IndexTuple tuple{k, std::vector<std::size_t>(static_cast<std::size_t>(k))};
        std::size_t rem = j - offsets_[static_cast<std::size_t>(k)];
        for (int i = k - 1; i >= 0; --i) {
            tuple.terms[static_cast<std::size_t>(i)] = rem % terms_;
            rem /= terms_;
        }
        return tuple;
    }

    [[nodiscard]] std::size_t encode(const IndexTuple &tuple) const {
        if (tuple.order < 0 || tuple.order > order_ ||
            tuple.terms.size() != static_cast<std::size_t>(tuple.order)) {
            throw ValidationError("index tuple does not fit this table");
        }
        std::size_t rem = 0;
        for (std::size_t l : tuple.terms) {
            if (l >= terms_) {
                throw ValidationError("term index out of range in index tuple");
            }
            rem = rem * terms_ + l;
        }
        return offsets_[static_cast<std::size_t>(tuple.order)] + rem;
    }

    /// V_j = (-i)^k H_l1 ... H_lk as a Pauli-group element.
    [[nodiscard]] PauliWord word(const LcuHamiltonian &h, std::size_t j) const {
        const int k = order_of(j);
        std::size_t rem = j - offsets_[static_cast<std::size_t>(k)];
        PauliWord w;
        for (int i = k - 1; i >= 0; --i) {
            w = h.word(rem % terms_) * w;
            rem /= terms_;
        }
        return w.times_phase(3U * static_cast<unsigned>(k));
    }

  private:
    void check_index(std::size_t j) const {
        if (j >= betas_.size()) {
            throw ValidationError("ancilla index " + std::to_string(j) + " out of range");
        }
    }

    int order_;
    std::size_t terms_;
    double seg_time_;
    std::vector<std::size_t> offsets_;
    std::vector<double> betas_;
    double s_ = 0.0;
};

inline CoefficientTable build_coefficient_table(const LcuHamiltonian &h, const SegmentPlan &plan,
                                                const Limits &limits = default_limits()) {
    return CoefficientTable(h, plan.seg_time, plan.K, limits.table_budget);
}

inline CoefficientTable build_final_coefficient_table(const LcuHamiltonian &h,
                                                      const SegmentPlan &plan,
                                                      const Limits &limits = default_limits()) {
    return CoefficientTable(h, plan.final_seg_time, plan.final_K, limits.table_budget);
}

/// Binds a coefficient table to its Hamiltonian so it can act as select(V).
class TaylorLcu {
  public:
    TaylorLcu(const LcuHamiltonian &h, const CoefficientTable &table) : h_(&h), table_(&table) {
        if (table.term_count() != h.term_count()) {
            throw ValidationError("coefficient table and Hamiltonian disagree on L");
        }
    }

    [[nodiscard]] std::size_t size() const { return table_->size(); }
    [[nodiscard]] std::size_t dimension() const { return h_->dimension(); }
    [[nodiscard]] std::span<const double> betas() const { return table_->betas(); }
    [[nodiscard]] double s() const { return table_->s(); }
    [[nodiscard]] const CoefficientTable &table() const { return *table_; }
    [[nodiscard]] const LcuHamiltonian &hamiltonian() const { return *h_; }
    [[nodiscard]] PauliWord word(std::size_t j) const { return table_->word(*h_, j); }

    void apply_unitary(std::size_t j, Eigen::Ref<StateVector> block, bool adjoint) const {
        const PauliWord w = word(j);
        apply_word(adjoint ? tlcu::adjoint(w) : w, block);
    }

  private:
    const LcuHamiltonian *h_;
    const CoefficientTable *table_;
};

/// B|0> amplitudes sqrt(beta_j / s).
inline Eigen::VectorXd prepare_amplitudes(std::span<const double> betas, double s) {
    Eigen::VectorXd a(static_cast<Eigen::Index>(betas.size()));
    for (std::size_t j = 0; j < betas.size(); ++j) {
        a(static_cast<Eigen::Index>(j)) = std::sqrt(betas[j] / s);
    }
    return a;
}

inline Eigen::VectorXd prepare_amplitudes(const CoefficientTable &table) {
    return prepare_amplitudes(table.betas(), table.s());
}

/**
 * @brief Collapse the Taylor table of (h, seg_time, order) onto Pauli-group classes.
 *
 * The class weights are accumulated level by level over the group
 * (D_k = D_{k-1} * sum_l alpha_l H_l), so the cost is independent of m.
 */
inline MergedLcu merge_taylor(const LcuHamiltonian &h, double seg_time, int order) {
    std::map<PauliWord, double> level{{PauliWord{}, 1.0}};
    std::map<PauliWord, double> classes;
    for (int k = 1; k <= order; ++k) {
        std::map<PauliWord, double> next;
        const double step = seg_time / static_cast<double>(k);
        for (const auto &[g, weight] : level) {
            for (std::size_t l = 0; l < h.term_count(); ++l) {
                next[g * h.word(l)] += weight * step * h.term(l).weight;
            }
        }
        level = std::move(next);
        const unsigned rotate = 3U * static_cast<unsigned>(k);
        for (const auto &[g, weight] : level) {
            classes[g.times_phase(rotate)] += weight;
        }
    }
    std::vector<PauliWord> words{PauliWord{}};
    std::vector<double> betas{1.0};
    for (const auto &[g, weight] : classes) {
        words.push_back(g);
        betas.push_back(weight);
    }
    return MergedLcu(h.qubits(), std::move(words), std::move(betas), order);
}

} // namespace tlcu
