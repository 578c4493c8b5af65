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
 * The abstract form U~ = sum_j beta_j V_j consumed by the LCU operators and the
 * amplification engine, plus two concrete sums: MergedLcu (Pauli-group classes)
 * and DenseLcu (explicit unitary matrices).
 */

#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "pauli.hpp"

namespace tlcu {

/**
 * @brief Anything that can play the role of {beta_j, V_j}.
 *
 * `apply_unitary(j, block, adjoint)` overwrites `block` (a system vector) with
 * V_j block, or V_j^dagger block when `adjoint` is set.
 */
template <class T>
concept UnitarySum = requires(const T &u, std::size_t j, Eigen::Ref<StateVector> block,
                              bool adjoint) {
    { u.size() } -> std::convertible_to<std::size_t>;
    { u.dimension() } -> std::convertible_to<std::size_t>;
    { u.betas() } -> std::convertible_to<std::span<const double>>;
    { u.s() } -> std::convertible_to<double>;
    u.apply_unitary(j, block, adjoint);
};

/// sum_j beta_j V_j psi (or sum_j beta_j V_j^dagger psi).
template <UnitarySum U>
StateVector apply_u_tilde(const U &u, const StateVector &psi, bool adjoint = false) {
    if (static_cast<std::size_t>(psi.size()) != u.dimension()) {
        throw ValidationError("state dimension does not match the unitary sum");
    }
    StateVector acc = StateVector::Zero(psi.size());
    StateVector work(psi.size());
    const auto betas = std::span<const double>(u.betas());
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (betas[j] == 0.0) {
            continue;
        }
        work = psi;
        u.apply_unitary(j, work, adjoint);
        acc += betas[j] * work;
    }
    return acc;
}

/// Reference evaluation of U~ as a dense matrix, accumulated term by term.
template <UnitarySum U>
DenseMatrix dense_u_tilde(const U &u, const Limits &limits = default_limits()) {
    const std::size_t dim = u.dimension();
    int qubits = 0;
    while ((std::size_t{1} << qubits) < dim) {
        ++qubits;
    }
    require_dense_cap(qubits, limits);
    const auto d = static_cast<Eigen::Index>(dim);
    DenseMatrix out = DenseMatrix::Zero(d, d);
    StateVector column(d);
    const auto betas = std::span<const double>(u.betas());
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (betas[j] == 0.0) {
            continue;
        }
        for (Eigen::Index c = 0; c < d; ++c) {
            column.setZero();
            column(c) = 1.0;
            u.apply_unitary(j, column, false);
            out.col(c) += betas[j] * column;
        }
    }
    return out;
}

/**
 * @brief Unitary sum whose terms are distinct Pauli-group elements.
 *
 * Produced by collapsing every ancilla index whose V_j is the same group
 * element into one entry carrying the summed beta. Entry 0 stays the bare
 * k = 0 identity, so s and U~ are unchanged and the amplification circuit acts
 * on an invariant subspace of the original ancilla space.
 */
class MergedLcu {
  public:
    MergedLcu(int qubits, std::vector<PauliWord> words, std::vector<double> betas, int order)
        : qubits_(qubits), words_(std::move(words)), betas_(std::move(betas)), order_(order) {
        if (words_.empty() || words_.size() != betas_.size()) {
            throw ValidationError("merged LCU needs one beta per word");
        }
        for (double b : betas_) {
            if (!(b >= 0.0)) {
                throw ValidationError("merged LCU betas must be nonnegative");
            }
            s_ += b;
        }
    }

    [[nodiscard]] std::size_t size() const { return words_.size(); }
    [[nodiscard]] std::size_t dimension() const { return std::size_t{1} << qubits_; }
    [[nodiscard]] int qubits() const { return qubits_; }
    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] std::span<const double> betas() const { return betas_; }
    [[nodiscard]] double s() const { return s_; }
    [[nodiscard]] const PauliWord &word(std::size_t j) const { return words_[j]; }

    void apply_unitary(std::size_t j, Eigen::Ref<StateVector> block, bool adjoint) const {
        apply_word(adjoint ? tlcu::adjoint(words_[j]) : words_[j], block);
    }

  private:
    int qubits_;
    std::vector<PauliWord> words_;
    std::vector<double> betas_;
    int order_;
    double s_ = 0.0;
};

/// Unitary sum with explicit dense unitaries (synthetic checks, general V_j).
class DenseLcu {
  public:
    DenseLcu(std::vector<DenseMatrix> unitaries, std::vector<double> betas)
        : unitaries_(std::move(unitaries)), betas_(std::move(betas)) {
        if (unitaries_.empty() || unitaries_.size() != betas_.size()) {
            throw ValidationError("dense LCU needs one beta per unitary");
        }
        const auto d = unitaries_.front().rows();
        for (const auto &u : unitaries_) {
            if (u.rows() != d || u.cols() != d) {
                throw ValidationError("dense LCU unitaries must share one square shape");
            }
            if ((u.adjoint() * u - DenseMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
                throw ValidationError("dense LCU term is not unitary");
            }
        }
        for (double b : betas_) {
            if (!(b >= 0.0)) {
                throw ValidationError("dense LCU betas must be nonnegative");
            }
            s_ += b;
        }
    }

    [[nodiscard]] std::size_t size() const { return unitaries_.size(); }
    [[nodiscard]] std::size_t dimension() const {
        return static_cast<std::size_t>(unitaries_.front().rows());
    }
    [[nodiscard]] std::span<const double> betas() const { return betas_; }
    [[nodiscard]] double s() const { return s_; }

    void apply_unitary(std::size_t j, Eigen::Ref<StateVector> block, bool adjoint) const {
        if (adjoint) {
            block = (unitaries_[j].adjoint() * block).eval();
        } else {
            block = (unitaries_[j] * block).eval();
        }
    }

  private:
    std::vector<DenseMatrix> unitaries_;
    std::vector<double> betas_;
    double s_ = 0.0;
};

} // namespace tlcu
