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
 * B, select(V), W, P, R and A as linear maps on the joint (ancilla, system)
 * space. Nothing here materializes an operator on the joint space.
 *
 * A joint state may carry an outer two-dimensional flag factor in front of
 * the m-dimensional ancilla register (ancilla_dim == 2m). B and select(V) act
 * on the register for both flag values; P and R single out joint index 0.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "common.hpp"
#include "taylor_lcu.hpp"
#include "unitary_sum.hpp"

namespace tlcu {

/// Amplitudes addressed row-major as (ancilla index j, system index x).
class JointState {
  public:
    JointState(std::size_t ancilla_dim, std::size_t system_dim)
        : ancilla_dim_(ancilla_dim), system_dim_(system_dim),
          amplitudes_(StateVector::Zero(static_cast<Eigen::Index>(ancilla_dim * system_dim))) {
        if (ancilla_dim == 0 || system_dim == 0) {
            throw ValidationError("joint state dimensions must be positive");
        }
    }

    [[nodiscard]] std::size_t ancilla_dim() const { return ancilla_dim_; }
    [[nodiscard]] std::size_t system_dim() const { return system_dim_; }
    [[nodiscard]] StateVector &amplitudes() { return amplitudes_; }
    [[nodiscard]] const StateVector &amplitudes() const { return amplitudes_; }
    [[nodiscard]] double norm() const { return amplitudes_.norm(); }

    [[nodiscard]] auto block(std::size_t j) {
        return amplitudes_.segment(static_cast<Eigen::Index>(j * system_dim_),
                                   static_cast<Eigen::Index>(system_dim_));
    }
    [[nodiscard]] auto block(std::size_t j) const {
        return amplitudes_.segment(static_cast<Eigen::Index>(j * system_dim_),
                                   static_cast<Eigen::Index>(system_dim_));
    }

    /// |0>|psi>.
    static JointState ancilla_zero(std::size_t ancilla_dim, const StateVector &psi) {
        JointState state(ancilla_dim, static_cast<std::size_t>(psi.size()));
        state.block(0) = psi;
        return state;
    }

  private:
    std::size_t ancilla_dim_;
    std::size_t system_dim_;
    StateVector amplitudes_;
};

/**
 * @brief Prepare unitary completed as the real Householder reflection I - 2 v v^T.
 *
 * v is proportional to target - e_0, so B e_0 = target, B = B^T = B^dagger and
 * B^2 = I. When target already equals e_0 the reflection degenerates to I.
 */
class PrepareUnitary {
  public:
    explicit PrepareUnitary(Eigen::VectorXd target) : target_(std::move(target)) {
        if (target_.size() == 0) {
            throw ValidationError("prepare target must be nonempty");
        }
        if (std::abs(target_.norm() - 1.0) > 1e-12) {
            throw ValidationError("prepare target must have unit norm");
        }
        reflector_ = target_;
        // target_0 - 1 = -(1 - t0^2)/(1 + t0) avoids cancellation when t0 ~ 1
        const double rest = target_.tail(target_.size() - 1).squaredNorm();
        reflector_(0) = -rest / (1.0 + target_(0));
        const double len = std::sqrt(rest + reflector_(0) * reflector_(0));
        if (len == 0.0) {
            reflector_.setZero();
        } else {
            reflector_ /= len;
        }
    }

    template <UnitarySum U>
    explicit PrepareUnitary(const U &u) : PrepareUnitary(prepare_amplitudes(u.betas(), u.s())) {}

    [[nodiscard]] std::size_t dimension() const { return static_cast<std::size_t>(target_.size()); }
    [[nodiscard]] const Eigen::VectorXd &target() const { return target_; }
    [[nodiscard]] const Eigen::VectorXd &reflector() const { return reflector_; }

  private:
    Eigen::VectorXd target_;
    Eigen::VectorXd reflector_;
};

namespace detail {

inline std::size_t flag_copies(const JointState &state, std::size_t register_dim) {
    if (register_dim == 0 || state.ancilla_dim() % register_dim != 0 ||
        state.ancilla_dim() / register_dim > 2) {
        throw ValidationError("joint state ancilla dimension " +
                              std::to_string(state.ancilla_dim()) +
                              " does not match register dimension " +
                              std::to_string(register_dim));
    }
    return state.ancilla_dim() / register_dim;
}

} // namespace detail

/// (B (x) 1) on every flag copy of the register. B is self-adjoint, so `adjoint` is inert.
inline JointState apply_B(JointState state, const PrepareUnitary &prep, bool adjoint = false) {
    static_cast<void>(adjoint);
    const std::size_t m = prep.dimension();
    const std::size_t copies = detail::flag_copies(state, m);
    const Eigen::VectorXd &v = prep.reflector();
    StateVector overlap(static_cast<Eigen::Index>(state.system_dim()));
    for (std::size_t q = 0; q < copies; ++q) {
        const std::size_t base = q * m;
        overlap.setZero();
        for (std::size_t j = 0; j < m; ++j) {
            const double vj = v(static_cast<Eigen::Index>(j));
            if (vj != 0.0) {
                overlap += vj * state.block(base + j);
            }
        }
        for (std::size_t j = 0; j < m; ++j) {
            const double vj = v(static_cast<Eigen::Index>(j));
            if (vj != 0.0) {
                state.block(base + j) -= (2.0 * vj) * overlap;
            }
        }
    }
    return state;
}

/// select(V): block j -> V_j block (or V_j^dagger block).
template <UnitarySum U>
JointState apply_select_V(JointState state, const U &u, bool adjoint = false) {
    if (state.system_dim() != u.dimension()) {
        throw ValidationError("joint state system dimension does not match the unitary sum");
    }
    const std::size_t m = u.size();
    const std::size_t copies = detail::flag_copies(state, m);
    for (std::size_t q = 0; q < copies; ++q) {
        for (std::size_t j = 0; j < m; ++j) {
            auto blk = state.block(q * m + j);
            u.apply_unitary(j, blk, adjoint);
        }
    }
    return state;
}

inline JointState apply_select_V(JointState state, const LcuHamiltonian &h,
                                 const CoefficientTable &table, bool adjoint = false) {
    return apply_select_V(std::move(state), TaylorLcu(h, table), adjoint);
}

/// Rotation of the flag factor: |0> -> cos(theta)|0> + sin(theta)|1>.
inline JointState apply_flag_rotation(JointState state, std::size_t register_dim, double theta,
                                      bool adjoint = false) {
    if (state.ancilla_dim() != 2 * register_dim) {
        throw ValidationError("flag rotation needs a joint state with a flag factor");
    }
    const double c = std::cos(theta);
    const double sn = adjoint ? -std::sin(theta) : std::sin(theta);
    for (std::size_t j = 0; j < register_dim; ++j) {
        StateVector low = state.block(j);
        StateVector high = state.block(register_dim + j);
        state.block(j) = c * low - sn * high;
        state.block(register_dim + j) = sn * low + c * high;
    }
    return state;
}

/**
 * @brief W = (B^dagger (x) 1) select(V) (B (x) 1), or W^dagger when `adjoint` is set.
 *
 * With `flag_angle`, the state carries a flag factor and the forward map is
 * (1 (x) B^dagger) select(V) (R_theta (x) B): the rotation is applied on the
 * way in only, which scales the good amplitude by cos(theta).
 */
template <UnitarySum U>
JointState apply_W(JointState state, const PrepareUnitary &prep, const U &u, bool adjoint = false,
                   std::optional<double> flag_angle = std::nullopt) {
    if (prep.dimension() != u.size()) {
        throw ValidationError("prepare unitary and unitary sum disagree on m");
    }
    const std::size_t m = u.size();
    if (!adjoint) {
        if (flag_angle) {
            state = apply_flag_rotation(std::move(state), m, *flag_angle);
        }
        state = apply_B(std::move(state), prep);
        state = apply_select_V(std::move(state), u);
        return apply_B(std::move(state), prep, true);
    }
    state = apply_B(std::move(state), prep);
    state = apply_select_V(std::move(state), u, true);
    state = apply_B(std::move(state), prep, true);
    if (flag_angle) {
        state = apply_flag_rotation(std::move(state), m, *flag_angle, true);
    }
    return state;
}

/// P = |0><0| (x) 1; returns the unnormalized projection and its squared norm.
inline std::pair<JointState, double> apply_projector_P(JointState state) {
    const double kept = state.block(0).squaredNorm();
    const auto sys = static_cast<Eigen::Index>(state.system_dim());
    state.amplitudes().tail(state.amplitudes().size() - sys).setZero();
    return {std::move(state), kept};
}

/// R = 1 - 2P: negates ancilla block 0.
inline JointState apply_reflection_R(JointState state) {
    state.block(0) *= -1.0;
    return state;
}

/// A = -W R W^dagger R W.
template <UnitarySum U>
JointState apply_A(JointState state, const PrepareUnitary &prep, const U &u,
                   std::optional<double> flag_angle = std::nullopt) {
    state = apply_W(std::move(state), prep, u, false, flag_angle);
    state = apply_reflection_R(std::move(state));
    state = apply_W(std::move(state), prep, u, true, flag_angle);
    state = apply_reflection_R(std::move(state));
    state = apply_W(std::move(state), prep, u, false, flag_angle);
    state.amplitudes() *= -1.0;
    return state;
}

/// U~ = sum_j beta_j V_j for a Taylor table, as a dense matrix.
inline DenseMatrix dense_U_tilde(const LcuHamiltonian &h, const CoefficientTable &table,
                                 const Limits &limits = default_limits()) {
    return dense_u_tilde(TaylorLcu(h, table), limits);
}

} // namespace tlcu
