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
 * Pauli-group elements i^phase X^x Z^z on up to 64 qubits, packed as bit masks.
 *
 * Basis index bit (n-1-q) belongs to qubit q, so the first letter of an axes
 * string is the most significant tensor factor.
 */

#pragma once

#include <bit>
#include <compare>
#include <cstdint>

#include <Eigen/Dense>

#include "common.hpp"

namespace tlcu {

/// Power of i: 0 -> +1, 1 -> +i, 2 -> -1, 3 -> -i.
inline cplx phase_factor(unsigned power) {
    switch (power & 3U) {
    case 0:
        return {1.0, 0.0};
    case 1:
        return {0.0, 1.0};
    case 2:
        return {-1.0, 0.0};
    default:
        return {0.0, -1.0};
    }
}

/**
 * @brief Pauli-group element i^phase X^x Z^z (Z^z acts first).
 *
 * Ordered lexicographically so it can key ordered maps deterministically.
 */
struct PauliWord {
    std::uint8_t phase = 0;
    std::uint64_t x = 0;
    std::uint64_t z = 0;

    friend auto operator<=>(const PauliWord &, const PauliWord &) = default;

    [[nodiscard]] bool is_identity_up_to_phase() const { return x == 0 && z == 0; }

    /// Multiply by i^power.
    [[nodiscard]] PauliWord times_phase(unsigned power) const {
        return {static_cast<std::uint8_t>((phase + power) & 3U), x, z};
    }
};

/// Group product a*b (b acts first).
inline PauliWord operator*(const PauliWord &a, const PauliWord &b) {
    const auto swaps = static_cast<unsigned>(std::popcount(a.z & b.x));
    return {static_cast<std::uint8_t>((a.phase + b.phase + 2U * swaps) & 3U), a.x ^ b.x,
            a.z ^ b.z};
}

inline PauliWord adjoint(const PauliWord &w) {
    const auto swaps = static_cast<unsigned>(std::popcount(w.x & w.z));
    return {static_cast<std::uint8_t>((4U - w.phase + 2U * swaps) & 3U), w.x, w.z};
}

/// Apply `w` to a state vector in place, O(dim) and without materializing a matrix.
template <class Derived> void apply_word(const PauliWord &w, Eigen::DenseBase<Derived> &v) {
    const cplx global = phase_factor(w.phase);
    const auto dim = static_cast<std::uint64_t>(v.size());
    auto sign = [&](std::uint64_t y) {
        return (std::popcount(y & w.z) & 1) != 0 ? -global : global;
    };
    if (w.x == 0) {
        if (w.z == 0 && w.phase == 0) {
            return;
        }
        for (std::uint64_t y = 0; y < dim; ++y) {
            v(static_cast<Eigen::Index>(y)) *= sign(y);
        }
        return;
    }
    for (std::uint64_t y = 0; y < dim; ++y) {
        const std::uint64_t partner = y ^ w.x;
        if (partner < y) {
            continue;
        }
        const auto iy = static_cast<Eigen::Index>(y);
        const auto ip = static_cast<Eigen::Index>(partner);
        const cplx at_y = v(iy);
        v(iy) = sign(partner) * v(ip);
        v(ip) = sign(y) * at_y;
    }
}

template <class Derived> void apply_word(const PauliWord &w, Eigen::DenseBase<Derived> &&v) {
    apply_word(w, v);
}

} // namespace tlcu
