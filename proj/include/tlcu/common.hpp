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
 * Shared scalar/vector types, error hierarchy and resource limits.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tlcu {

using cplx = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;

inline constexpr cplx imag_unit{0.0, 1.0};

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, out-of-range parameters.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// A configured size limit (dense qubit cap, K cap, table budget, M cap) was hit.
class CapExceeded : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

/// An internal invariant failed at run time, e.g. the kept probability of a
/// segment fell below the abort floor.
class InvariantViolation : public Error {
  public:
    using Error::Error;
};

/**
 * @brief Size limits that protect against pathological inputs.
 *
 * `dense_qubit_cap` bounds every routine that materializes a 2^n x 2^n matrix.
 * `max_order` bounds the truncation order K, `table_budget` the number of
 * enumerated ancilla indices m, and `max_slices` the time discretization M.
 */
struct Limits {
    int dense_qubit_cap = 12;
    int max_order = 40;
    std::size_t table_budget = std::size_t{1} << 24;
    std::size_t max_slices = std::size_t{1} << 16;
    double kept_floor = 0.5;
};

/// Default limits, with the dense cap overridable through TLCU_DENSE_CAP.
inline Limits default_limits() {
    Limits limits;
    if (const char *env = std::getenv("TLCU_DENSE_CAP"); env != nullptr && *env != '\0') {
        char *end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || value < 1 || value > 30) {
            throw ValidationError("TLCU_DENSE_CAP must be an integer in [1, 30], got '" +
                                  std::string(env) + "'");
        }
        limits.dense_qubit_cap = static_cast<int>(value);
    }
    return limits;
}

inline void require_dense_cap(int qubits, const Limits &limits) {
    if (qubits > limits.dense_qubit_cap) {
        throw CapExceeded("dense rendering needs " + std::to_string(qubits) +
                          " qubits but the dense cap is " +
                          std::to_string(limits.dense_qubit_cap) +
                          " (raise it with TLCU_DENSE_CAP)");
    }
}

} // namespace tlcu
