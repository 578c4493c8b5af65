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
 * Brute-force references: spectral matrix exponential, midpoint-product
 * time-ordered propagator, and the pure-state trace distance.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "common.hpp"

namespace tlcu {

enum class PropagatorMethod { eigendecomposition, fine_step_product };

struct ExactPropagator {
    DenseMatrix matrix;
    double t = 0.0;
    PropagatorMethod method = PropagatorMethod::eigendecomposition;
    int steps = 0;
};

inline double spectral_norm(const DenseMatrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::BDCSVD<DenseMatrix> svd(m);
    return svd.singularValues()(0);
}

namespace detail {

inline int qubits_for(Eigen::Index dim) {
    int q = 0;
    while ((Eigen::Index{1} << q) < dim) {
        ++q;
    }
    return q;
}

} // namespace detail

/// exp(-i H t) = V diag(exp(-i lambda_k t)) V^dagger for Hermitian H.
inline ExactPropagator expm_hermitian(const DenseMatrix &hamiltonian, double t,
                                      const Limits &limits = default_limits()) {
    if (hamiltonian.rows() != hamiltonian.cols() || hamiltonian.rows() == 0) {
        throw ValidationError("Hamiltonian matrix must be square and nonempty");
    }
    require_dense_cap(detail::qubits_for(hamiltonian.rows()), limits);
    const double scale = std::max(1.0, hamiltonian.cwiseAbs().maxCoeff());
    if ((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw ValidationError("matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(hamiltonian);
    if (eig.info() != Eigen::Success) {
        throw InvariantViolation("Hermitian eigendecomposition failed");
    }
    const Eigen::VectorXd &lambda = eig.eigenvalues();
    Eigen::VectorXcd phases(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        phases(k) = std::polar(1.0, -lambda(k) * t);
    }
    const DenseMatrix &v = eig.eigenvectors();
    return {v * phases.asDiagonal() * v.adjoint(), t, PropagatorMethod::eigendecomposition, 0};
}

using MatrixFunction = std::function<DenseMatrix(double)>;

/// prod_{q = steps-1 .. 0} exp(-i H(t_q + dt/2) dt) with dt = t/steps.
inline DenseMatrix midpoint_product(const MatrixFunction &hamiltonian_at, double t, int steps,
                                    double t0 = 0.0, const Limits &limits = default_limits()) {
    if (steps < 1) {
        throw ValidationError("step count must be at least 1");
    }
    const double dt = t / steps;
    DenseMatrix u;
    for (int q = 0; q < steps; ++q) {
        const DenseMatrix step = expm_hermitian(hamiltonian_at(t0 + (q + 0.5) * dt), dt, limits).matrix;
        u = q == 0 ? step : DenseMatrix(step * u);
    }
    return u;
}

/**
 * @brief Time-ordered propagator by midpoint products with step doubling.
 *
 * Doubles the step count until two successive products differ by less than
 * `tolerance` in spectral norm and returns the finer one.
 */
inline ExactPropagator time_ordered_exact(const MatrixFunction &hamiltonian_at, double t,
                                          int steps, const Limits &limits = default_limits(),
                                          double tolerance = 1e-10, int max_steps = 1 << 20) {
    if (steps < 1) {
        throw ValidationError("step count must be at least 1");
    }
    DenseMatrix previous = midpoint_product(hamiltonian_at, t, steps, 0.0, limits);
    while (true) {
        if (steps > max_steps / 2) {
            throw CapExceeded("time-ordered product did not converge within " +
                              std::to_string(max_steps) + " steps");
        }
        steps *= 2;
        DenseMatrix refined = midpoint_product(hamiltonian_at, t, steps, 0.0, limits);
        if (spectral_norm(refined - previous) < tolerance) {
            return {std::move(refined), t, PropagatorMethod::fine_step_product, steps};
        }
        previous = std::move(refined);
    }
}

/// sqrt(1 - |<phi|psi>|^2), evaluated as the norm of psi's component orthogonal to phi.
inline double trace_distance(const StateVector &phi, const StateVector &psi) {
    if (phi.size() != psi.size()) {
        throw ValidationError("trace distance needs states of equal dimension");
    }
    if (std::abs(phi.norm() - 1.0) > 1e-8 || std::abs(psi.norm() - 1.0) > 1e-8) {
        throw ValidationError("trace distance needs unit-norm states");
    }
    const StateVector a = phi.normalized();
    const StateVector b = psi.normalized();
    const cplx overlap = a.dot(b);
    return std::min(1.0, (b - overlap * a).norm());
}

} // namespace tlcu
