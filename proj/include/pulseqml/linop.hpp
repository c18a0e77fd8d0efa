// Copyright 2026 The pulseqml authors
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

// linop.hpp - dense complex linear-algebra kernel: Kronecker products,
// commutators, matrix exponentials, Hilbert-Schmidt inner products and
// tolerance-based orthonormalization. Everything here is a pure function
// on immutable inputs.

#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pulseqml/types.hpp"

namespace pulseqml::linop {

inline bool all_finite(const CMatrix& a) {
    return a.allFinite();
}

inline void require_square(const CMatrix& a, const char* who) {
    if (a.rows() != a.cols()) throw std::invalid_argument(std::string(who) + ": matrix must be square");
}

inline void require_same_shape(const CMatrix& a, const CMatrix& b, const char* who) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

// Kronecker product. Guarded against blowing past the configured qubit cap
// (kMaxQubits) since every dimension in this library is a power of two.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    const Eigen::Index max_dim = Eigen::Index(1) << kMaxQubits;
    if (a.rows() * b.rows() > max_dim || a.cols() * b.cols() > max_dim)
        throw std::invalid_argument("kron: result dimension exceeds the configured maximum");
    CMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            c.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return c;
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) {
    require_square(a, "commutator");
    require_same_shape(a, b, "commutator");
    return a * b - b * a;
}

inline Complex hs_inner(const CMatrix& a, const CMatrix& b) {
    require_same_shape(a, b, "hs_inner");
    return a.conjugate().cwiseProduct(b).sum();  // Tr(a^dag b)
}

inline double hs_norm(const CMatrix& a) {
    return a.norm();  // Frobenius == sqrt(Tr(a^dag a))
}

inline bool is_hermitian(const CMatrix& a, double tol = 1e-12) {
    if (a.rows() != a.cols()) return false;
    double scale = std::max(1.0, a.norm());
    return (a - a.adjoint()).norm() <= tol * scale;
}

inline bool is_anti_hermitian(const CMatrix& a, double tol = 1e-12) {
    if (a.rows() != a.cols()) return false;
    double scale = std::max(1.0, a.norm());
    return (a + a.adjoint()).norm() <= tol * scale;
}

// exp(-i * h * dt) for Hermitian h via eigendecomposition; unitary to
// machine precision, which keeps evolved states normalized.
inline CMatrix propagator(const CMatrix& h, double dt) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("propagator: eigensolver failed");
    const auto& lam = es.eigenvalues();
    StateVector phases(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k)
        phases[k] = std::exp(Complex(0.0, -dt * lam[k]));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Matrix exponential. Hermitian and anti-Hermitian generators (all cases
// arising from quantum models) go through the exact eigendecomposition;
// anything else falls back to scaling-and-squaring Pade.
inline CMatrix expm(const CMatrix& a) {
    require_square(a, "expm");
    if (!all_finite(a)) throw std::invalid_argument("expm: non-finite input");
    if (is_hermitian(a)) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
        StateVector phases(a.rows());
        for (Eigen::Index k = 0; k < a.rows(); ++k)
            phases[k] = std::exp(Complex(es.eigenvalues()[k], 0.0));
        return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    }
    if (is_anti_hermitian(a)) {
        // a = i*h with h Hermitian, so exp(a) = V exp(i*lambda) V^dag.
        CMatrix h = (a / kImag).eval();
        return propagator(h, -1.0);
    }
    return a.exp();
}

// Modified Gram-Schmidt with one re-orthogonalization pass under the
// Hilbert-Schmidt inner product. Inputs whose residual after projection is
// below tol * (largest input norm) are treated as linearly dependent and
// dropped. Returns an orthonormal basis of the input span.
inline std::vector<CMatrix> orthonormalize(const std::vector<CMatrix>& set, double tol = 1e-10) {
    std::vector<CMatrix> basis;
    if (set.empty()) return basis;
    double max_norm = 0.0;
    for (const auto& a : set) {
        require_same_shape(a, set.front(), "orthonormalize");
        max_norm = std::max(max_norm, hs_norm(a));
    }
    if (max_norm == 0.0) return basis;
    for (const auto& a : set) {
        CMatrix v = a;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) v -= hs_inner(b, v) * b;
        double r = hs_norm(v);
        if (r >= tol * max_norm) basis.push_back(v / r);
    }
    return basis;
}

}  // namespace pulseqml::linop
