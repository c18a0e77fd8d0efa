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

// Shared fixtures and independent oracles for the test suites. Everything
// in here is deliberately written from scratch (index loops, naive matmul,
// Taylor series, quadrature) so it cannot share a code path with the
// library implementation it checks.

#pragma once

#include <cmath>
#include <vector>

#include "pulseqml/detail/rng.hpp"
#include "pulseqml/types.hpp"

namespace testutil {

using pulseqml::CMatrix;
using pulseqml::Complex;
using pulseqml::StateVector;

inline CMatrix pauli_i() { return CMatrix::Identity(2, 2); }

inline CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

inline CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

// Independent Kronecker oracle: plain index formula, no blocking.
inline CMatrix kron_oracle(const CMatrix& a, const CMatrix& b) {
    CMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j)
            c(i, j) = a(i / b.rows(), j / b.cols()) * b(i % b.rows(), j % b.cols());
    return c;
}

// Naive triple-loop matrix product.
inline CMatrix matmul_oracle(const CMatrix& a, const CMatrix& b) {
    CMatrix c = CMatrix::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index k = 0; k < a.cols(); ++k)
            for (Eigen::Index j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
}

inline CMatrix commutator_oracle(const CMatrix& a, const CMatrix& b) {
    return matmul_oracle(a, b) - matmul_oracle(b, a);
}

// Taylor-series matrix exponential with scaling and squaring; independent
// of the eigendecomposition route used by the library.
inline CMatrix expm_oracle(const CMatrix& a) {
    int squarings = 0;
    double nrm = a.norm();
    while (nrm > 0.25) {
        nrm /= 2.0;
        ++squarings;
    }
    CMatrix x = a / std::pow(2.0, squarings);
    CMatrix term = CMatrix::Identity(a.rows(), a.cols());
    CMatrix sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = matmul_oracle(term, x) / double(k);
        sum += term;
        if (term.norm() < 1e-18 * sum.norm()) break;
    }
    for (int s = 0; s < squarings; ++s) sum = matmul_oracle(sum, sum);
    return sum;
}

// Rank of the Gram matrix of a set, counting eigenvalues above tol.
inline int gram_rank_oracle(const std::vector<CMatrix>& set, double tol = 1e-10) {
    const int n = int(set.size());
    CMatrix gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gram(i, j) = set[i].conjugate().cwiseProduct(set[j]).sum();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
    double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    int rank = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
        if (es.eigenvalues()[k] > tol * scale) ++rank;
    return rank;
}

inline CMatrix random_matrix(pulseqml::detail::Rng& rng, int dim) {
    CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
    return m;
}

inline CMatrix random_hermitian(pulseqml::detail::Rng& rng, int dim) {
    CMatrix m = random_matrix(rng, dim);
    return (m + m.adjoint()).eval() / 2.0;
}

inline CMatrix random_anti_hermitian(pulseqml::detail::Rng& rng, int dim) {
    CMatrix m = random_matrix(rng, dim);
    return (m - m.adjoint()).eval() / 2.0;
}

inline StateVector random_state(pulseqml::detail::Rng& rng, int dim) {
    StateVector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = Complex(rng.normal(), rng.normal());
    return v / v.norm();
}

}  // namespace testutil
