// Copyright 2026 The oqrw-tree Authors
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

// Dense complex matrix kernel for small operators: Kronecker products,
// partial traces, Hermitian eigenvalues, PSD square roots and
// tolerance-based structural predicates.
//
// Tensor ordering convention (used by the whole library): kron(A, B) makes
// the LEFT factor vary slowest, i.e. index (a * dim(B) + r). Operators on
// H (x) K are built as kron(op_on_H, op_on_K).

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "oqrw/errors.hpp"

namespace oqrw::linalg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

struct Tolerance {
  double abs_eps = 1e-10;
  double rel_eps = 1e-8;

  // Comparison bound for a quantity of the given scale.
  double bound(double scale) const { return abs_eps + rel_eps * std::abs(scale); }
};

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

inline Matrix zeros(Eigen::Index n) { return Matrix::Zero(n, n); }

// |i><j| as a dim x dim matrix (0-based indices).
inline Matrix ketbra(Eigen::Index i, Eigen::Index j, Eigen::Index dim) {
  if (i < 0 || j < 0 || i >= dim || j >= dim) {
    throw IndexError("ketbra: index out of range");
  }
  Matrix m = Matrix::Zero(dim, dim);
  m(i, j) = 1.0;
  return m;
}

inline Matrix dagger(const Matrix& a) { return a.adjoint(); }

inline double frobenius_norm(const Matrix& a) { return a.norm(); }

inline bool all_finite(const Matrix& a) {
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (!std::isfinite(a(r, c).real()) || !std::isfinite(a(r, c).imag())) return false;
    }
  }
  return true;
}

// Kronecker product, left factor major.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  const Eigen::Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  Matrix out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i) {
    for (Eigen::Index j = 0; j < ac; ++j) {
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
    }
  }
  return out;
}

// Trace over the right tensor factor: from d_left*d_right down to d_left.
inline Matrix partial_trace_right(const Matrix& m, Eigen::Index d_left, Eigen::Index d_right) {
  if (m.rows() != m.cols() || m.rows() != d_left * d_right) {
    throw DimensionError("partial_trace_right: dimension mismatch");
  }
  Matrix out = Matrix::Zero(d_left, d_left);
  for (Eigen::Index a = 0; a < d_left; ++a) {
    for (Eigen::Index c = 0; c < d_left; ++c) {
      Complex s = 0.0;
      for (Eigen::Index r = 0; r < d_right; ++r) {
        s += m(a * d_right + r, c * d_right + r);
      }
      out(a, c) = s;
    }
  }
  return out;
}

inline bool is_square(const Matrix& a) { return a.rows() == a.cols(); }

inline bool is_hermitian(const Matrix& a, const Tolerance& tol = {}) {
  if (!is_square(a) || !all_finite(a)) return false;
  return (a - a.adjoint()).norm() <= tol.bound(a.norm());
}

// Real spectrum of a Hermitian matrix, descending.
inline std::vector<double> hermitian_eigenvalues(const Matrix& a, const Tolerance& tol = {}) {
  if (!is_hermitian(a, tol)) {
    throw NotHermitianError("hermitian_eigenvalues: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es((a + a.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
  std::sort(ev.begin(), ev.end(), std::greater<double>());
  return ev;
}

// Hermitian PSD square root. Eigenvalues in [-abs_eps, 0) are clamped to 0;
// anything below -abs_eps raises NotPositive.
inline Matrix psd_sqrt(const Matrix& rho, const Tolerance& tol = {}) {
  if (!is_square(rho) || !all_finite(rho)) {
    throw DimensionError("psd_sqrt: malformed input");
  }
  if ((rho - rho.adjoint()).norm() > tol.bound(rho.norm())) {
    throw NotHermitianError("psd_sqrt: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es((rho + rho.adjoint()) / 2.0);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol.abs_eps) {
      throw NotPositiveError("psd_sqrt: eigenvalue " + std::to_string(ev(i)) + " below -abs_eps");
    }
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  Matrix s = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  return (s + s.adjoint()) / 2.0;
}

inline bool is_psd(const Matrix& a, const Tolerance& tol = {}) {
  if (!is_hermitian(a, tol)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es((a + a.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol.abs_eps;
}

inline bool is_projection(const Matrix& a, const Tolerance& tol = {}) {
  if (!is_hermitian(a, tol)) return false;
  return (a * a - a).norm() <= tol.bound(a.norm());
}

inline bool is_identity(const Matrix& a, const Tolerance& tol = {}) {
  if (!is_square(a) || !all_finite(a)) return false;
  return (a - Matrix::Identity(a.rows(), a.cols())).norm() <= tol.abs_eps;
}

}  // namespace oqrw::linalg

namespace oqrw {
using linalg::Complex;
using linalg::Matrix;
using linalg::Tolerance;
}  // namespace oqrw
