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

// Shared test fixtures: random matrices and random valid walk models.

#pragma once

#include <cmath>
#include <random>

#include <Eigen/QR>

#include "oqrw/oqrw.hpp"

namespace test_support {

using oqrw::Complex;
using oqrw::Matrix;

inline Matrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m(r, c) = Complex(g(rng), g(rng));
  }
  return m;
}

inline Matrix random_hermitian(int n, std::mt19937_64& rng) {
  Matrix a = random_matrix(n, rng);
  return (a + a.adjoint()) / 2.0;
}

inline Matrix random_psd(int n, std::mt19937_64& rng) {
  Matrix a = random_matrix(n, rng);
  return a * a.adjoint();
}

inline Matrix random_density(int n, std::mt19937_64& rng) {
  Matrix p = random_psd(n, rng);
  return p / p.trace().real();
}

// Thin column-orthonormal (rows x cols) factor of a complex Gaussian matrix.
inline Matrix random_isometry(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) a(r, c) = Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

// Random valid walk: per source site the stacked effects form an isometry,
// which gives the column normalization exactly; rho blocks are random PSD
// with total trace 1.
inline oqrw::model::OqrwModel random_model(int lambda, int dim_h, int k, std::mt19937_64& rng) {
  oqrw::model::OqrwModel m;
  m.lambda_size = lambda;
  m.dim_h = dim_h;
  m.k = k;
  m.B.assign(static_cast<std::size_t>(lambda), std::vector<Matrix>());
  for (auto& row : m.B) row.assign(static_cast<std::size_t>(lambda), Matrix());
  for (int j = 0; j < lambda; ++j) {
    Matrix v = random_isometry(lambda * dim_h, dim_h, rng);
    for (int i = 0; i < lambda; ++i) {
      m.B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          v.block(i * dim_h, 0, dim_h, dim_h);
    }
  }
  double total = 0.0;
  for (int i = 0; i < lambda; ++i) {
    m.rho.push_back(random_psd(dim_h, rng));
    total += m.rho.back().trace().real();
  }
  for (auto& r : m.rho) r /= total;
  return m;
}

// Random member of the two-site family: random moduli and phases subject to
// |a|^2 + |c|^2 = |b|^2 + |d|^2 = 1.
inline oqrw::model::OqrwModel random_two_state(std::mt19937_64& rng, int k = 2,
                                               bool random_rho = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double theta = u(rng) * M_PI / 2.0, eta = u(rng) * M_PI / 2.0;
  auto ph = [&]() { return std::polar(1.0, u(rng) * 2.0 * M_PI); };
  Complex a = std::cos(theta) * ph(), c = std::sin(theta) * ph();
  Complex b = std::cos(eta) * ph(), d = std::sin(eta) * ph();
  if (!random_rho) return oqrw::model::two_state_model(a, b, c, d, k);
  Matrix r1 = random_psd(2, rng), r2 = random_psd(2, rng);
  double total = r1.trace().real() + r2.trace().real();
  return oqrw::model::two_state_model(a, b, c, d, k, r1 / total, r2 / total);
}

}  // namespace test_support
