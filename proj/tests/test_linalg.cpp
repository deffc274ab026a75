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

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "oqrw/linalg.hpp"

using namespace oqrw;
using namespace oqrw::linalg;
using test_support::random_density;
using test_support::random_hermitian;
using test_support::random_matrix;
using test_support::random_psd;

namespace {

// Entry-by-entry Kronecker product, independent of the library routine.
Matrix kron_oracle(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index r = 0; r < b.rows(); ++r)
        for (Eigen::Index s = 0; s < b.cols(); ++s)
          out(i * b.rows() + r, j * b.cols() + s) = a(i, j) * b(r, s);
  return out;
}

// Index-sum partial trace, independent of the library routine.
Matrix ptrace_oracle(const Matrix& m, int dl, int dr) {
  Matrix out = Matrix::Zero(dl, dl);
  for (int a = 0; a < dl; ++a)
    for (int c = 0; c < dl; ++c)
      for (int r = 0; r < dr; ++r) out(a, c) += m(a * dr + r, c * dr + r);
  return out;
}

}  // namespace

TEST_CASE("kron basics") {
  CHECK((kron(identity(2), identity(2)) - identity(4)).norm() == 0.0);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = Complex(2.0, 0.0);
  d(1, 1) = Complex(3.0, 0.0);
  Matrix k = kron(d, ketbra(0, 0, 2));
  CHECK(k(0, 0) == Complex(2.0, 0.0));
  CHECK(k(2, 2) == Complex(3.0, 0.0));
  CHECK(k.cwiseAbs().sum() == 5.0);
}

TEST_CASE("kron matches the entry-by-entry definition") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix a = random_matrix(2, rng), b = random_matrix(3, rng);
    CHECK((kron(a, b) - kron_oracle(a, b)).norm() < 1e-14);
    CHECK(std::abs(kron(a, b).trace() - a.trace() * b.trace()) < 1e-12);
  }
}

TEST_CASE("kron is bilinear") {
  std::mt19937_64 rng(12);
  Matrix a = random_matrix(2, rng), a2 = random_matrix(2, rng), b = random_matrix(2, rng);
  Complex s(0.7, -0.3);
  CHECK((kron(a + s * a2, b) - (kron(a, b) + s * kron(a2, b))).norm() < 1e-13);
  CHECK((kron(b, a + s * a2) - (kron(b, a) + s * kron(b, a2))).norm() < 1e-13);
}

TEST_CASE("partial_trace_right on product operators") {
  std::mt19937_64 rng(13);
  Matrix a = random_matrix(3, rng), b = random_matrix(2, rng);
  Matrix t = partial_trace_right(kron(a, b), 3, 2);
  CHECK((t - b.trace() * a).norm() < 1e-13);

  CHECK((partial_trace_right(identity(8), 2, 4) - 4.0 * identity(2)).norm() == 0.0);
}

TEST_CASE("partial_trace_right is the index sum and preserves trace") {
  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix h = random_hermitian(8, rng);
    Matrix t = partial_trace_right(h, 2, 4);
    CHECK((t - ptrace_oracle(h, 2, 4)).norm() < 1e-14);
    CHECK((t - t.adjoint()).norm() < 1e-13);
    CHECK(std::abs(t.trace() - h.trace()) < 1e-12);
  }
  CHECK_THROWS_AS(partial_trace_right(identity(6), 2, 4), DimensionError);
}

TEST_CASE("partial_trace_right composed with kron acts as Tr(B) on a basis") {
  std::mt19937_64 rng(15);
  Matrix b = random_matrix(2, rng);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Matrix e = ketbra(i, j, 3);
      CHECK((partial_trace_right(kron(e, b), 3, 2) - b.trace() * e).norm() < 1e-14);
    }
  }
}

TEST_CASE("psd_sqrt on simple inputs") {
  CHECK((psd_sqrt(ketbra(0, 0, 2)) - ketbra(0, 0, 2)).norm() < 1e-14);
  CHECK((psd_sqrt(4.0 * identity(2)) - 2.0 * identity(2)).norm() < 1e-14);
}

TEST_CASE("psd_sqrt squares back on random PSD inputs") {
  std::mt19937_64 rng(16);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix rho = random_psd(4, rng);
    Matrix s = psd_sqrt(rho);
    CHECK(is_psd(s));
    CHECK((s * s - rho).norm() < 1e-10 * rho.norm());
  }
}

TEST_CASE("psd_sqrt rejects bad inputs") {
  CHECK_THROWS_AS(psd_sqrt(-identity(2)), NotPositiveError);
  std::mt19937_64 rng(17);
  Matrix nh = random_matrix(3, rng);
  nh(0, 1) += Complex(0.0, 1.0);  // make sure it is far from Hermitian
  CHECK_THROWS_AS(psd_sqrt(nh), NotHermitianError);

  // tiny negative eigenvalues are clamped, not rejected
  Matrix nearly = ketbra(0, 0, 2) * 1.0;
  nearly(1, 1) = Complex(-1e-12, 0.0);
  Matrix s = psd_sqrt(nearly);
  CHECK(is_psd(s));
}

TEST_CASE("hermitian_eigenvalues basics") {
  auto ev = hermitian_eigenvalues(identity(4));
  CHECK(ev == std::vector<double>{1.0, 1.0, 1.0, 1.0});

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.36;
  d(1, 1) = 0.64;
  auto ev2 = hermitian_eigenvalues(d);
  CHECK(ev2[0] == Catch::Approx(0.64));
  CHECK(ev2[1] == Catch::Approx(0.36));

  std::mt19937_64 rng(18);
  CHECK_THROWS_AS(hermitian_eigenvalues(random_matrix(3, rng)), NotHermitianError);
}

TEST_CASE("hermitian_eigenvalues annihilate the characteristic polynomial") {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix a = random_hermitian(4, rng);
    for (double ev : hermitian_eigenvalues(a)) {
      CHECK(std::abs((a - ev * identity(4)).determinant()) < 1e-8 * std::pow(a.norm() + 1.0, 3));
    }
  }
}

TEST_CASE("eigenvalues of a density matrix") {
  std::mt19937_64 rng(20);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix rho = random_density(4, rng);
    auto ev = hermitian_eigenvalues(rho);
    double sum = 0.0;
    for (double v : ev) {
      CHECK(v >= -1e-10);
      CHECK(v <= 1.0 + 1e-10);
      sum += v;
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("structural predicates") {
  CHECK(is_psd(identity(3)));
  CHECK_FALSE(is_psd(-identity(3)));
  CHECK(is_projection(ketbra(1, 1, 3)));
  CHECK_FALSE(is_projection(2.0 * ketbra(1, 1, 3)));
  CHECK(is_identity(identity(5)));
  CHECK_FALSE(is_identity(identity(5) * 1.001));

  Matrix inf = identity(2);
  inf(0, 0) = Complex(std::numeric_limits<double>::infinity(), 0.0);
  CHECK_FALSE(is_psd(inf));
  CHECK_FALSE(is_identity(inf));
}
