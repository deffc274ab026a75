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

// Open quantum random walk data and the induced channel on H (x) K.
//
// A walk on a finite site set Lambda assigns to every ordered pair (i, j)
// an effect B[i][j] on the internal space H (the hop j -> i), subject to
// the column normalization sum_i B[i][j]^* B[i][j] = 1 for every j, plus
// nonzero PSD initial blocks rho_i with sum_i Tr(rho_i) = 1.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oqrw/errors.hpp"
#include "oqrw/linalg.hpp"

namespace oqrw::model {

using linalg::Complex;
using linalg::Matrix;
using linalg::Tolerance;

struct OqrwModel {
  int lambda_size = 0;  // |Lambda|; sites are 0-based internally
  int dim_h = 0;        // dim H
  int k = 2;            // branching order of the tree the chain lives on
  std::vector<std::vector<Matrix>> B;  // B[i][j]: hop j -> i
  std::vector<Matrix> rho;             // initial blocks rho_i

  int dim_total() const { return dim_h * lambda_size; }

  const Matrix& b(int i, int j) const {
    if (i < 0 || j < 0 || i >= lambda_size || j >= lambda_size) {
      throw IndexError("site index out of range");
    }
    return B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
};

struct Violation {
  std::string code;
  std::string message;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  std::string summary() const {
    std::ostringstream os;
    for (const auto& v : violations) os << v.code << ": " << v.message << "\n";
    return os.str();
  }
};

inline ValidationReport validate(const OqrwModel& m, const Tolerance& tol = {}) {
  ValidationReport rep;
  auto add = [&rep](const std::string& code, const std::string& msg, double res = 0.0) {
    rep.violations.push_back({code, msg, res});
  };

  if (m.lambda_size < 1) add("bad_shape", "lambda_size must be >= 1");
  if (m.dim_h < 1) add("bad_shape", "dim_h must be >= 1");
  if (m.k < 1) add("bad_shape", "tree order k must be >= 1");
  if (!rep.ok()) return rep;

  const std::size_t L = static_cast<std::size_t>(m.lambda_size);
  if (m.B.size() != L) {
    add("bad_shape", "B must have lambda_size rows");
    return rep;
  }
  for (std::size_t i = 0; i < L; ++i) {
    if (m.B[i].size() != L) {
      add("bad_shape", "B row " + std::to_string(i + 1) + " must have lambda_size entries");
      return rep;
    }
    for (std::size_t j = 0; j < L; ++j) {
      const Matrix& b = m.B[i][j];
      if (b.rows() != m.dim_h || b.cols() != m.dim_h) {
        add("bad_shape", "B[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "] has wrong dimension");
        return rep;
      }
      if (!linalg::all_finite(b)) {
        add("not_finite", "B[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "] has non-finite entries");
        return rep;
      }
    }
  }
  if (m.rho.size() != L) {
    add("bad_shape", "rho must have lambda_size blocks");
    return rep;
  }
  for (std::size_t i = 0; i < L; ++i) {
    if (m.rho[i].rows() != m.dim_h || m.rho[i].cols() != m.dim_h) {
      add("bad_shape", "rho[" + std::to_string(i + 1) + "] has wrong dimension");
      return rep;
    }
    if (!linalg::all_finite(m.rho[i])) {
      add("not_finite", "rho[" + std::to_string(i + 1) + "] has non-finite entries");
      return rep;
    }
  }

  // Column normalization: sum_i B[i][j]^* B[i][j] = 1 for each source j.
  const double norm_scale = std::sqrt(static_cast<double>(m.dim_h));
  for (std::size_t j = 0; j < L; ++j) {
    Matrix s = Matrix::Zero(m.dim_h, m.dim_h);
    for (std::size_t i = 0; i < L; ++i) s += m.B[i][j].adjoint() * m.B[i][j];
    double res = (s - linalg::identity(m.dim_h)).norm();
    if (res > tol.bound(norm_scale)) {
      add("column_sum", "effects leaving site j=" + std::to_string(j + 1) + " do not sum to identity", res);
    }
  }

  // Initial blocks: Hermitian PSD, nonzero, total trace 1.
  double trace_sum = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    const Matrix& r = m.rho[i];
    if (!linalg::is_hermitian(r, tol)) {
      add("rho_not_hermitian", "rho[" + std::to_string(i + 1) + "] is not Hermitian",
          (r - r.adjoint()).norm());
      continue;
    }
    if (!linalg::is_psd(r, tol)) {
      add("rho_not_psd", "rho[" + std::to_string(i + 1) + "] is not positive semidefinite");
      continue;
    }
    double tr = r.trace().real();
    trace_sum += tr;
    if (tr <= tol.abs_eps) {
      add("zero_initial_block", "rho[" + std::to_string(i + 1) + "] is (numerically) zero", tr);
    }
  }
  if (std::abs(trace_sum - 1.0) > tol.bound(1.0)) {
    add("trace_sum", "sum of Tr(rho_i) is " + std::to_string(trace_sum) + ", expected 1",
        std::abs(trace_sum - 1.0));
  }
  return rep;
}

inline void require_valid(const OqrwModel& m, const Tolerance& tol = {}) {
  ValidationReport rep = validate(m, tol);
  if (!rep.ok()) throw ValidationError("invalid model:\n" + rep.summary());
}

// M_j^i = B_j^i (x) |i><j| on H (x) K.
inline Matrix m_op(const OqrwModel& m, int i, int j) {
  return linalg::kron(m.b(i, j), linalg::ketbra(i, j, m.lambda_size));
}

// A_j^i = rho_j^{1/2} (x) |i><j| / Tr(rho_j)^{1/2}.
inline Matrix a_op(const OqrwModel& m, int i, int j, const Tolerance& tol = {}) {
  if (i < 0 || j < 0 || i >= m.lambda_size || j >= m.lambda_size) {
    throw IndexError("site index out of range");
  }
  double tr = m.rho[static_cast<std::size_t>(j)].trace().real();
  if (tr <= tol.abs_eps) {
    throw ZeroBlockError("a_op: Tr(rho_j) vanishes for j=" + std::to_string(j + 1));
  }
  Matrix root = linalg::psd_sqrt(m.rho[static_cast<std::size_t>(j)], tol);
  return linalg::kron(root / std::sqrt(tr), linalg::ketbra(i, j, m.lambda_size));
}

// Extracts the dim_h x dim_h site block (i, j) of an operator on H (x) K.
inline Matrix site_block(const Matrix& full, int dim_h, int lambda_size, int i, int j) {
  if (full.rows() != dim_h * lambda_size || full.cols() != full.rows()) {
    throw DimensionError("site_block: dimension mismatch");
  }
  Matrix out(dim_h, dim_h);
  for (int r = 0; r < dim_h; ++r) {
    for (int c = 0; c < dim_h; ++c) {
      out(r, c) = full(r * lambda_size + i, c * lambda_size + j);
    }
  }
  return out;
}

// Assembles sum_i blocks[i] (x) |i><i|.
inline Matrix from_site_blocks(const std::vector<Matrix>& blocks, int lambda_size) {
  const int dim_h = static_cast<int>(blocks.at(0).rows());
  Matrix out = Matrix::Zero(dim_h * lambda_size, dim_h * lambda_size);
  for (int i = 0; i < lambda_size; ++i) {
    out += linalg::kron(blocks[static_cast<std::size_t>(i)], linalg::ketbra(i, i, lambda_size));
  }
  return out;
}

// One step of the walk channel on a site-diagonal density:
// rho = sum_i rho_i (x) |i><i|  ->  sum_i (sum_j B_j^i rho_j B_j^i*) (x) |i><i|.
inline Matrix apply_channel(const OqrwModel& m, const Matrix& rho_full, const Tolerance& tol = {}) {
  const int L = m.lambda_size, d = m.dim_h;
  if (rho_full.rows() != m.dim_total() || rho_full.cols() != m.dim_total()) {
    throw DimensionError("apply_channel: dimension mismatch");
  }
  double off = 0.0;
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      if (i == j) continue;
      off += site_block(rho_full, d, L, i, j).squaredNorm();
    }
  }
  if (std::sqrt(off) > tol.bound(rho_full.norm())) {
    throw NotBlockDiagonalError("apply_channel: off-diagonal site blocks are not negligible");
  }
  std::vector<Matrix> out_blocks(static_cast<std::size_t>(L));
  for (int i = 0; i < L; ++i) {
    Matrix acc = Matrix::Zero(d, d);
    for (int j = 0; j < L; ++j) {
      acc += m.b(i, j) * site_block(rho_full, d, L, j, j) * m.b(i, j).adjoint();
    }
    out_blocks[static_cast<std::size_t>(i)] = acc;
  }
  return from_site_blocks(out_blocks, L);
}

struct Path {
  std::vector<int> sites;  // 0-based site labels, nonempty
};

// P(i_0,...,i_n) = Tr(B^{i_n}_{i_{n-1}} ... B^{i_1}_{i_0} rho_{i_0} B^* ... B^*).
// Tiny negative round-off is clamped to 0.
inline double path_probability(const OqrwModel& m, const Path& path) {
  if (path.sites.empty()) throw ValidationError("path must be nonempty");
  for (int s : path.sites) {
    if (s < 0 || s >= m.lambda_size) throw IndexError("path site out of range");
  }
  Matrix x = m.rho[static_cast<std::size_t>(path.sites[0])];
  for (std::size_t t = 0; t + 1 < path.sites.size(); ++t) {
    const Matrix& b = m.b(path.sites[t + 1], path.sites[t]);
    x = b * x * b.adjoint();
  }
  return std::max(x.trace().real(), 0.0);
}

// Chain-rule sampler for the same distribution: i_0 ~ Tr(rho_i), then
// i_{t+1} ~ Tr(B^{i}_{i_t} sigma_t B^{i*}_{i_t}) with sigma conditioned and
// renormalized. Deterministic for a fixed seed.
inline Path sample_path(const OqrwModel& m, int length, std::uint64_t seed) {
  if (length < 1) throw ValidationError("path length must be >= 1");
  std::mt19937_64 rng(seed);
  // uniform in [0,1) built from the top 53 bits; keeps the draw sequence
  // independent of the standard library's distribution implementations
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto pick = [&uniform](const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      acc += w[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(w.size()) - 1;
  };

  const std::size_t L = static_cast<std::size_t>(m.lambda_size);
  std::vector<double> w(L);
  for (std::size_t i = 0; i < L; ++i) w[i] = std::max(m.rho[i].trace().real(), 0.0);
  Path p;
  p.sites.push_back(pick(w));
  Matrix sigma = m.rho[static_cast<std::size_t>(p.sites[0])];
  sigma /= sigma.trace().real();
  for (int t = 1; t < length; ++t) {
    int cur = p.sites.back();
    std::vector<Matrix> cond(L);
    for (std::size_t i = 0; i < L; ++i) {
      cond[i] = m.b(static_cast<int>(i), cur) * sigma * m.b(static_cast<int>(i), cur).adjoint();
      w[i] = std::max(cond[i].trace().real(), 0.0);
    }
    int nxt = pick(w);
    p.sites.push_back(nxt);
    sigma = cond[static_cast<std::size_t>(nxt)] / w[static_cast<std::size_t>(nxt)];
  }
  return p;
}

// The two-site walk family used throughout the tests and the CLI builtin:
//   B[1][1] = diag(a, b),  B[1][2] = [[0,1],[0,0]],
//   B[2][1] = diag(c, d),  B[2][2] = [[1,0],[0,0]]   (1-based site labels)
// with |a|^2 + |c|^2 = |b|^2 + |d|^2 = 1.
inline OqrwModel two_state_model(Complex a, Complex b, Complex c, Complex d, int k = 2,
                                 std::optional<Matrix> rho1 = std::nullopt,
                                 std::optional<Matrix> rho2 = std::nullopt) {
  OqrwModel m;
  m.lambda_size = 2;
  m.dim_h = 2;
  m.k = k;
  m.B.assign(2, std::vector<Matrix>(2, Matrix::Zero(2, 2)));
  m.B[0][0] << a, 0, 0, b;
  m.B[0][1] << 0, 1, 0, 0;
  m.B[1][0] << c, 0, 0, d;
  m.B[1][1] << 1, 0, 0, 0;
  Matrix e11 = linalg::ketbra(0, 0, 2);
  m.rho = {rho1.value_or(e11 / 2.0), rho2.value_or(e11 / 2.0)};
  return m;
}

struct TwoStateParams {
  Complex a, b, c, d;
};

// Recognizes the family above with rho_1 = rho_2 = |1><1| (up to a common
// positive normalization of the two blocks).
inline std::optional<TwoStateParams> canonical_two_state_params(const OqrwModel& m,
                                                                const Tolerance& tol = {}) {
  if (m.lambda_size != 2 || m.dim_h != 2) return std::nullopt;
  Matrix e11 = linalg::ketbra(0, 0, 2);
  for (int i = 0; i < 2; ++i) {
    double tr = m.rho[static_cast<std::size_t>(i)].trace().real();
    if (tr <= tol.abs_eps) return std::nullopt;
    if ((m.rho[static_cast<std::size_t>(i)] / tr - e11).norm() > tol.bound(1.0)) return std::nullopt;
  }
  Matrix hop21(2, 2), hop22(2, 2);
  hop21 << 0, 1, 0, 0;
  hop22 << 1, 0, 0, 0;
  if ((m.B[0][1] - hop21).norm() > tol.bound(1.0)) return std::nullopt;
  if ((m.B[1][1] - hop22).norm() > tol.bound(1.0)) return std::nullopt;
  auto diagonal = [&tol](const Matrix& x) {
    return std::abs(x(0, 1)) <= tol.bound(1.0) && std::abs(x(1, 0)) <= tol.bound(1.0);
  };
  if (!diagonal(m.B[0][0]) || !diagonal(m.B[1][0])) return std::nullopt;
  return TwoStateParams{m.B[0][0](0, 0), m.B[0][0](1, 1), m.B[1][0](0, 0), m.B[1][0](1, 1)};
}

}  // namespace oqrw::model
