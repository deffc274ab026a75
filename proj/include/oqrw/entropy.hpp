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

// Von Neumann entropy of finite-ball restrictions and its per-site limit.
//
// States with a single-site boundary are products of one root density and
// one site density per interior vertex, so the ball-n entropy is
//   S_n = S(root) + (|ball(n)| - 1) * S(site)
// and S_n / |ball(n)| converges to S(site). Natural logarithm throughout.

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "oqrw/errors.hpp"
#include "oqrw/linalg.hpp"
#include "oqrw/qmc.hpp"
#include "oqrw/tree.hpp"

namespace oqrw::entropy {

using linalg::Matrix;
using linalg::Tolerance;
using qmc::QmcState;

// -sum lambda_i log(lambda_i) over eigenvalues above abs_eps (0 log 0 = 0).
inline double von_neumann_entropy(const Matrix& rho, const Tolerance& tol = {}) {
  if (!linalg::is_psd(rho, tol)) {
    throw NotDensityError("von_neumann_entropy: input is not PSD Hermitian");
  }
  if (std::abs(rho.trace().real() - 1.0) > tol.bound(1.0)) {
    throw NotDensityError("von_neumann_entropy: trace differs from 1");
  }
  double s = 0.0;
  for (double ev : linalg::hermitian_eigenvalues(rho, tol)) {
    if (ev > tol.abs_eps) s -= ev * std::log(ev);
  }
  return std::max(s, 0.0);
}

// Density of the per-site marginal psi_jj:
//   D = sum_i B_j^i rho_j B_j^{i*} (x) |i><i| / Tr(rho_j).
// Defined for states whose boundary selects a single site.
inline Matrix site_density(const QmcState& s, int j, const Tolerance& tol = {}) {
  const auto& m = s.model;
  if (j < 0 || j >= m.lambda_size) throw IndexError("site_density: site label out of range");
  if (!qmc::single_site_form(m, s.boundary.h, tol)) {
    throw UnsupportedBoundaryError("site_density: boundary does not have single-site product form");
  }
  Matrix rho = m.rho[static_cast<std::size_t>(j)] / m.rho[static_cast<std::size_t>(j)].trace().real();
  return qmc::m_jjprime(m, j, j, linalg::kron(rho, linalg::ketbra(j, j, m.lambda_size)));
}

struct EntropyReport {
  int site = 0;                // the single site the boundary selects (0-based)
  double site_entropy = 0.0;   // S(psi_jj) = the mean entropy
  double root_entropy = 0.0;   // S(M_jj(omega))
  std::vector<std::pair<int, double>> finite_values;  // (n, S_n / |ball(n)|)
  double mean_entropy = 0.0;
};

inline EntropyReport mean_entropy(const QmcState& s, int n_max, const Tolerance& tol = {}) {
  if (n_max < 0) throw ValidationError("mean_entropy: n_max must be >= 0");
  const auto& m = s.model;
  auto j0 = qmc::single_site_form(m, s.boundary.h, tol);
  if (!j0) {
    throw UnsupportedBoundaryError("mean_entropy: boundary does not have single-site product form");
  }
  EntropyReport rep;
  rep.site = *j0;
  rep.site_entropy = von_neumann_entropy(site_density(s, *j0, tol), tol);
  rep.root_entropy = von_neumann_entropy(qmc::m_jjprime(m, *j0, *j0, s.omega), tol);
  rep.finite_values.reserve(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    double ball = static_cast<double>(tree::ball_size(n, m.k));
    double sn = rep.root_entropy + (ball - 1.0) * rep.site_entropy;
    rep.finite_values.emplace_back(n, sn / ball);
  }
  rep.mean_entropy = rep.site_entropy;
  return rep;
}

}  // namespace oqrw::entropy
