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

// Quantum Markov chains on the rooted Cayley tree driven by an open quantum
// random walk.
//
// The per-vertex transition expectation is
//   E_u(a_0 (x) a_1 (x) ... (x) a_k)
//     = sum_{i,j,j'} (prod_l phi_{jj'}(a_l)) M_j^{i*} a_0 M_{j'}^{i}
// with the pairing functionals
//   phi_{jj'}(b) = Tr(rho_{j'}^{1/2} rho_j^{1/2} (x) |j'><j| b) / sqrt(Tr rho_j Tr rho_{j'})
//   psi_{jj'}(b) = sum_i Tr(B_{j'}^i rho_{j'}^{1/2} rho_j^{1/2} B_j^{i*} (x) |i><i| b)
//                  / sqrt(Tr rho_j Tr rho_{j'}).
// phi_{jj'} is exactly Tr(A_{j'}^{i*} A_j^i b) for any matching upper index,
// which is the contraction the Kraus-form oracle produces.
//
// A translation-invariant boundary condition is a nonzero PSD h with
//   h = sum_{i,j,j'} M_j^{i*} M_{j'}^{i} phi_{jj'}(h)^k.
// Every solution has site blocks h_{jj'} = t^k G_{jj'} with
// G_{jj'} = sum_i B_j^{i*} B_{j'}^i and scalar fixed points t = alpha_{jj'} t^k,
// which is what the solver enumerates.
//
// A state (omega, h) evaluates finitely-supported product observables via
//   phi(a) = sum_{j,j'} Tr(M_{jj'}(omega) a_o)
//            * prod_{u in ball, level >= 1} psi_{jj'}(a_u)
//            * phi_{jj'}(h)^(k^(n+1)),
// the boundary factor entering once per vertex of level n+1.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oqrw/errors.hpp"
#include "oqrw/linalg.hpp"
#include "oqrw/model.hpp"
#include "oqrw/tree.hpp"

namespace oqrw::qmc {

using linalg::Complex;
using linalg::Matrix;
using linalg::Tolerance;
using model::OqrwModel;

// z^e for nonnegative real exponents, with 0^e = 0 for e > 0.
inline Complex cpow(Complex base, double exponent) {
  if (exponent == 0.0) return Complex(1.0, 0.0);
  if (std::abs(base) == 0.0) return Complex(0.0, 0.0);
  Complex w = exponent * std::log(base);
  if (w.real() < -700.0) return Complex(0.0, 0.0);
  if (w.real() > 700.0) throw Error(ErrorKind::Numerical, "cpow: result overflows");
  return std::exp(w);
}

// G_{jj'} = sum_i B_j^{i*} B_{j'}^i on H. G_{jj} is the identity for every
// valid model (column normalization).
inline Matrix hop_gram(const OqrwModel& m, int j, int jp) {
  Matrix g = Matrix::Zero(m.dim_h, m.dim_h);
  for (int i = 0; i < m.lambda_size; ++i) g += m.b(i, j).adjoint() * m.b(i, jp);
  return g;
}

// Precomputed phi/psi kernels for every site pair.
class Functionals {
 public:
  explicit Functionals(const OqrwModel& m, const Tolerance& tol = {}) : dim_(m.dim_total()) {
    const int L = m.lambda_size;
    std::vector<Matrix> root(static_cast<std::size_t>(L));
    std::vector<double> tr(static_cast<std::size_t>(L));
    for (int j = 0; j < L; ++j) {
      tr[static_cast<std::size_t>(j)] = m.rho[static_cast<std::size_t>(j)].trace().real();
      if (tr[static_cast<std::size_t>(j)] <= tol.abs_eps) {
        throw ZeroBlockError("functionals: Tr(rho_j) vanishes for j=" + std::to_string(j + 1));
      }
      root[static_cast<std::size_t>(j)] = linalg::psd_sqrt(m.rho[static_cast<std::size_t>(j)], tol);
    }
    phi_.assign(static_cast<std::size_t>(L * L), Matrix());
    psi_.assign(static_cast<std::size_t>(L * L), Matrix());
    for (int j = 0; j < L; ++j) {
      for (int jp = 0; jp < L; ++jp) {
        double norm = std::sqrt(tr[static_cast<std::size_t>(j)] * tr[static_cast<std::size_t>(jp)]);
        Matrix mixed = root[static_cast<std::size_t>(jp)] * root[static_cast<std::size_t>(j)];
        phi_[idx(j, jp, L)] = linalg::kron(mixed, linalg::ketbra(jp, j, L)) / norm;
        Matrix psi = Matrix::Zero(dim_, dim_);
        for (int i = 0; i < L; ++i) {
          psi += linalg::kron(m.b(i, jp) * mixed * m.b(i, j).adjoint(), linalg::ketbra(i, i, L));
        }
        psi_[idx(j, jp, L)] = psi / norm;
      }
    }
    lambda_ = L;
  }

  Complex phi(int j, int jp, const Matrix& b) const { return pair_trace(phi_[idx(j, jp, lambda_)], b); }
  Complex psi(int j, int jp, const Matrix& b) const { return pair_trace(psi_[idx(j, jp, lambda_)], b); }
  Complex psi_identity(int j, int jp) const { return psi_[idx(j, jp, lambda_)].trace(); }
  int dim() const { return dim_; }
  int lambda() const { return lambda_; }

 private:
  static std::size_t idx(int j, int jp, int L) {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(L) + static_cast<std::size_t>(jp);
  }

  Complex pair_trace(const Matrix& kernel, const Matrix& b) const {
    if (b.rows() != dim_ || b.cols() != dim_) {
      throw DimensionError("functional argument has wrong dimension");
    }
    return kernel.transpose().cwiseProduct(b).sum();  // Tr(kernel * b)
  }

  int dim_ = 0;
  int lambda_ = 0;
  std::vector<Matrix> phi_, psi_;
};

inline Complex phi_jjprime(const OqrwModel& m, int j, int jp, const Matrix& b,
                           const Tolerance& tol = {}) {
  return Functionals(m, tol).phi(j, jp, b);
}

inline Complex psi_jjprime(const OqrwModel& m, int j, int jp, const Matrix& b,
                           const Tolerance& tol = {}) {
  return Functionals(m, tol).psi(j, jp, b);
}

// M_{jj'}(w) = sum_i M_{j'}^i w M_j^{i*}. For site-block w this equals
// sum_i B_{j'}^i w_{j'j} B_j^{i*} (x) |i><i|, so Tr(M_{jj}(w)) = Tr(w_{jj}).
inline Matrix m_jjprime(const OqrwModel& m, int j, int jp, const Matrix& w) {
  if (w.rows() != m.dim_total() || w.cols() != m.dim_total()) {
    throw DimensionError("m_jjprime: dimension mismatch");
  }
  Matrix out = Matrix::Zero(m.dim_total(), m.dim_total());
  for (int i = 0; i < m.lambda_size; ++i) {
    out += model::m_op(m, i, jp) * w * model::m_op(m, i, j).adjoint();
  }
  return out;
}

// Closed form of the transition expectation on a product input
// a_0 (x) a_1 (x) ... (x) a_k (one factor for the vertex, k for its successors).
inline Matrix transition_expectation(const OqrwModel& m, const std::vector<Matrix>& factors,
                                     const Tolerance& tol = {}) {
  if (static_cast<int>(factors.size()) != m.k + 1) {
    throw DimensionError("transition_expectation: expected k+1 factors");
  }
  const int d = m.dim_total();
  for (const Matrix& f : factors) {
    if (f.rows() != d || f.cols() != d) throw DimensionError("factor has wrong dimension");
  }
  Functionals fun(m, tol);
  Matrix out = Matrix::Zero(d, d);
  for (int j = 0; j < m.lambda_size; ++j) {
    for (int jp = 0; jp < m.lambda_size; ++jp) {
      Complex weight(1.0, 0.0);
      for (int l = 1; l <= m.k; ++l) weight *= fun.phi(j, jp, factors[static_cast<std::size_t>(l)]);
      if (weight == Complex(0.0, 0.0)) continue;
      Matrix s = Matrix::Zero(d, d);
      for (int i = 0; i < m.lambda_size; ++i) {
        s += model::m_op(m, i, j).adjoint() * factors[0] * model::m_op(m, i, jp);
      }
      out += weight * s;
    }
  }
  return out;
}

namespace detail {
inline long long pow_ll(int base, int exp, long long cap) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) {
    r *= base;
    if (r > cap) return cap + 1;
  }
  return r;
}
}  // namespace detail

// Kraus-form evaluation of the transition expectation on an arbitrary
// operator a over the vertex and its k successors: builds
// K_j^i = M_j^{i*} (x) A_j^i (x) ... (x) A_j^i explicitly and traces out the
// successor factors. Only feasible for (dim H * |Lambda|)^(k+1) <= 64.
inline Matrix oracle_transition_expectation(const OqrwModel& m, const Matrix& a,
                                            const Tolerance& tol = {}) {
  const int d = m.dim_total();
  const long long big = detail::pow_ll(d, m.k + 1, 64);
  if (big > 64) {
    throw DimensionTooLargeError("oracle_transition_expectation: (dim_h*|Lambda|)^(k+1) exceeds 64");
  }
  if (a.rows() != big || a.cols() != big) {
    throw DimensionError("oracle_transition_expectation: input must act on (H(x)K)^(k+1)");
  }
  const long long d_succ = big / d;
  std::vector<Matrix> kraus;
  kraus.reserve(static_cast<std::size_t>(m.lambda_size * m.lambda_size));
  for (int i = 0; i < m.lambda_size; ++i) {
    for (int j = 0; j < m.lambda_size; ++j) {
      Matrix kj = model::m_op(m, i, j).adjoint();
      Matrix aij = model::a_op(m, i, j, tol);
      for (int l = 0; l < m.k; ++l) kj = linalg::kron(kj, aij);
      kraus.push_back(std::move(kj));
    }
  }
  Matrix out = Matrix::Zero(d, d);
  for (const Matrix& k1 : kraus) {
    for (const Matrix& k2 : kraus) {
      out += linalg::partial_trace_right(k1 * a * k2.adjoint(), d, d_succ);
    }
  }
  return out;
}

// Frobenius distance between h and its image under one compatibility step;
// zero exactly on translation-invariant boundary conditions.
inline double boundary_residual(const OqrwModel& m, const Matrix& h, const Tolerance& tol = {}) {
  const int d = m.dim_total();
  if (h.rows() != d || h.cols() != d) throw DimensionError("boundary_residual: dimension mismatch");
  Functionals fun(m, tol);
  Matrix image = Matrix::Zero(d, d);
  for (int j = 0; j < m.lambda_size; ++j) {
    for (int jp = 0; jp < m.lambda_size; ++jp) {
      Complex w = cpow(fun.phi(j, jp, h), static_cast<double>(m.k));
      if (w == Complex(0.0, 0.0)) continue;
      for (int i = 0; i < m.lambda_size; ++i) {
        image += w * (model::m_op(m, i, j).adjoint() * model::m_op(m, i, jp));
      }
    }
  }
  return (h - image).norm();
}

struct BoundarySolution {
  Matrix h;
  std::map<std::pair<int, int>, Matrix> blocks;   // h_{jj'} = t^k G_{jj'}
  std::map<std::pair<int, int>, Complex> coeffs;  // the scalars t_{jj'} = phi_{jj'}(h)
  std::string label;
  double residual = 0.0;
};

struct SolveOptions {
  double residual_tol = 1e-9;
  double dedup_tol = 1e-8;
  std::size_t max_combinations = 1u << 20;
};

// When phi_{jj'}(h) = delta_{j j0} delta_{j' j0} for a single site j0 the
// state built on h is a product of psi_{j0 j0} marginals; returns that j0.
inline std::optional<int> single_site_form(const OqrwModel& m, const Matrix& h,
                                           const Tolerance& tol = {}) {
  Functionals fun(m, tol);
  std::optional<int> found;
  for (int j0 = 0; j0 < m.lambda_size; ++j0) {
    bool match = true;
    for (int j = 0; j < m.lambda_size && match; ++j) {
      for (int jp = 0; jp < m.lambda_size && match; ++jp) {
        Complex expect = (j == j0 && jp == j0) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
        if (std::abs(fun.phi(j, jp, h) - expect) > tol.bound(1.0)) match = false;
      }
    }
    if (match) {
      found = j0;
      break;
    }
  }
  return found;
}

// Enumerates all translation-invariant boundary conditions. Per block the
// scalar equation t = alpha t^k has the root 0 plus the k-1 complex roots of
// t^(k-1) = 1/alpha; all block combinations are assembled and filtered down
// to nonzero PSD Hermitian fixed points.
inline std::vector<BoundarySolution> solve_boundary_fixed_points(const OqrwModel& m,
                                                                 const Tolerance& tol = {},
                                                                 const SolveOptions& opts = {}) {
  model::require_valid(m, tol);
  const int L = m.lambda_size;
  const int d = m.dim_total();
  const int k = m.k;
  Functionals fun(m, tol);

  struct Block {
    int j, jp;
    Matrix gram;
    std::vector<Complex> roots;  // candidate t values, always starting with 0
  };
  std::vector<Block> blocks;
  std::vector<double> tr(static_cast<std::size_t>(L));
  std::vector<Matrix> root(static_cast<std::size_t>(L));
  for (int j = 0; j < L; ++j) {
    tr[static_cast<std::size_t>(j)] = m.rho[static_cast<std::size_t>(j)].trace().real();
    root[static_cast<std::size_t>(j)] = linalg::psd_sqrt(m.rho[static_cast<std::size_t>(j)], tol);
  }
  std::size_t combos = 1;
  for (int j = 0; j < L; ++j) {
    for (int jp = 0; jp < L; ++jp) {
      Block blk{j, jp, hop_gram(m, j, jp), {Complex(0.0, 0.0)}};
      Complex alpha = (root[static_cast<std::size_t>(jp)] * root[static_cast<std::size_t>(j)] * blk.gram).trace() /
                      std::sqrt(tr[static_cast<std::size_t>(j)] * tr[static_cast<std::size_t>(jp)]);
      if (std::abs(alpha) > tol.abs_eps && blk.gram.norm() > tol.abs_eps) {
        if (k == 1) {
          // t = alpha t has nonzero solutions only for alpha = 1, and then
          // every t works; the translation-invariant ansatz is degenerate.
          if (std::abs(alpha - 1.0) <= tol.bound(1.0)) blk.roots.push_back(Complex(1.0, 0.0));
        } else {
          Complex inv = 1.0 / alpha;
          double r = std::pow(std::abs(inv), 1.0 / (k - 1));
          double theta = std::arg(inv);
          for (int s = 0; s < k - 1; ++s) {
            double ang = (theta + 2.0 * M_PI * s) / (k - 1);
            blk.roots.push_back(Complex(r * std::cos(ang), r * std::sin(ang)));
          }
        }
      }
      combos *= blk.roots.size();
      if (combos > opts.max_combinations) {
        throw Error(ErrorKind::Numerical,
                    "solve_boundary_fixed_points: root combinations exceed cap of " +
                        std::to_string(opts.max_combinations));
      }
      blocks.push_back(std::move(blk));
    }
  }

  std::vector<BoundarySolution> out;
  std::vector<std::size_t> choice(blocks.size(), 0);
  bool done = false;
  while (!done) {
    Matrix h = Matrix::Zero(d, d);
    std::map<std::pair<int, int>, Complex> coeffs;
    std::map<std::pair<int, int>, Matrix> hblocks;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      const Block& blk = blocks[bi];
      Complex t = blk.roots[choice[bi]];
      Complex tk(1.0, 0.0);
      for (int e = 0; e < k; ++e) tk *= t;
      Matrix hb = tk * blk.gram;
      coeffs[{blk.j, blk.jp}] = t;
      hblocks[{blk.j, blk.jp}] = hb;
      h += linalg::kron(hb, linalg::ketbra(blk.j, blk.jp, L));
    }

    if (h.norm() > tol.abs_eps && linalg::is_hermitian(h, tol) && linalg::is_psd(h, tol)) {
      double res = boundary_residual(m, h, tol);
      if (res <= opts.residual_tol) {
        bool duplicate = false;
        for (const BoundarySolution& s : out) {
          if ((s.h - h).norm() < opts.dedup_tol) {
            duplicate = true;
            break;
          }
        }
        if (!duplicate) {
          out.push_back(BoundarySolution{h, std::move(hblocks), std::move(coeffs), "", res});
        }
      }
    }

    // odometer over the per-block root choices
    done = true;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      if (++choice[bi] < blocks[bi].roots.size()) {
        done = false;
        break;
      }
      choice[bi] = 0;
    }
  }

  // Label the recognizable solutions: identity, the site projections
  // 1 (x) |j><j|, and (for the two-site family) the off-diagonal solution.
  auto label_rank = [&](BoundarySolution& s) -> int {
    const double eps = opts.dedup_tol;
    if ((s.h - linalg::identity(d)).norm() <= eps) {
      s.label = "h_0";
      return 0;
    }
    for (int j = 0; j < L; ++j) {
      Matrix cand = linalg::kron(linalg::identity(m.dim_h), linalg::ketbra(j, j, L));
      if ((s.h - cand).norm() <= eps) {
        s.label = "h_" + std::to_string(j + 1);
        return j + 1;
      }
    }
    if (auto params = model::canonical_two_state_params(m, tol)) {
      if (std::abs(std::abs(params->c) - 1.0) <= tol.bound(1.0)) {
        Matrix hc = linalg::kron(m.B[1][1], m.B[0][1]) / std::conj(params->c) +
                    linalg::kron(m.B[1][1], m.B[0][1].adjoint()) / params->c;
        if ((s.h - (linalg::identity(d) + hc)).norm() <= eps) {
          s.label = "h_3";
          return L + 1;
        }
      }
    }
    return 1000;
  };
  std::vector<std::pair<int, std::size_t>> order;
  for (std::size_t i = 0; i < out.size(); ++i) order.emplace_back(label_rank(out[i]), i);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<BoundarySolution> sorted;
  sorted.reserve(out.size());
  int anon = 0;
  for (auto& [rank, i] : order) {
    if (out[i].label.empty()) out[i].label = "h_sol" + std::to_string(anon++);
    sorted.push_back(std::move(out[i]));
  }
  return sorted;
}

struct QmcState {
  OqrwModel model;
  Matrix omega;  // normalized so Tr(omega h) = 1
  BoundarySolution boundary;
  double rescale = 1.0;  // factor the input omega was divided by
};

// Checks Tr(omega h) = 1, rescaling omega when the trace is positive but not
// one; a vanishing pairing is not normalizable.
inline QmcState make_qmc(const OqrwModel& m, Matrix omega, BoundarySolution boundary,
                         const Tolerance& tol = {}) {
  model::require_valid(m, tol);
  const int d = m.dim_total();
  if (omega.rows() != d || omega.cols() != d) throw DimensionError("make_qmc: omega dimension mismatch");
  if (!linalg::is_psd(omega, tol)) throw NotPositiveError("make_qmc: omega is not PSD");
  double res = boundary_residual(m, boundary.h, tol);
  if (res > std::max(1e-8, tol.bound(boundary.h.norm()))) {
    throw ValidationError("make_qmc: boundary residual " + std::to_string(res) + " too large");
  }
  boundary.residual = res;
  Complex pairing = (omega * boundary.h).trace();
  if (std::abs(pairing.imag()) > tol.bound(1.0)) {
    throw Error(ErrorKind::Numerical, "make_qmc: Tr(omega h) is not real");
  }
  double s = pairing.real();
  if (s <= tol.abs_eps) throw NotNormalizableError("make_qmc: Tr(omega h) vanishes");
  double rescale = 1.0;
  if (std::abs(s - 1.0) > tol.bound(1.0)) {
    omega /= s;
    rescale = s;
  }
  return QmcState{m, std::move(omega), std::move(boundary), rescale};
}

// Finitely-supported observable: a sum of product terms, identity off
// support. Factors act on H (x) K per vertex.
struct LocalObservable {
  struct Term {
    Complex coeff{1.0, 0.0};
    std::map<tree::Vertex, Matrix> factors;
  };
  std::vector<Term> terms;

  static LocalObservable identity() {
    LocalObservable a;
    a.terms.push_back(Term{});
    return a;
  }

  static LocalObservable product(Complex coeff, std::map<tree::Vertex, Matrix> factors) {
    LocalObservable a;
    a.terms.push_back(Term{coeff, std::move(factors)});
    return a;
  }

  int support_depth() const {
    int n = 0;
    for (const Term& t : terms) {
      for (const auto& [v, f] : t.factors) n = std::max(n, v.level());
    }
    return n;
  }
};

struct ExpectationOptions {
  int max_support_depth = 24;
};

// Product-formula evaluation of the state on a local observable. Cost is one
// scalar per support vertex per site pair; identity factors off the support
// enter as powers of psi_{jj'}(1).
inline Complex qmc_expectation(const QmcState& s, const LocalObservable& a,
                               const ExpectationOptions& opts = {}, const Tolerance& tol = {}) {
  const OqrwModel& m = s.model;
  const int d = m.dim_total();
  const int L = m.lambda_size;
  Functionals fun(m, tol);

  Complex total(0.0, 0.0);
  for (const LocalObservable::Term& term : a.terms) {
    int n = 0;
    for (const auto& [v, f] : term.factors) {
      tree::check_vertex(v, m.k);
      if (f.rows() != d || f.cols() != d) throw DimensionError("observable factor has wrong dimension");
      n = std::max(n, v.level());
    }
    if (n > opts.max_support_depth) {
      throw Error(ErrorKind::Numerical, "qmc_expectation: support depth cap (" +
                                            std::to_string(opts.max_support_depth) + ") exceeded");
    }
    Matrix a_root = linalg::identity(d);
    if (auto it = term.factors.find(tree::Vertex::root()); it != term.factors.end()) {
      a_root = it->second;
    }
    const double interior = static_cast<double>(tree::ball_size(n, m.k) - 1);
    const double boundary_exp = std::pow(static_cast<double>(m.k), n + 1);

    Complex term_val(0.0, 0.0);
    for (int j = 0; j < L; ++j) {
      for (int jp = 0; jp < L; ++jp) {
        Complex bf = cpow(fun.phi(j, jp, s.boundary.h), boundary_exp);
        if (bf == Complex(0.0, 0.0)) continue;
        Complex root_part = (m_jjprime(m, j, jp, s.omega) * a_root).trace();
        Complex sup(1.0, 0.0);
        double sup_cnt = 0.0;
        for (const auto& [v, f] : term.factors) {
          if (v.is_root()) continue;
          sup *= fun.psi(j, jp, f);
          sup_cnt += 1.0;
        }
        Complex id_part = cpow(fun.psi_identity(j, jp), interior - sup_cnt);
        term_val += root_part * sup * id_part * bf;
      }
    }
    total += term.coeff * term_val;
  }
  return total;
}

// Brute-force evaluation: nests the Kraus-form transition expectation level
// by level down from the boundary at level n+1 and pairs with omega at the
// root. Only for k = 2, dim_h*|Lambda| <= 4 and n <= 2.
inline Complex oracle_qmc_expectation(const QmcState& s, const LocalObservable& a, int n,
                                      const Tolerance& tol = {}) {
  const OqrwModel& m = s.model;
  const int d = m.dim_total();
  if (n < 0 || n > 2) throw DimensionTooLargeError("oracle_qmc_expectation: n must be in 0..2");
  if (detail::pow_ll(d, m.k + 1, 64) > 64) {
    throw DimensionTooLargeError("oracle_qmc_expectation: (dim_h*|Lambda|)^(k+1) exceeds 64");
  }
  if (a.support_depth() > n) {
    throw ValidationError("oracle_qmc_expectation: observable support exceeds the given depth");
  }

  Complex total(0.0, 0.0);
  for (const LocalObservable::Term& term : a.terms) {
    std::function<Matrix(const tree::Vertex&)> eval = [&](const tree::Vertex& v) -> Matrix {
      if (v.level() == n + 1) return s.boundary.h;
      Matrix block = linalg::identity(d);
      if (auto it = term.factors.find(v); it != term.factors.end()) block = it->second;
      for (const tree::Vertex& c : tree::successors(v, m.k)) {
        block = linalg::kron(block, eval(c));
      }
      return oracle_transition_expectation(m, block, tol);
    };
    total += term.coeff * (s.omega * eval(tree::Vertex::root())).trace();
  }
  return total;
}

}  // namespace oqrw::qmc
