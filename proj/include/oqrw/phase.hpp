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

// Phase-transition detection: a transition is reported when the boundary
// equation has at least two solutions whose states certify, on one pair,
// both a uniform expectation gap on far-localized unit-norm observables and
// non-overlapping supports. Absence of a gap on the tested observables is
// never promoted to a quasi-equivalence claim; such pairs stay inconclusive
// unless the two states provably coincide.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oqrw/errors.hpp"
#include "oqrw/linalg.hpp"
#include "oqrw/model.hpp"
#include "oqrw/qmc.hpp"
#include "oqrw/tree.hpp"

namespace oqrw::phase {

using linalg::Complex;
using linalg::Matrix;
using linalg::Tolerance;
using model::OqrwModel;
using qmc::QmcState;

// p(eps, z) = [[eps, z s],[conj(z) s, 1-eps]] with s = sqrt(eps(1-eps));
// every rank-1 projection in M_2 has this form.
inline Matrix rank1_projector(double eps, Complex z, const Tolerance& tol = {}) {
  if (eps < -tol.abs_eps || eps > 1.0 + tol.abs_eps) {
    throw ValidationError("rank1_projector: eps must lie in [0, 1]");
  }
  if (std::abs(std::abs(z) - 1.0) > tol.abs_eps) {
    throw ValidationError("rank1_projector: |z| must be 1");
  }
  eps = std::clamp(eps, 0.0, 1.0);
  double s = std::sqrt(eps * (1.0 - eps));
  Matrix p(2, 2);
  p << eps, z * s, std::conj(z) * s, 1.0 - eps;
  return p;
}

// The walker-at-site-1 projector 1_H (x) |1><1| placed at the first vertex
// of level n; identity elsewhere.
inline qmc::LocalObservable site_projector_observable(const OqrwModel& m, int n) {
  Matrix sigma = linalg::kron(linalg::identity(m.dim_h), linalg::ketbra(0, 0, m.lambda_size));
  tree::Vertex v;
  v.path.assign(static_cast<std::size_t>(n), 1);
  return qmc::LocalObservable::product(Complex(1.0, 0.0), {{v, sigma}});
}

// |phi_1 - phi_2| on the unit-norm observables above, for n = 0..n_max.
inline std::vector<double> gap_sequence(const QmcState& s1, const QmcState& s2, int n_max,
                                        const Tolerance& tol = {}) {
  if (n_max < 0) throw ValidationError("gap_sequence: n_max must be >= 0");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    qmc::LocalObservable a = site_projector_observable(s1.model, n);
    Complex v1 = qmc_expectation(s1, a, {}, tol);
    Complex v2 = qmc_expectation(s2, a, {}, tol);
    out.push_back(std::abs(v1 - v2));
  }
  return out;
}

struct SupportWitness {
  bool overlapping = true;
  std::string witness;
};

// Looks for a projector P_n = (x)_{u in ball(n)} (p(eps,z) (x) 1) on which
// one state is below delta and the other above 1-delta. eps = 1 realizes the
// analytic criterion Tr(omega (p (x) 1)) != 1 and is probed first.
inline SupportWitness support_overlap_test(const QmcState& s1, const QmcState& s2, int n_max,
                                           double delta = 0.01, const Tolerance& tol = {}) {
  const OqrwModel& m = s1.model;
  if (m.dim_h != 2 || m.lambda_size != 2) {
    throw UnsupportedShapeError("support_overlap_test: requires dim_h = |Lambda| = 2");
  }
  if (n_max < 0) throw ValidationError("support_overlap_test: n_max must be >= 0");

  const double eps_grid[] = {1.0, 0.0, 0.25, 0.5, 0.75};
  const Complex z_grid[] = {Complex(1.0, 0.0), Complex(0.0, 1.0)};
  for (double eps : eps_grid) {
    for (Complex z : z_grid) {
      Matrix factor = linalg::kron(rank1_projector(eps, z, tol), linalg::identity(m.lambda_size));
      for (int n = 0; n <= n_max; ++n) {
        std::map<tree::Vertex, Matrix> factors;
        for (int lvl = 0; lvl <= n; ++lvl) {
          for (const tree::Vertex& v : tree::level_vertices(lvl, m.k)) factors[v] = factor;
        }
        qmc::LocalObservable pn = qmc::LocalObservable::product(Complex(1.0, 0.0), factors);
        double v1 = qmc_expectation(s1, pn, {}, tol).real();
        double v2 = qmc_expectation(s2, pn, {}, tol).real();
        bool separated = (v1 < delta && v2 > 1.0 - delta) || (v2 < delta && v1 > 1.0 - delta);
        if (separated) {
          std::ostringstream os;
          os << "P_n(eps=" << eps << ", z=(" << z.real() << "," << z.imag() << ")) at n=" << n
             << ": phi_1=" << v1 << ", phi_2=" << v2;
          return SupportWitness{false, os.str()};
        }
      }
    }
  }
  return SupportWitness{true, "no separating projector on the tested grid"};
}

enum class PairVerdict { Separated, NotSeparated, Inconclusive };

inline const char* to_string(PairVerdict v) {
  switch (v) {
    case PairVerdict::Separated: return "SEPARATED";
    case PairVerdict::NotSeparated: return "NOT_SEPARATED";
    default: return "INCONCLUSIVE";
  }
}

struct PairAnalysis {
  std::string label1, label2;
  std::vector<double> gaps;   // |phi_1 - phi_2| for n = 0..n_max
  double gap_limit = 0.0;     // smallest far-localized gap (n >= 1)
  double support_delta = 0.0;
  bool overlapping = true;
  std::string support_witness;
  PairVerdict verdict = PairVerdict::Inconclusive;
};

struct PhaseOptions {
  int n_max = 6;
  double gap_threshold = 1e-6;
  double support_delta = 0.01;
  qmc::SolveOptions solve;
  int threads = 1;  // worker cap for sweeps
};

// True when both states are single-site product states with identical root
// and site densities, i.e. they are the same state on every local
// observable.
inline bool states_coincide(const QmcState& s1, const QmcState& s2, const Tolerance& tol = {}) {
  const OqrwModel& m = s1.model;
  auto j1 = qmc::single_site_form(m, s1.boundary.h, tol);
  auto j2 = qmc::single_site_form(s2.model, s2.boundary.h, tol);
  if (!j1 || !j2) return false;
  Matrix root1 = qmc::m_jjprime(m, *j1, *j1, s1.omega);
  Matrix root2 = qmc::m_jjprime(s2.model, *j2, *j2, s2.omega);
  if ((root1 - root2).norm() > tol.bound(1.0)) return false;
  auto site = [&tol](const OqrwModel& mm, int j) {
    Matrix rho = mm.rho[static_cast<std::size_t>(j)] / mm.rho[static_cast<std::size_t>(j)].trace().real();
    return qmc::m_jjprime(mm, j, j, linalg::kron(rho, linalg::ketbra(j, j, mm.lambda_size)));
  };
  return (site(m, *j1) - site(s2.model, *j2)).norm() <= tol.bound(1.0);
}

inline PairAnalysis classify_pair(const QmcState& s1, const QmcState& s2, const PhaseOptions& opts = {},
                                  const Tolerance& tol = {}) {
  PairAnalysis pa;
  pa.label1 = s1.boundary.label;
  pa.label2 = s2.boundary.label;
  pa.gaps = gap_sequence(s1, s2, opts.n_max, tol);
  pa.gap_limit = pa.gaps.size() > 1 ? *std::min_element(pa.gaps.begin() + 1, pa.gaps.end())
                                    : pa.gaps.front();
  pa.support_delta = opts.support_delta;
  try {
    SupportWitness w = support_overlap_test(s1, s2, opts.n_max, opts.support_delta, tol);
    pa.overlapping = w.overlapping;
    pa.support_witness = w.witness;
  } catch (const UnsupportedShapeError& e) {
    pa.overlapping = true;
    pa.support_witness = std::string("support test unavailable: ") + e.what();
  }
  if (pa.gap_limit >= opts.gap_threshold) {
    pa.verdict = PairVerdict::Separated;
  } else if (states_coincide(s1, s2, tol)) {
    pa.verdict = PairVerdict::NotSeparated;
  } else {
    pa.verdict = PairVerdict::Inconclusive;
  }
  return pa;
}

enum class PhaseVerdict { PhaseTransition, NoTransitionDetected, Inconclusive };

inline const char* to_string(PhaseVerdict v) {
  switch (v) {
    case PhaseVerdict::PhaseTransition: return "PHASE_TRANSITION";
    case PhaseVerdict::NoTransitionDetected: return "NO_TRANSITION_DETECTED";
    default: return "INCONCLUSIVE";
  }
}

struct PhaseReport {
  std::vector<qmc::BoundarySolution> solutions;
  std::vector<PairAnalysis> pairs;
  PhaseVerdict verdict = PhaseVerdict::Inconclusive;
};

// State seeded from a boundary solution: the worked choices
// omega_1 = q (x) |1><1| and omega_2 = p (x) |2><2| for the two-site family
// with rho_i ~ |1><1|, the rescaled maximally mixed density otherwise.
inline QmcState canonical_state(const OqrwModel& m, const qmc::BoundarySolution& sol,
                                const Tolerance& tol = {}) {
  if (model::canonical_two_state_params(m, tol)) {
    Matrix p = linalg::ketbra(0, 0, 2), q = linalg::ketbra(1, 1, 2);
    if (sol.label == "h_1") return make_qmc(m, linalg::kron(q, linalg::ketbra(0, 0, 2)), sol, tol);
    if (sol.label == "h_2") return make_qmc(m, linalg::kron(p, linalg::ketbra(1, 1, 2)), sol, tol);
  }
  Matrix omega = linalg::identity(m.dim_total()) / static_cast<double>(m.dim_total());
  return make_qmc(m, std::move(omega), sol, tol);
}

inline PhaseReport detect_phase_transition(const OqrwModel& m, const Tolerance& tol = {},
                                           const PhaseOptions& opts = {}) {
  model::require_valid(m, tol);
  PhaseReport rep;
  rep.solutions = qmc::solve_boundary_fixed_points(m, tol, opts.solve);
  if (rep.solutions.size() < 2) {
    rep.verdict = PhaseVerdict::NoTransitionDetected;
    return rep;
  }
  std::vector<QmcState> states;
  states.reserve(rep.solutions.size());
  for (const auto& sol : rep.solutions) states.push_back(canonical_state(m, sol, tol));

  bool transition = false;
  bool all_coincide = true;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      PairAnalysis pa = classify_pair(states[i], states[j], opts, tol);
      if (pa.verdict == PairVerdict::Separated && !pa.overlapping) transition = true;
      if (pa.verdict != PairVerdict::NotSeparated) all_coincide = false;
      rep.pairs.push_back(std::move(pa));
    }
  }
  rep.verdict = transition ? PhaseVerdict::PhaseTransition
                           : (all_coincide ? PhaseVerdict::NoTransitionDetected
                                           : PhaseVerdict::Inconclusive);
  return rep;
}

// One-parameter two-site family: |c| = t, |a| = sqrt(1 - t^2), with optional
// fixed internal amplitudes b, d (default: b tracks a and d tracks c, which
// keeps the walk valid at every grid point).
struct TwoStateFamily {
  std::optional<Complex> b;
  std::optional<Complex> d;
  double phase_a = 0.0;
  double phase_c = 0.0;
  int k = 2;

  OqrwModel at(double c_abs) const {
    if (c_abs < 0.0 || c_abs > 1.0) throw ValidationError("family parameter must lie in [0, 1]");
    double a_abs = std::sqrt(std::max(0.0, 1.0 - c_abs * c_abs));
    Complex a = std::polar(a_abs, phase_a);
    Complex c = std::polar(c_abs, phase_c);
    return model::two_state_model(a, b.value_or(a), c, d.value_or(c), k);
  }
};

struct SweepPoint {
  double param = 0.0;
  std::size_t n_solutions = 0;
  double max_gap = 0.0;  // largest pair gap_limit
  PhaseVerdict verdict = PhaseVerdict::Inconclusive;
};

inline std::vector<SweepPoint> parameter_sweep(const TwoStateFamily& family,
                                               const std::vector<double>& grid,
                                               const Tolerance& tol = {},
                                               const PhaseOptions& opts = {}) {
  for (double g : grid) {
    if (!(g >= 0.0 && g <= 1.0)) throw ValidationError("invalid grid: values must lie in [0, 1]");
  }
  std::vector<SweepPoint> out(grid.size());
  auto run_point = [&](std::size_t idx) {
    PhaseReport rep = detect_phase_transition(family.at(grid[idx]), tol, opts);
    SweepPoint pt;
    pt.param = grid[idx];
    pt.n_solutions = rep.solutions.size();
    pt.verdict = rep.verdict;
    for (const PairAnalysis& pa : rep.pairs) pt.max_gap = std::max(pt.max_gap, pa.gap_limit);
    out[idx] = pt;
  };
  int workers = std::max(1, opts.threads);
  if (workers == 1 || grid.size() <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::size_t n_threads = std::min(static_cast<std::size_t>(workers), grid.size());
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) run_point(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace oqrw::phase
