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

// Batch front end. Every subcommand reads a model (file or builtin family),
// runs one library operation and emits a JSON report on stdout.
//
//   oqrw-tree <validate|solve-boundaries|expect|phase|entropy|pathprob>
//             --model FILE [--grid a,b,c] [--n-max N] [--tol X] [--seed S]
//             [--log-base e|2] [--out FILE]
//
// Exit codes: 0 ok, 2 parse error, 3 validation failure, 4 unsupported
// shape, 5 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oqrw/oqrw.hpp"

namespace {

using namespace oqrw;
using io::json;

struct CommonArgs {
  std::string model_path;
  std::string out_path;
  double abs_eps = 1e-10;
  double rel_eps = 1e-8;
  int n_max = 6;
  std::uint64_t seed = 1;
  std::string log_base = "e";

  Tolerance tolerance() const { return Tolerance{abs_eps, rel_eps}; }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool model_required = true) {
  auto* opt = cmd->add_option("--model", args.model_path, "model file (JSON)");
  if (model_required) opt->required();
  cmd->add_option("--out", args.out_path, "also write the report to this file");
  cmd->add_option("--tol", args.abs_eps, "absolute tolerance (abs_eps)");
  cmd->add_option("--rel-tol", args.rel_eps, "relative tolerance (rel_eps)");
  cmd->add_option("--n-max", args.n_max, "finite-volume depth for sequences");
  cmd->add_option("--seed", args.seed, "RNG seed for sampling commands");
  cmd->add_option("--log-base", args.log_base, "entropy log base: e or 2")
      ->check(CLI::IsMember({"e", "2"}));
}

int env_threads() {
  if (const char* v = std::getenv("OQRW_TREE_THREADS")) {
    int n = std::atoi(v);
    if (n >= 1) return n;
  }
  return 1;
}

json path_json(const std::vector<int>& sites) {
  json arr = json::array();
  for (int s : sites) arr.push_back(s + 1);  // 1-based in reports
  return arr;
}

json solution_json(const qmc::BoundarySolution& sol) {
  json s;
  s["label"] = sol.label;
  s["residual"] = io::round15(sol.residual);
  json coeffs = json::object();
  for (const auto& [jj, t] : sol.coeffs) {
    coeffs[std::to_string(jj.first + 1) + "," + std::to_string(jj.second + 1)] =
        io::complex_json(t, true);
  }
  s["coeffs"] = std::move(coeffs);
  s["h"] = io::matrix_json(sol.h);
  return s;
}

json pair_json(const phase::PairAnalysis& pa) {
  json p;
  p["state1"] = pa.label1;
  p["state2"] = pa.label2;
  json gaps = json::array();
  for (double g : pa.gaps) gaps.push_back(io::round15(g));
  p["gap_sequence"] = std::move(gaps);
  p["gap_limit"] = io::round15(pa.gap_limit);
  p["support_delta"] = io::round15(pa.support_delta);
  p["overlapping"] = pa.overlapping;
  p["support_witness"] = pa.support_witness;
  p["quasi_equivalent_verdict"] = phase::to_string(pa.verdict);
  return p;
}

// State assembly shared by expect/entropy: pick a solved boundary by label
// and pair it with the requested omega ("canonical", "mixed" or a matrix
// file).
qmc::QmcState build_state(const model::OqrwModel& m, const std::string& boundary_label,
                          const std::string& omega_spec, const Tolerance& tol) {
  auto sols = qmc::solve_boundary_fixed_points(m, tol);
  const qmc::BoundarySolution* chosen = nullptr;
  for (const auto& s : sols) {
    if (s.label == boundary_label) {
      chosen = &s;
      break;
    }
  }
  if (!chosen) {
    std::string have;
    for (const auto& s : sols) have += (have.empty() ? "" : ", ") + s.label;
    throw ValidationError("no boundary solution labeled '" + boundary_label + "' (found: " + have + ")");
  }
  if (omega_spec == "canonical") return phase::canonical_state(m, *chosen, tol);
  if (omega_spec == "mixed") {
    Matrix omega = linalg::identity(m.dim_total()) / static_cast<double>(m.dim_total());
    return qmc::make_qmc(m, std::move(omega), *chosen, tol);
  }
  Matrix omega = io::matrix_from_json(io::read_json_file(omega_spec), m.dim_total(), "omega");
  return qmc::make_qmc(m, std::move(omega), *chosen, tol);
}

void emit(const json& report, const CommonArgs& args) {
  std::string text = report.dump(2);
  std::cout << text << "\n";
  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path);
    if (!out) throw Error(ErrorKind::Numerical, "cannot write " + args.out_path);
    out << text << "\n";
  }
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
};

int run(int argc, char** argv) {
  CLI::App app{"open quantum random walks and quantum Markov chains on rooted Cayley trees"};
  app.require_subcommand(1);

  CommonArgs args;

  auto* cmd_validate = app.add_subcommand("validate", "check a model file against the walk axioms");
  add_common(cmd_validate, args);

  auto* cmd_solve = app.add_subcommand("solve-boundaries",
                                       "enumerate translation-invariant boundary conditions");
  add_common(cmd_solve, args);

  std::string observable_path, boundary_label = "h_0", omega_spec = "canonical";
  auto* cmd_expect = app.add_subcommand("expect", "evaluate a local observable in a chain state");
  add_common(cmd_expect, args);
  cmd_expect->add_option("--observable", observable_path, "observable spec (JSON)")->required();
  cmd_expect->add_option("--boundary", boundary_label, "boundary solution label (default h_0)");
  cmd_expect->add_option("--omega", omega_spec, "root density: canonical, mixed, or a matrix file");

  std::string grid_str, family_b, family_d;
  auto* cmd_phase = app.add_subcommand("phase", "phase-transition detection / family sweep");
  add_common(cmd_phase, args, /*model_required=*/false);
  cmd_phase->add_option("--grid", grid_str, "two-state family sweep over |c| values a,b,c");
  cmd_phase->add_option("--family-b", family_b, "fixed b for the family, as re[,im]");
  cmd_phase->add_option("--family-d", family_d, "fixed d for the family, as re[,im]");

  auto* cmd_entropy = app.add_subcommand("entropy", "mean entropy of a single-site chain state");
  add_common(cmd_entropy, args);
  cmd_entropy->add_option("--boundary", boundary_label, "boundary solution label")->required();
  cmd_entropy->add_option("--omega", omega_spec, "root density: canonical, mixed, or a matrix file");

  std::string path_str;
  int enumerate_n = -1;
  long long sample_count = -1;
  int sample_length = 4;
  auto* cmd_pathprob = app.add_subcommand("pathprob", "walk path distribution");
  add_common(cmd_pathprob, args);
  cmd_pathprob->add_option("--path", path_str, "single path as 1-based sites, e.g. 2,1,1");
  cmd_pathprob->add_option("--enumerate", enumerate_n, "enumerate all paths of n+1 sites");
  cmd_pathprob->add_option("--sample", sample_count, "sample this many paths (uses --seed)");
  cmd_pathprob->add_option("--length", sample_length, "sampled path length (sites)");

  CLI11_PARSE(app, argc, argv);

  Timer timer;
  const Tolerance tol = args.tolerance();

  auto parse_complex_arg = [](const std::string& s) {
    std::istringstream is(s);
    double re = 0.0, im = 0.0;
    char comma = 0;
    is >> re;
    if (is >> comma && comma == ',') is >> im;
    return Complex(re, im);
  };

  if (cmd_phase->parsed() && args.model_path.empty() && grid_str.empty()) {
    throw ValidationError("phase: provide --model FILE or --grid for the family sweep");
  }

  json inputs;
  std::optional<model::OqrwModel> m;
  if (!args.model_path.empty()) {
    inputs["model"] = io::read_json_file(args.model_path);
    m = io::model_from_json(inputs["model"]);
  }

  if (cmd_validate->parsed()) {
    auto rep = model::validate(*m, tol);
    json results;
    results["valid"] = rep.ok();
    json violations = json::array();
    for (const auto& v : rep.violations) {
      violations.push_back({{"code", v.code}, {"message", v.message}, {"residual", io::round15(v.residual)}});
    }
    results["violations"] = std::move(violations);
    results["model"] = io::model_to_json(*m);
    emit(io::make_report("validate", inputs, tol, std::move(results), timer.ms()), args);
    return rep.ok() ? 0 : 3;
  }

  if (cmd_solve->parsed()) {
    model::require_valid(*m, tol);
    auto sols = qmc::solve_boundary_fixed_points(*m, tol);
    json results;
    results["count"] = sols.size();
    json arr = json::array();
    for (const auto& s : sols) arr.push_back(solution_json(s));
    results["solutions"] = std::move(arr);
    emit(io::make_report("solve-boundaries", inputs, tol, std::move(results), timer.ms()), args);
    return 0;
  }

  if (cmd_expect->parsed()) {
    model::require_valid(*m, tol);
    inputs["observable"] = io::read_json_file(observable_path);
    auto obs = io::observable_from_json(inputs["observable"], *m);
    auto state = build_state(*m, boundary_label, omega_spec, tol);
    Complex value = qmc::qmc_expectation(state, obs, {}, tol);
    json results;
    results["boundary"] = boundary_label;
    results["omega"] = omega_spec;
    results["omega_rescale"] = io::round15(state.rescale);
    results["support_depth"] = obs.support_depth();
    results["value"] = io::complex_json(value, true);
    emit(io::make_report("expect", inputs, tol, std::move(results), timer.ms()), args);
    return 0;
  }

  if (cmd_phase->parsed()) {
    phase::PhaseOptions opts;
    opts.n_max = args.n_max;
    opts.threads = env_threads();
    json results;
    if (!grid_str.empty()) {
      phase::TwoStateFamily family;
      if (!family_b.empty()) family.b = parse_complex_arg(family_b);
      if (!family_d.empty()) family.d = parse_complex_arg(family_d);
      std::vector<double> grid;
      std::stringstream ss(grid_str);
      std::string tok;
      while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
      inputs["grid"] = grid;
      auto points = phase::parameter_sweep(family, grid, tol, opts);
      json arr = json::array();
      for (const auto& pt : points) {
        arr.push_back({{"param", io::round15(pt.param)},
                       {"n_solutions", pt.n_solutions},
                       {"max_gap", io::round15(pt.max_gap)},
                       {"verdict", phase::to_string(pt.verdict)}});
      }
      results["points"] = std::move(arr);
    } else {
      model::require_valid(*m, tol);
      auto rep = phase::detect_phase_transition(*m, tol, opts);
      results["verdict"] = phase::to_string(rep.verdict);
      json sols = json::array();
      for (const auto& s : rep.solutions) {
        sols.push_back({{"label", s.label}, {"residual", io::round15(s.residual)}});
      }
      results["solutions"] = std::move(sols);
      json pairs = json::array();
      for (const auto& pa : rep.pairs) pairs.push_back(pair_json(pa));
      results["pairs"] = std::move(pairs);
    }
    emit(io::make_report("phase", inputs, tol, std::move(results), timer.ms()), args);
    return 0;
  }

  if (cmd_entropy->parsed()) {
    model::require_valid(*m, tol);
    auto state = build_state(*m, boundary_label, omega_spec, tol);
    auto rep = entropy::mean_entropy(state, std::max(args.n_max, 0), tol);
    double scale = (args.log_base == "2") ? 1.0 / std::log(2.0) : 1.0;
    json results;
    results["boundary"] = boundary_label;
    results["omega"] = omega_spec;
    results["log_base"] = args.log_base;
    results["site"] = rep.site + 1;
    results["site_entropy"] = io::round15(rep.site_entropy * scale);
    results["root_entropy"] = io::round15(rep.root_entropy * scale);
    results["mean_entropy"] = io::round15(rep.mean_entropy * scale);
    json fv = json::array();
    for (const auto& [n, v] : rep.finite_values) fv.push_back({n, io::round15(v * scale)});
    results["finite_values"] = std::move(fv);
    emit(io::make_report("entropy", inputs, tol, std::move(results), timer.ms()), args);
    return 0;
  }

  if (cmd_pathprob->parsed()) {
    model::require_valid(*m, tol);
    json results;
    int modes = (!path_str.empty() ? 1 : 0) + (enumerate_n >= 0 ? 1 : 0) + (sample_count >= 0 ? 1 : 0);
    if (modes != 1) {
      throw ValidationError("pathprob: pass exactly one of --path, --enumerate, --sample");
    }
    if (!path_str.empty()) {
      model::Path p;
      std::stringstream ss(path_str);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        int site = std::stoi(tok);
        if (site < 1 || site > m->lambda_size) throw IndexError("path site out of range: " + tok);
        p.sites.push_back(site - 1);
      }
      results["path"] = path_json(p.sites);
      results["probability"] = io::round15(model::path_probability(*m, p));
    } else if (enumerate_n >= 0) {
      const int n = enumerate_n;
      std::vector<int> sites(static_cast<std::size_t>(n) + 1, 0);
      json table = json::array();
      double total = 0.0;
      bool done = false;
      while (!done) {
        double prob = model::path_probability(*m, model::Path{sites});
        total += prob;
        table.push_back({{"path", path_json(sites)}, {"p", io::round15(prob)}});
        done = true;
        for (std::size_t pos = sites.size(); pos-- > 0;) {
          if (++sites[pos] < m->lambda_size) {
            done = false;
            break;
          }
          sites[pos] = 0;
        }
      }
      results["n"] = n;
      results["table"] = std::move(table);
      results["sum"] = io::round15(total);
    } else {
      std::map<std::vector<int>, long long> counts;
      for (long long s = 0; s < sample_count; ++s) {
        counts[model::sample_path(*m, sample_length, args.seed + static_cast<std::uint64_t>(s)).sites]++;
      }
      json freq = json::array();
      for (const auto& [sites, count] : counts) {
        freq.push_back({{"path", path_json(sites)},
                        {"count", count},
                        {"frequency", io::round15(static_cast<double>(count) / static_cast<double>(sample_count))}});
      }
      results["count"] = sample_count;
      results["length"] = sample_length;
      results["seed"] = args.seed;
      results["frequencies"] = std::move(freq);
    }
    emit(io::make_report("pathprob", inputs, tol, std::move(results), timer.ms()), args);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const oqrw::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
