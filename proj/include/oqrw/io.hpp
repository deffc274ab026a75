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

// JSON interchange: model files, observable specs and reports.
//
// Complex numbers are [re, im] pairs, matrices are row-major arrays of such
// pairs, site labels are 1-based in files and 0-based in memory. A model
// file carries either explicit (B, rho) data or a named builtin, not both.
// Model matrices round-trip exactly; derived report numbers are printed
// with 15 significant digits.

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oqrw/errors.hpp"
#include "oqrw/linalg.hpp"
#include "oqrw/model.hpp"
#include "oqrw/qmc.hpp"
#include "oqrw/tree.hpp"

namespace oqrw::io {

using json = nlohmann::ordered_json;
using linalg::Complex;
using linalg::Matrix;
using model::OqrwModel;

inline constexpr const char* kSchemaVersion = "1";

// Snaps a double to 15 significant decimal digits.
inline double round15(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", x);
  return std::strtod(buf, nullptr);
}

inline json complex_json(Complex z, bool rounded = false) {
  if (rounded) return json::array({round15(z.real()), round15(z.imag())});
  return json::array({z.real(), z.imag()});
}

inline Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError("complex value must be a [re, im] pair");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline json matrix_json(const Matrix& m, bool rounded = false) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c), rounded));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, int dim, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw ParseError(what + ": expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  }
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw ParseError(what + ": row " + std::to_string(r) + " has wrong length");
    }
    for (int c = 0; c < dim; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

inline OqrwModel model_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ParseError("model file must be a JSON object");
    if (j.value("schema_version", std::string(kSchemaVersion)) != kSchemaVersion) {
      throw ParseError("unsupported schema_version");
    }
    const bool has_explicit = j.contains("B") || j.contains("rho");
    const bool has_builtin = j.contains("builtin");
    if (has_explicit == has_builtin) {
      throw ParseError("model file must carry either explicit (B, rho) or builtin, not both");
    }
    int k = j.value("tree_order_k", 2);
    if (k < 1) throw ParseError("tree_order_k must be >= 1");

    if (has_builtin) {
      const json& b = j.at("builtin");
      if (b.value("name", "") != "two_state") {
        throw ParseError("unknown builtin model '" + b.value("name", "") + "'");
      }
      const json& p = b.at("params");
      Complex a = complex_from_json(p.at("a"));
      Complex bb = complex_from_json(p.at("b"));
      Complex c = complex_from_json(p.at("c"));
      Complex d = complex_from_json(p.at("d"));
      std::optional<Matrix> rho1, rho2;
      if (p.contains("rho1")) rho1 = matrix_from_json(p.at("rho1"), 2, "rho1");
      if (p.contains("rho2")) rho2 = matrix_from_json(p.at("rho2"), 2, "rho2");
      return model::two_state_model(a, bb, c, d, k, rho1, rho2);
    }

    OqrwModel m;
    m.k = k;
    m.lambda_size = j.at("lambda_size").get<int>();
    m.dim_h = j.at("dim_h").get<int>();
    if (m.lambda_size < 1 || m.dim_h < 1) throw ParseError("lambda_size and dim_h must be >= 1");
    const json& bj = j.at("B");
    const json& rj = j.at("rho");
    if (!bj.is_array() || static_cast<int>(bj.size()) != m.lambda_size) {
      throw ParseError("B must be a lambda_size x lambda_size array of matrices");
    }
    m.B.resize(static_cast<std::size_t>(m.lambda_size));
    for (int i = 0; i < m.lambda_size; ++i) {
      const json& row = bj[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != m.lambda_size) {
        throw ParseError("B row " + std::to_string(i + 1) + " has wrong length");
      }
      for (int jj = 0; jj < m.lambda_size; ++jj) {
        m.B[static_cast<std::size_t>(i)].push_back(matrix_from_json(
            row[static_cast<std::size_t>(jj)], m.dim_h,
            "B[" + std::to_string(i + 1) + "][" + std::to_string(jj + 1) + "]"));
      }
    }
    if (!rj.is_array() || static_cast<int>(rj.size()) != m.lambda_size) {
      throw ParseError("rho must be an array of lambda_size matrices");
    }
    for (int i = 0; i < m.lambda_size; ++i) {
      m.rho.push_back(matrix_from_json(rj[static_cast<std::size_t>(i)], m.dim_h,
                                       "rho[" + std::to_string(i + 1) + "]"));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
}

inline json model_to_json(const OqrwModel& m) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["lambda_size"] = m.lambda_size;
  j["dim_h"] = m.dim_h;
  j["tree_order_k"] = m.k;
  json bj = json::array();
  for (int i = 0; i < m.lambda_size; ++i) {
    json row = json::array();
    for (int jj = 0; jj < m.lambda_size; ++jj) {
      row.push_back(matrix_json(m.B[static_cast<std::size_t>(i)][static_cast<std::size_t>(jj)]));
    }
    bj.push_back(std::move(row));
  }
  j["B"] = std::move(bj);
  json rj = json::array();
  for (int i = 0; i < m.lambda_size; ++i) rj.push_back(matrix_json(m.rho[static_cast<std::size_t>(i)]));
  j["rho"] = std::move(rj);
  return j;
}

inline OqrwModel load_model_file(const std::string& path) { return model_from_json(read_json_file(path)); }

// Small factor expressions: "I", "p", "q", {"ketbra": [i, j]} (1-based) or
// {"matrix": rows}.
inline Matrix factor_expr(const json& j, int dim, const std::string& what) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "I") return linalg::identity(dim);
    if (s == "p" || s == "q") {
      if (dim != 2) throw ParseError(what + ": '" + s + "' needs a 2-dimensional factor");
      return linalg::ketbra(s == "p" ? 0 : 1, s == "p" ? 0 : 1, 2);
    }
    throw ParseError(what + ": unknown factor expression '" + s + "'");
  }
  if (j.is_object() && j.contains("ketbra")) {
    const json& kb = j.at("ketbra");
    if (!kb.is_array() || kb.size() != 2) throw ParseError(what + ": ketbra needs [i, j]");
    int i = kb[0].get<int>(), jj = kb[1].get<int>();
    if (i < 1 || jj < 1 || i > dim || jj > dim) throw ParseError(what + ": ketbra index out of range");
    return linalg::ketbra(i - 1, jj - 1, dim);
  }
  if (j.is_object() && j.contains("matrix")) return matrix_from_json(j.at("matrix"), dim, what);
  if (j.is_array()) return matrix_from_json(j, dim, what);
  throw ParseError(what + ": bad factor expression");
}

// Observable spec: {"terms": [{"coeff": [re, im], "factors": [
//   {"vertex": "1.2", "h": expr, "k": expr} | {"vertex": "o", "matrix": rows}]}]}
inline qmc::LocalObservable observable_from_json(const json& j, const OqrwModel& m) {
  try {
    qmc::LocalObservable obs;
    if (!j.is_object() || !j.contains("terms")) throw ParseError("observable needs a 'terms' array");
    for (const json& tj : j.at("terms")) {
      qmc::LocalObservable::Term term;
      term.coeff = tj.contains("coeff") ? complex_from_json(tj.at("coeff")) : Complex(1.0, 0.0);
      for (const json& fj : tj.value("factors", json::array())) {
        tree::Vertex v = tree::Vertex::parse(fj.at("vertex").get<std::string>());
        tree::check_vertex(v, m.k);
        Matrix factor;
        if (fj.contains("matrix")) {
          factor = matrix_from_json(fj.at("matrix"), m.dim_total(), "factor matrix");
        } else {
          Matrix h = fj.contains("h") ? factor_expr(fj.at("h"), m.dim_h, "h factor")
                                      : linalg::identity(m.dim_h);
          Matrix kf = fj.contains("k") ? factor_expr(fj.at("k"), m.lambda_size, "k factor")
                                       : linalg::identity(m.lambda_size);
          factor = linalg::kron(h, kf);
        }
        if (term.factors.count(v)) throw ParseError("duplicate factor at vertex " + v.to_string());
        term.factors[v] = std::move(factor);
      }
      obs.terms.push_back(std::move(term));
    }
    if (obs.terms.empty()) throw ParseError("observable has no terms");
    return obs;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("observable spec: ") + e.what());
  }
}

// FNV-1a over the canonical serialization; stable input fingerprint.
inline std::string digest(const json& j) {
  std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json make_report(const std::string& command, const json& inputs, const Tolerance& tol,
                        json results, double wall_ms) {
  json r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = command;
  r["inputs_digest"] = digest(inputs);
  r["tolerances"] = {{"abs_eps", tol.abs_eps}, {"rel_eps", tol.rel_eps}};
  r["results"] = std::move(results);
  r["wall_time_ms"] = round15(wall_ms);
  return r;
}

}  // namespace oqrw::io
