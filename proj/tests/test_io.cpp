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
#include "oqrw/io.hpp"

using namespace oqrw;
using io::json;

TEST_CASE("model JSON round-trips bit-identically") {
  std::mt19937_64 rng(71);
  auto m = test_support::random_model(3, 2, 2, rng);
  json j = io::model_to_json(m);
  auto m2 = io::model_from_json(j);
  REQUIRE(m2.lambda_size == m.lambda_size);
  REQUIRE(m2.dim_h == m.dim_h);
  REQUIRE(m2.k == m.k);
  for (int i = 0; i < m.lambda_size; ++i) {
    for (int jj = 0; jj < m.lambda_size; ++jj) {
      CHECK(m2.B[i][jj] == m.B[i][jj]);  // exact, not approximate
    }
    CHECK(m2.rho[i] == m.rho[i]);
  }
  CHECK(io::model_to_json(m2).dump() == j.dump());
}

TEST_CASE("builtin two_state files parse and validate") {
  json j = {
      {"schema_version", "1"},
      {"tree_order_k", 2},
      {"builtin",
       {{"name", "two_state"},
        {"params",
         {{"a", {0.6, 0.0}}, {"b", {0.8, 0.0}}, {"c", {0.8, 0.0}}, {"d", {0.6, 0.0}}}}}},
  };
  auto m = io::model_from_json(j);
  CHECK(model::validate(m).ok());
  CHECK(m.B[0][0](0, 0) == Complex(0.6, 0.0));
  CHECK(m.rho[0] == Matrix(linalg::ketbra(0, 0, 2) / 2.0));
}

TEST_CASE("model schema violations raise parse errors") {
  json both = {
      {"lambda_size", 2},
      {"dim_h", 2},
      {"tree_order_k", 2},
      {"B", json::array()},
      {"rho", json::array()},
      {"builtin", {{"name", "two_state"}}},
  };
  CHECK_THROWS_AS(io::model_from_json(both), ParseError);

  json neither = {{"tree_order_k", 2}};
  CHECK_THROWS_AS(io::model_from_json(neither), ParseError);

  json bad_version = {{"schema_version", "999"}, {"builtin", {{"name", "two_state"}}}};
  CHECK_THROWS_AS(io::model_from_json(bad_version), ParseError);

  CHECK_THROWS_AS(io::parse_text("{not json"), ParseError);
}

TEST_CASE("observable specs build tensor factors") {
  auto m = model::two_state_model(0.6, 0.8, 0.8, 0.6);
  json spec = {{"terms",
                {{{"coeff", {2.0, 0.0}},
                  {"factors",
                   {{{"vertex", "1.1"}, {"h", "I"}, {"k", "p"}},
                    {{"vertex", "o"}, {"h", "q"}}}}}}}};
  auto obs = io::observable_from_json(spec, m);
  REQUIRE(obs.terms.size() == 1);
  CHECK(obs.terms[0].coeff == Complex(2.0, 0.0));
  REQUIRE(obs.terms[0].factors.size() == 2);

  tree::Vertex v11{{1, 1}};
  Matrix expected = linalg::kron(linalg::identity(2), linalg::ketbra(0, 0, 2));
  CHECK((obs.terms[0].factors.at(v11) - expected).norm() == 0.0);

  Matrix at_root = obs.terms[0].factors.at(tree::Vertex::root());
  CHECK((at_root - linalg::kron(linalg::ketbra(1, 1, 2), linalg::identity(2))).norm() == 0.0);
}

TEST_CASE("observable factor expressions") {
  auto m = model::two_state_model(0.6, 0.8, 0.8, 0.6);
  json spec = {{"terms",
                {{{"factors",
                   {{{"vertex", "2"}, {"h", {{"ketbra", {1, 2}}}}, {"k", "I"}}}}}}}};
  auto obs = io::observable_from_json(spec, m);
  tree::Vertex v{{2}};
  Matrix expected = linalg::kron(linalg::ketbra(0, 1, 2), linalg::identity(2));
  CHECK((obs.terms[0].factors.at(v) - expected).norm() == 0.0);

  json bad_vertex = {{"terms", {{{"factors", {{{"vertex", "3"}, {"h", "I"}}}}}}}};
  CHECK_THROWS_AS(io::observable_from_json(bad_vertex, m), IndexError);

  json bad_expr = {{"terms", {{{"factors", {{{"vertex", "1"}, {"h", "x"}}}}}}}};
  CHECK_THROWS_AS(io::observable_from_json(bad_expr, m), ParseError);

  json empty = {{"terms", json::array()}};
  CHECK_THROWS_AS(io::observable_from_json(empty, m), ParseError);
}

TEST_CASE("digest is stable and input-sensitive") {
  json a = {{"x", 1}, {"y", {1.5, 2.5}}};
  json b = {{"x", 1}, {"y", {1.5, 2.5000001}}};
  CHECK(io::digest(a) == io::digest(a));
  CHECK(io::digest(a) != io::digest(b));
  CHECK(io::digest(a).size() == 16);
}

TEST_CASE("round15 trims to 15 significant digits") {
  double x = 1.0 / 3.0;
  double r = io::round15(x);
  CHECK(std::abs(r - x) < 1e-15);
  CHECK(r == io::round15(r));
  CHECK(io::round15(0.0) == 0.0);
  CHECK(io::round15(-2.5) == -2.5);
}

TEST_CASE("report assembly") {
  json inputs = {{"model", "stub"}};
  json results = {{"value", 1.0}};
  json rep = io::make_report("expect", inputs, Tolerance{}, results, 12.345);
  CHECK(rep["command"] == "expect");
  CHECK(rep["schema_version"] == "1");
  CHECK(rep["inputs_digest"] == io::digest(inputs));
  CHECK(rep["tolerances"]["abs_eps"] == 1e-10);
  CHECK(rep["results"]["value"] == 1.0);
}
