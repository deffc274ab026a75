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

// Combinatorics of the rooted Cayley tree of order k: the root o has k
// direct successors (v,1)..(v,k), and so does every other vertex. Vertices
// are stored as explicit coordinate paths so level enumerations stay
// directly inspectable.

#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "oqrw/errors.hpp"

namespace oqrw::tree {

struct Vertex {
  std::vector<int> path;  // entries in 1..k, empty path = root

  static Vertex root() { return Vertex{}; }

  int level() const { return static_cast<int>(path.size()); }
  bool is_root() const { return path.empty(); }

  Vertex child(int i) const {
    Vertex v = *this;
    v.path.push_back(i);
    return v;
  }

  bool operator==(const Vertex& o) const = default;

  // Level-major order; within a level this is the coordinate order
  // (1,..,1) < (1,..,2) < ... < (k,..,k).
  bool operator<(const Vertex& o) const {
    if (path.size() != o.path.size()) return path.size() < o.path.size();
    return path < o.path;
  }

  std::string to_string() const {
    if (path.empty()) return "o";
    std::ostringstream os;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (i) os << '.';
      os << path[i];
    }
    return os.str();
  }

  // Parses "o" (root) or dot-separated coordinates like "1.2.1".
  static Vertex parse(const std::string& text) {
    if (text == "o" || text.empty()) return root();
    Vertex v;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, '.')) {
      try {
        std::size_t pos = 0;
        int c = std::stoi(tok, &pos);
        if (pos != tok.size() || c < 1) throw ParseError("");
        v.path.push_back(c);
      } catch (const std::exception&) {
        throw ParseError("bad vertex coordinate '" + tok + "' in '" + text + "'");
      }
    }
    if (v.path.empty()) throw ParseError("bad vertex string '" + text + "'");
    return v;
  }
};

struct TreeShape {
  int k = 2;  // branching order, k >= 1
};

inline void check_order(int k) {
  if (k < 1) throw ValidationError("tree order k must be >= 1");
}

inline void check_vertex(const Vertex& v, int k) {
  for (int c : v.path) {
    if (c < 1 || c > k) {
      throw IndexError("vertex coordinate " + std::to_string(c) + " outside 1.." + std::to_string(k));
    }
  }
}

// The k direct successors (v,1)..(v,k), in that order.
inline std::vector<Vertex> successors(const Vertex& v, int k) {
  check_order(k);
  std::vector<Vertex> out;
  out.reserve(k);
  for (int i = 1; i <= k; ++i) out.push_back(v.child(i));
  return out;
}

// |W_n| = k^n. Throws OverflowError instead of wrapping.
inline std::uint64_t level_size(int n, int k) {
  check_order(k);
  if (n < 0) throw ValidationError("level index must be >= 0");
  std::uint64_t r = 1;
  for (int i = 0; i < n; ++i) {
    if (r > UINT64_MAX / static_cast<std::uint64_t>(k)) {
      throw OverflowError("level_size overflows 64 bits");
    }
    r *= static_cast<std::uint64_t>(k);
  }
  return r;
}

// |Lambda_n| = sum_{j<=n} k^j  (= 2^{n+1}-1 for k = 2).
inline std::uint64_t ball_size(int n, int k) {
  check_order(k);
  if (n < 0) throw ValidationError("level index must be >= 0");
  std::uint64_t total = 0;
  for (int j = 0; j <= n; ++j) {
    std::uint64_t lvl = level_size(j, k);
    if (total > UINT64_MAX - lvl) throw OverflowError("ball_size overflows 64 bits");
    total += lvl;
  }
  return total;
}

// W_n in coordinate order: (1,...,1) first, (k,...,k) last.
inline std::vector<Vertex> level_vertices(int n, int k) {
  check_order(k);
  if (n < 0) throw ValidationError("level index must be >= 0");
  std::uint64_t count = level_size(n, k);
  if (count > (1ull << 22)) {
    throw OverflowError("level enumeration too large: k^n = " + std::to_string(count));
  }
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(count));
  Vertex v;
  v.path.assign(n, 1);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    out.push_back(v);
    // odometer increment, least-significant coordinate last
    for (int pos = n - 1; pos >= 0; --pos) {
      if (v.path[pos] < k) {
        ++v.path[pos];
        break;
      }
      v.path[pos] = 1;
    }
  }
  return out;
}

// Injective integer code (base k+1 with digits 1..k); root maps to 0.
inline std::uint64_t encode(const Vertex& v, int k) {
  check_order(k);
  check_vertex(v, k);
  const std::uint64_t base = static_cast<std::uint64_t>(k) + 1;
  std::uint64_t code = 0;
  for (int c : v.path) {
    if (code > (UINT64_MAX - static_cast<std::uint64_t>(c)) / base) {
      throw OverflowError("vertex code overflows 64 bits");
    }
    code = code * base + static_cast<std::uint64_t>(c);
  }
  return code;
}

inline Vertex decode(std::uint64_t code, int k) {
  check_order(k);
  const std::uint64_t base = static_cast<std::uint64_t>(k) + 1;
  Vertex v;
  while (code != 0) {
    std::uint64_t digit = code % base;
    if (digit == 0) throw ParseError("not a valid vertex code");
    v.path.push_back(static_cast<int>(digit));
    code /= base;
  }
  std::reverse(v.path.begin(), v.path.end());
  return v;
}

}  // namespace oqrw::tree
