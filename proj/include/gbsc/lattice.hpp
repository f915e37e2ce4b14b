// Copyright 2026 The gbsc Authors
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

#ifndef GBSC_LATTICE_HPP
#define GBSC_LATTICE_HPP

#include <cctype>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace gbsc {

/// Rectangular 2D device lattice. Qumodes sit on grid points; couplers exist
/// between horizontally or vertically neighbouring points only.
struct Lattice {
  int rows = 0;
  int cols = 0;

  Lattice() = default;
  Lattice(int r, int c) : rows(r), cols(c) {
    if (r < 1 || c < 1) {
      throw std::invalid_argument("Lattice: dimensions must be positive");
    }
  }

  int node_count() const { return rows * cols; }
  bool contains(int r, int c) const {
    return r >= 0 && r < rows && c >= 0 && c < cols;
  }
};

/// One grid point of a lattice.
struct Site {
  int row = 0;
  int col = 0;
  friend bool operator==(const Site& a, const Site& b) {
    return a.row == b.row && a.col == b.col;
  }
};

inline bool lattice_adjacent(const Site& a, const Site& b) {
  return std::abs(a.row - b.row) + std::abs(a.col - b.col) == 1;
}

/// Parses a device spec of the form "6x6" (or "6X6").
inline Lattice parse_device_spec(const std::string& spec) {
  auto pos = spec.find_first_of("xX");
  if (pos == std::string::npos || pos == 0 || pos + 1 >= spec.size()) {
    throw std::invalid_argument("device spec must look like ROWSxCOLS, got '" +
                                spec + "'");
  }
  const std::string rs = spec.substr(0, pos);
  const std::string cs = spec.substr(pos + 1);
  for (const std::string& part : {rs, cs}) {
    if (part.empty()) {
      throw std::invalid_argument("device spec must look like ROWSxCOLS, got '" +
                                  spec + "'");
    }
    for (char ch : part) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) {
        throw std::invalid_argument(
            "device spec must look like ROWSxCOLS, got '" + spec + "'");
      }
    }
  }
  int r = std::atoi(rs.c_str());
  int c = std::atoi(cs.c_str());
  if (r < 1 || c < 1) {
    throw std::invalid_argument("device spec dimensions must be positive, got '" +
                                spec + "'");
  }
  return Lattice(r, c);
}

}  // namespace gbsc

#endif  // GBSC_LATTICE_HPP
