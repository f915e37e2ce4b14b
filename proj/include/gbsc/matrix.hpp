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

#ifndef GBSC_MATRIX_HPP
#define GBSC_MATRIX_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gbsc {

using Complex = std::complex<double>;

/// Dense complex matrix. Row-major so the in-memory layout matches the
/// on-disk layout of the unitary file format.
using Matrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Max-norm tolerance for accepting a matrix as unitary.
inline constexpr double kUnitarityTol = 1e-8;

inline bool all_finite(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
        return false;
      }
    }
  }
  return true;
}

/// ||U†U - I|| in the entrywise max norm.
inline double unitarity_deviation(const Matrix& m) {
  Matrix g = m.adjoint() * m;
  double dev = 0.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      Complex expected = (i == j) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
      dev = std::max(dev, std::abs(g(i, j) - expected));
    }
  }
  return dev;
}

/// A square matrix validated as unitary on construction.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(Matrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
      throw std::invalid_argument("UnitaryMatrix: matrix must be square and non-empty");
    }
    if (!all_finite(matrix_)) {
      throw std::invalid_argument("UnitaryMatrix: matrix contains non-finite entries");
    }
    double dev = unitarity_deviation(matrix_);
    if (!(dev < kUnitarityTol)) {
      std::ostringstream msg;
      msg << "UnitaryMatrix: matrix is not unitary, max |U†U - I| deviation is "
          << dev;
      throw std::invalid_argument(msg.str());
    }
  }

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }

 private:
  Matrix matrix_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions do not match");
  }
  return a * b;
}

inline bool is_permutation(const std::vector<int>& p) {
  std::vector<bool> seen(p.size(), false);
  for (int v : p) {
    if (v < 0 || v >= static_cast<int>(p.size()) || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

inline std::vector<int> identity_permutation(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  return p;
}

inline std::vector<int> inverse_permutation(const std::vector<int>& p) {
  if (!is_permutation(p)) {
    throw std::invalid_argument("inverse_permutation: not a permutation");
  }
  std::vector<int> inv(p.size());
  for (int i = 0; i < static_cast<int>(p.size()); ++i) inv[p[i]] = i;
  return inv;
}

/// A zero-cost relabelling of qumodes.
///
/// Conventions (fixed; the relabelling records copy these arrays verbatim):
///   row_perm gathers: row i of the permuted matrix is row row_perm[i] of the
///     original, i.e. physical output i carries logical output row_perm[i].
///   col_perm scatters: column j of the original lands at column col_perm[j],
///     i.e. logical input j is prepared on physical qumode col_perm[j].
struct PermutationPair {
  std::vector<int> row_perm;
  std::vector<int> col_perm;
};

inline PermutationPair identity_permutations(int n) {
  return {identity_permutation(n), identity_permutation(n)};
}

inline PermutationPair inverse(const PermutationPair& p) {
  return {inverse_permutation(p.row_perm), inverse_permutation(p.col_perm)};
}

/// U_per = P_r · U · P_c under the conventions above. Pure index moves, so
/// the result is bit-identical to the source entries.
inline UnitaryMatrix apply_permutations(const UnitaryMatrix& u,
                                        const PermutationPair& p) {
  const int n = u.dim();
  if (static_cast<int>(p.row_perm.size()) != n ||
      static_cast<int>(p.col_perm.size()) != n) {
    throw std::invalid_argument("apply_permutations: permutation length mismatch");
  }
  if (!is_permutation(p.row_perm) || !is_permutation(p.col_perm)) {
    throw std::invalid_argument("apply_permutations: arrays are not permutations");
  }
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out(i, p.col_perm[j]) = u.matrix()(p.row_perm[i], j);
    }
  }
  return UnitaryMatrix(std::move(out));
}

/// |tr(U_app · U†)| / N. The modulus makes the metric insensitive to a global
/// phase on either argument.
inline double fidelity(const UnitaryMatrix& u_app, const UnitaryMatrix& u) {
  if (u_app.dim() != u.dim()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  Complex tr(0.0, 0.0);
  const Matrix& a = u_app.matrix();
  const Matrix& b = u.matrix();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      tr += a(i, j) * std::conj(b(i, j));
    }
  }
  return std::min(std::abs(tr) / static_cast<double>(u.dim()), 1.0);
}

inline UnitaryMatrix identity_unitary(int n) {
  return UnitaryMatrix(Matrix::Identity(n, n));
}

/// splitmix64 mix step; used to derive independent seeds for sub-streams so
/// that per-iteration sampling is reproducible regardless of evaluation
/// order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return h;
}

/// Haar-distributed random unitary: QR decomposition of an i.i.d. complex
/// standard-normal matrix, with the phases of R's diagonal folded back into
/// Q. The PRNG is std::mt19937_64 seeded with `seed`; a given (n, seed) pair
/// always produces the same matrix.
inline UnitaryMatrix haar_random_unitary(int n, std::uint64_t seed) {
  if (n < 2) {
    throw std::invalid_argument("haar_random_unitary: dimension must be at least 2");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double re = gauss(rng);
      double im = gauss(rng);
      a(i, j) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  for (int j = 0; j < n; ++j) {
    Complex r = qr.matrixQR()(j, j);
    double mag = std::abs(r);
    q.col(j) *= (mag == 0.0) ? Complex(1.0, 0.0) : r / mag;
  }
  return UnitaryMatrix(std::move(q));
}

}  // namespace gbsc

#endif  // GBSC_MATRIX_HPP
