#pragma once

#include <vector>

#include "biharm/errors.hpp"
#include "biharm/jets/jet.hpp"

namespace biharm::geom {

using jets::Jet;

/// Vector of jets (components of a vector field, a 1-form, ...).
using JVec = std::vector<Jet>;

/// Dense row-major matrix of jets.
struct JMat {
  int rows = 0;
  int cols = 0;
  std::vector<Jet> a;

  JMat() = default;
  JMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * static_cast<std::size_t>(c)) {}

  Jet& at(int i, int j) { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)]; }
  const Jet& at(int i, int j) const { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)]; }
};

/// Dense rank-3 tensor of jets.
struct JT3 {
  int n0 = 0, n1 = 0, n2 = 0;
  std::vector<Jet> a;

  JT3() = default;
  JT3(int a0, int a1, int a2)
      : n0(a0), n1(a1), n2(a2), a(static_cast<std::size_t>(a0) * static_cast<std::size_t>(a1) * static_cast<std::size_t>(a2)) {}

  Jet& at(int i, int j, int k) { return a[(static_cast<std::size_t>(i) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(j)) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(k)]; }
  const Jet& at(int i, int j, int k) const { return a[(static_cast<std::size_t>(i) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(j)) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(k)]; }
};

/// Dense rank-4 tensor of jets.
struct JT4 {
  int n0 = 0, n1 = 0, n2 = 0, n3 = 0;
  std::vector<Jet> a;

  JT4() = default;
  JT4(int a0, int a1, int a2, int a3)
      : n0(a0), n1(a1), n2(a2), n3(a3),
        a(static_cast<std::size_t>(a0) * static_cast<std::size_t>(a1) * static_cast<std::size_t>(a2) * static_cast<std::size_t>(a3)) {}

  Jet& at(int i, int j, int k, int l) {
    return a[((static_cast<std::size_t>(i) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(j)) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(k)) * static_cast<std::size_t>(n3) + static_cast<std::size_t>(l)];
  }
  const Jet& at(int i, int j, int k, int l) const {
    return a[((static_cast<std::size_t>(i) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(j)) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(k)) * static_cast<std::size_t>(n3) + static_cast<std::size_t>(l)];
  }
};

/// LU factorization with partial pivoting of a dense double matrix.
struct Lu {
  int n = 0;
  std::vector<double> a;   // packed L\U factors, row-major
  std::vector<int> piv;    // row permutation
  int sign = 1;            // permutation parity
};

/// Factor a row-major n*n matrix.  Throws PreconditionError when singular to
/// working precision.
Lu lu_factor(int n, std::vector<double> a);
std::vector<double> lu_solve(const Lu& lu, std::vector<double> b);
std::vector<double> mat_inverse(int n, const std::vector<double>& a);
double mat_det(int n, const std::vector<double>& a);

JMat jmat_mul(const JMat& a, const JMat& b);

/// Inverse of a jet matrix: LU-invert the value part, then correct the
/// nilpotent remainder with a Neumann sum (exact at the stored order).
JMat jmat_inverse(const JMat& g);

/// Determinant of a jet matrix via elimination with value-magnitude pivoting.
Jet jmat_det(const JMat& g);

}  // namespace biharm::geom
