#include "biharm/geom/linalg.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

namespace biharm::geom {

Lu lu_factor(int n, std::vector<double> a) {
  if (n <= 0 || a.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw DimensionError("lu_factor: bad matrix shape");
  Lu lu;
  lu.n = n;
  lu.a = std::move(a);
  lu.piv.resize(static_cast<std::size_t>(n));
  double amax = 0.0;
  for (double v : lu.a) amax = std::max(amax, std::abs(v));
  const double tiny = std::max(amax, 1.0) * 1e-300;
  auto e = [&](int i, int j) -> double& { return lu.a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)]; };
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(e(r, c)) > std::abs(e(p, c))) p = r;
    if (std::abs(e(p, c)) <= tiny) throw PreconditionError("lu_factor: singular matrix");
    lu.piv[static_cast<std::size_t>(c)] = p;
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(e(p, j), e(c, j));
      lu.sign = -lu.sign;
    }
    const double inv = 1.0 / e(c, c);
    for (int r = c + 1; r < n; ++r) {
      const double f = e(r, c) * inv;
      e(r, c) = f;
      for (int j = c + 1; j < n; ++j) e(r, j) -= f * e(c, j);
    }
  }
  return lu;
}

std::vector<double> lu_solve(const Lu& lu, std::vector<double> b) {
  const int n = lu.n;
  if (b.size() != static_cast<std::size_t>(n)) throw DimensionError("lu_solve: bad rhs size");
  auto e = [&](int i, int j) { return lu.a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)]; };
  for (int c = 0; c < n; ++c) std::swap(b[static_cast<std::size_t>(c)], b[static_cast<std::size_t>(lu.piv[static_cast<std::size_t>(c)])]);
  for (int r = 1; r < n; ++r) {
    double s = b[static_cast<std::size_t>(r)];
    for (int j = 0; j < r; ++j) s -= e(r, j) * b[static_cast<std::size_t>(j)];
    b[static_cast<std::size_t>(r)] = s;
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[static_cast<std::size_t>(r)];
    for (int j = r + 1; j < n; ++j) s -= e(r, j) * b[static_cast<std::size_t>(j)];
    b[static_cast<std::size_t>(r)] = s / e(r, r);
  }
  return b;
}

std::vector<double> mat_inverse(int n, const std::vector<double>& a) {
  const Lu lu = lu_factor(n, a);
  std::vector<double> inv(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (int c = 0; c < n; ++c) {
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    b[static_cast<std::size_t>(c)] = 1.0;
    b = lu_solve(lu, std::move(b));
    for (int r = 0; r < n; ++r) inv[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] = b[static_cast<std::size_t>(r)];
  }
  return inv;
}

double mat_det(int n, const std::vector<double>& a) {
  Lu lu;
  try {
    lu = lu_factor(n, a);
  } catch (const PreconditionError&) {
    return 0.0;
  }
  double d = static_cast<double>(lu.sign);
  for (int i = 0; i < n; ++i) d *= lu.a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
  return d;
}

JMat jmat_mul(const JMat& a, const JMat& b) {
  if (a.cols != b.rows) throw DimensionError("jmat_mul: shape mismatch");
  JMat r(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.cols; ++j) {
      Jet s = a.at(i, 0) * b.at(0, j);
      for (int k = 1; k < a.cols; ++k) s += a.at(i, k) * b.at(k, j);
      r.at(i, j) = std::move(s);
    }
  return r;
}

JMat jmat_inverse(const JMat& g) {
  if (g.rows != g.cols || g.rows == 0) throw DimensionError("jmat_inverse: not square");
  const int n = g.rows;
  const int dim = g.at(0, 0).dim();
  const int order = g.at(0, 0).order();
  std::vector<double> g0(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g0[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] = g.at(i, j).value();
  const std::vector<double> i0 = mat_inverse(n, g0);

  JMat inv0(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      inv0.at(i, j) = Jet::constant(dim, order, i0[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)]);
  if (order == 0) return inv0;

  // N = I - inv0*g is nilpotent (zero value part), so the Neumann sum
  // truncates exactly after `order` powers.
  JMat nmat = jmat_mul(inv0, g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet m = -nmat.at(i, j);
      if (i == j) m += 1.0;
      nmat.at(i, j) = std::move(m);
    }
  JMat sum = nmat;  // N
  for (int i = 0; i < n; ++i) sum.at(i, i) += 1.0;
  JMat p = nmat;
  for (int k = 2; k <= order; ++k) {
    p = jmat_mul(p, nmat);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sum.at(i, j) += p.at(i, j);
  }
  return jmat_mul(sum, inv0);
}

Jet jmat_det(const JMat& g) {
  if (g.rows != g.cols || g.rows == 0) throw DimensionError("jmat_det: not square");
  const int n = g.rows;
  JMat w = g;
  double amax = 0.0;
  for (const Jet& v : w.a) amax = std::max(amax, std::abs(v.value()));
  const double tiny = std::max(amax, 1.0) * 1e-300;
  double sign = 1.0;
  Jet det = Jet::constant(w.at(0, 0).dim(), w.at(0, 0).order(), 1.0);
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(w.at(r, c).value()) > std::abs(w.at(p, c).value())) p = r;
    if (std::abs(w.at(p, c).value()) <= tiny) throw PreconditionError("jmat_det: singular value part");
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(w.at(p, j), w.at(c, j));
      sign = -sign;
    }
    det = det * w.at(c, c);
    const Jet inv = jets::inverse(w.at(c, c));
    for (int r = c + 1; r < n; ++r) {
      const Jet f = w.at(r, c) * inv;
      for (int j = c + 1; j < n; ++j) w.at(r, j) -= f * w.at(c, j);
    }
  }
  return det * sign;
}

}  // namespace biharm::geom
