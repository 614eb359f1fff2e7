#include "biharm/jets/jet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>

namespace biharm::jets {

namespace {

const JetSpace& common_space(const Jet& a, const Jet& b) {
  if (a.dim() != b.dim())
    throw DimensionError("jet dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  return jet_space(a.dim(), std::min(a.order(), b.order()));
}

} // namespace

Jet Jet::to_order(int k) const {
  if (k == order()) return *this;
  if (k > order())
    throw CapabilityError("cannot raise jet order " + std::to_string(order()) + " to " +
                          std::to_string(k));
  Jet r(jet_space(dim(), k));
  std::memcpy(r.data(), data(), r.size() * sizeof(double));
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  const JetSpace& sp = common_space(*this, o);
  if (&sp != sp_) *this = to_order(sp.order());
  kernels::active().add(c_.data(), c_.data(), o.data(), c_.size());
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  const JetSpace& sp = common_space(*this, o);
  if (&sp != sp_) *this = to_order(sp.order());
  kernels::active().sub(c_.data(), c_.data(), o.data(), c_.size());
  return *this;
}

Jet& Jet::operator*=(double s) {
  kernels::active().scale(c_.data(), c_.data(), s, c_.size());
  return *this;
}

Jet operator+(const Jet& a, const Jet& b) {
  const JetSpace& sp = common_space(a, b);
  Jet r(sp);
  kernels::active().add(r.data(), a.data(), b.data(), r.size());
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  const JetSpace& sp = common_space(a, b);
  Jet r(sp);
  kernels::active().sub(r.data(), a.data(), b.data(), r.size());
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  const JetSpace& sp = common_space(a, b);
  Jet r(sp);
  // The plan indexes only coefficients of degree <= sp.order(), a prefix of
  // both operands' layouts, so longer operands are read safely in place.
  kernels::active().mul_plan(r.data(), a.data(), b.data(), sp.plan());
  return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }

Jet operator-(const Jet& a) {
  Jet r = a;
  r *= -1.0;
  return r;
}

Jet partial(const Jet& a, int v) {
  if (v < 0 || v >= a.dim()) throw DimensionError("partial: variable index out of range");
  if (a.order() == 0)
    throw CapabilityError("partial derivative requested of an order-0 jet");
  Jet r(jet_space(a.dim(), a.order() - 1));
  const auto& src = a.space().deriv_src(v);
  const auto& fac = a.space().deriv_factor(v);
  for (std::size_t t = 0; t < r.size(); ++t)
    r.coeff(t) = fac[t] * a.coeff(static_cast<std::size_t>(src[t]));
  return r;
}

Jet compose_univariate(const Jet& a, std::span<const double> series) {
  const int o = a.order();
  Jet u = a;
  u.coeff(std::size_t{0}) = 0.0;
  Jet r = Jet::constant(a.dim(), o, series[static_cast<std::size_t>(o)]);
  for (int k = o - 1; k >= 0; --k) {
    r = r * u;
    r += series[static_cast<std::size_t>(k)];
  }
  return r;
}

namespace {

using Series = std::array<double, kMaxOrder + 1>;

Jet compose(const Jet& a, const Series& s) {
  return compose_univariate(a, std::span<const double>(s.data(), static_cast<std::size_t>(a.order()) + 1));
}

} // namespace

Jet inverse(const Jet& a) {
  const double c0 = a.value();
  if (c0 == 0.0) throw DomainError("jet inverse: zero leading coefficient");
  Series s{};
  double p = 1.0 / c0;
  for (int k = 0; k <= a.order(); ++k) {
    s[static_cast<std::size_t>(k)] = p;
    p *= -1.0 / c0;
  }
  return compose(a, s);
}

Jet exp(const Jet& a) {
  const double e0 = std::exp(a.value());
  Series s{};
  double f = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) f /= static_cast<double>(k);
    s[static_cast<std::size_t>(k)] = e0 * f;
  }
  return compose(a, s);
}

Jet log(const Jet& a) {
  const double c0 = a.value();
  if (c0 <= 0.0) throw DomainError("jet log: non-positive leading coefficient");
  Series s{};
  s[0] = std::log(c0);
  double p = 1.0;
  for (int k = 1; k <= a.order(); ++k) {
    p *= 1.0 / c0;
    s[static_cast<std::size_t>(k)] = ((k % 2) ? 1.0 : -1.0) * p / static_cast<double>(k);
  }
  return compose(a, s);
}

namespace {

Jet pow_real(const Jet& a, double t, const char* what) {
  const double c0 = a.value();
  if (c0 <= 0.0) throw DomainError(std::string(what) + ": non-positive leading coefficient");
  Series s{};
  double coef = 1.0;      // prod (t - i) / k!
  double cp = std::pow(c0, t);
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) {
      coef *= (t - static_cast<double>(k - 1)) / static_cast<double>(k);
      cp /= c0;
    }
    s[static_cast<std::size_t>(k)] = coef * cp;
  }
  return compose(a, s);
}

} // namespace

Jet sqrt(const Jet& a) { return pow_real(a, 0.5, "jet sqrt"); }

Jet sin(const Jet& a) {
  const double sn = std::sin(a.value());
  const double cs = std::cos(a.value());
  const double cyc[4] = {sn, cs, -sn, -cs};
  Series s{};
  double f = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) f /= static_cast<double>(k);
    s[static_cast<std::size_t>(k)] = cyc[k % 4] * f;
  }
  return compose(a, s);
}

Jet cos(const Jet& a) {
  const double sn = std::sin(a.value());
  const double cs = std::cos(a.value());
  const double cyc[4] = {cs, -sn, -cs, sn};
  Series s{};
  double f = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) f /= static_cast<double>(k);
    s[static_cast<std::size_t>(k)] = cyc[k % 4] * f;
  }
  return compose(a, s);
}

Jet pow(const Jet& a, long long n) {
  if (n == 0) return Jet::constant(a.dim(), a.order(), 1.0);
  if (n < 0) return inverse(pow(a, -n));
  Jet base = a;
  Jet r = Jet::constant(a.dim(), a.order(), 1.0);
  long long e = n;
  while (e > 0) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

Jet pow(const Jet& a, long long num, long long den) {
  if (den == 0) throw DomainError("jet pow: zero exponent denominator");
  if (den < 0) { num = -num; den = -den; }
  if (den == 1) return pow(a, num);
  if (num % den == 0) return pow(a, num / den);
  return pow_real(a, static_cast<double>(num) / static_cast<double>(den), "jet pow");
}

Jet compose(const Jet& f, std::span<const Jet> phi) {
  if (phi.empty()) throw DimensionError("jet compose: no inner jets");
  if (f.dim() != static_cast<int>(phi.size()))
    throw DimensionError("jet compose: outer dim does not match inner count");
  int order = f.order();
  const int xdim = phi[0].dim();
  for (const Jet& p : phi) {
    if (p.dim() != xdim) throw DimensionError("jet compose: inner dim mismatch");
    order = std::min(order, p.order());
  }
  const JetSpace& ysp = jet_space(f.dim(), order);
  // Nilpotent parts of the inner jets: compose() expands f around the inner
  // values, so only offsets from the base point enter the powers.
  std::vector<Jet> u;
  u.reserve(phi.size());
  for (const Jet& p : phi) {
    Jet q = p.to_order(order);
    q.coeff(std::size_t{0}) = 0.0;
    u.push_back(std::move(q));
  }
  // pw[r] = u^beta for beta = ysp.index(r), built from the parent monomial
  // (first nonzero slot decremented) with a single multiply each.
  std::vector<Jet> pw(ysp.size());
  pw[0] = Jet::constant(xdim, order, 1.0);
  Jet r = Jet::constant(xdim, order, f.value());
  for (std::size_t k = 1; k < ysp.size(); ++k) {
    MultiIndex beta = ysp.index(k);
    int v = 0;
    while (beta[v] == 0) ++v;
    MultiIndex parent = beta;
    parent.set(v, beta[v] - 1);
    pw[k] = pw[ysp.rank(parent)] * u[static_cast<std::size_t>(v)];
    const double c = f.coeff(beta);
    if (c != 0.0) r += pw[k] * c;
  }
  return r;
}

std::vector<Jet> seed_point(std::span<const double> point, int order) {
  const int dim = static_cast<int>(point.size());
  std::vector<Jet> r;
  r.reserve(point.size());
  for (int v = 0; v < dim; ++v)
    r.push_back(Jet::variable(dim, order, v, point[static_cast<std::size_t>(v)]));
  return r;
}

} // namespace biharm::jets
