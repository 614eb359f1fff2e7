#pragma once

#include <span>
#include <vector>

#include "biharm/jets/jet_space.hpp"

namespace biharm::jets {

/// Truncated Taylor expansion of a scalar quantity at a base point, stored
/// densely in graded-lex order with divided-power normalization: the
/// coefficient at multi-index a is  (d^a f / dx^a) / a!.
///
/// Binary operations accept operands of equal dimension and possibly
/// different orders; the result carries the smaller order (truncation of a
/// Taylor expansion is exact, no information is invented).  Requests that
/// would need coefficients beyond the stored order (derivative extraction,
/// partial of an order-0 jet) are hard errors.
class Jet {
public:
  Jet() : sp_(&jet_space(1, 0)), c_(1, 0.0) {}

  explicit Jet(const JetSpace& sp) : sp_(&sp), c_(sp.size(), 0.0) {}

  static Jet constant(int dim, int order, double v) {
    Jet j(jet_space(dim, order));
    j.c_[0] = v;
    return j;
  }

  /// Jet of the coordinate function x_var at a point whose var-th entry is
  /// `value`.
  static Jet variable(int dim, int order, int var, double value) {
    Jet j(jet_space(dim, order));
    j.c_[0] = value;
    if (order >= 1) {
      MultiIndex mi(dim);
      mi.set(var, 1);
      j.c_[j.sp_->rank(mi)] = 1.0;
    }
    return j;
  }

  int dim() const { return sp_->dim(); }
  int order() const { return sp_->order(); }
  std::size_t size() const { return c_.size(); }
  const JetSpace& space() const { return *sp_; }

  double* data() { return c_.data(); }
  const double* data() const { return c_.data(); }

  double value() const { return c_[0]; }
  double coeff(std::size_t rank) const { return c_[rank]; }
  double& coeff(std::size_t rank) { return c_[rank]; }
  double coeff(const MultiIndex& mi) const { return c_[sp_->rank(mi)]; }
  double& coeff(const MultiIndex& mi) { return c_[sp_->rank(mi)]; }

  /// Plain partial derivative d^a f / dx^a (undoes the divided-power
  /// normalization).  Throws CapabilityError when |a| exceeds the order.
  double derivative(const MultiIndex& mi) const { return coeff(mi) * mi.factorial(); }

  Jet to_order(int k) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator-=(double s) { c_[0] -= s; return *this; }
  Jet& operator*=(double s);

private:
  const JetSpace* sp_;
  std::vector<double> c_;
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
inline Jet operator+(const Jet& a, double s) { Jet r = a; r += s; return r; }
inline Jet operator+(double s, const Jet& a) { return a + s; }
inline Jet operator-(const Jet& a, double s) { Jet r = a; r -= s; return r; }
inline Jet operator-(double s, const Jet& a) { Jet r = -a; r += s; return r; }
inline Jet operator*(const Jet& a, double s) { Jet r = a; r *= s; return r; }
inline Jet operator*(double s, const Jet& a) { return a * s; }
inline Jet operator/(const Jet& a, double s) { Jet r = a; r *= 1.0 / s; return r; }

/// Multiplicative inverse; requires a nonzero leading coefficient.
Jet inverse(const Jet& a);
inline Jet operator/(double s, const Jet& a) { return inverse(a) * s; }

/// Jet of the partial derivative along variable v, one order lower.
/// Throws CapabilityError on order-0 input.
Jet partial(const Jet& a, int v);

Jet exp(const Jet& a);
Jet log(const Jet& a);   // leading coefficient must be positive
Jet sqrt(const Jet& a);  // leading coefficient must be positive
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet pow(const Jet& a, long long n);
/// a^(num/den); integer exponents work for any base with the usual division
/// restrictions, fractional ones require a positive leading coefficient.
Jet pow(const Jet& a, long long num, long long den);

/// Compose an analytic univariate series with the nilpotent part of `a`:
/// result = sum_k series[k] * (a - a0)^k, truncated at a's order.
Jet compose_univariate(const Jet& a, std::span<const double> series);

/// Multivariate composition f(phi_1(x), ..., phi_k(x)).  `f` must be a jet in
/// k variables taken at the base point (phi_1.value(), ..., phi_k.value());
/// the phi_a share one source space.  Result order is
/// min(f.order, min phi order).
Jet compose(const Jet& f, std::span<const Jet> phi);

/// Coordinate jets of a chart point, the seed for field evaluation.
std::vector<Jet> seed_point(std::span<const double> point, int order);

} // namespace biharm::jets
