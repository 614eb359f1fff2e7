#pragma once

#include <complex>

#include "biharm/jets/jet.hpp"

namespace biharm::jets {

// Complexified jet: a pair of real jets acting as real and imaginary parts.
// Used wherever frames or tensor contractions are taken over C (Hermitian
// frames, (p,q)-type decompositions).  All binary ops reduce to real jet
// arithmetic on the parts.
class CJet {
 public:
  CJet() = default;
  CJet(Jet re, Jet im) : re_(std::move(re)), im_(std::move(im)) {}
  explicit CJet(const Jet& re) : re_(re), im_(Jet(jet_space(re.dim(), re.order()))) {}

  static CJet constant(int dim, int order, std::complex<double> v) {
    return CJet(Jet::constant(dim, order, v.real()), Jet::constant(dim, order, v.imag()));
  }

  const Jet& re() const { return re_; }
  const Jet& im() const { return im_; }
  Jet& re() { return re_; }
  Jet& im() { return im_; }

  std::complex<double> value() const { return {re_.value(), im_.value()}; }

  CJet& operator+=(const CJet& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  CJet& operator-=(const CJet& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }

 private:
  Jet re_, im_;
};

inline CJet operator+(const CJet& a, const CJet& b) { return {a.re() + b.re(), a.im() + b.im()}; }
inline CJet operator-(const CJet& a, const CJet& b) { return {a.re() - b.re(), a.im() - b.im()}; }
inline CJet operator-(const CJet& a) { return {-a.re(), -a.im()}; }

inline CJet operator*(const CJet& a, const CJet& b) {
  return {a.re() * b.re() - a.im() * b.im(), a.re() * b.im() + a.im() * b.re()};
}

inline CJet operator*(const CJet& a, std::complex<double> s) {
  return {a.re() * s.real() - a.im() * s.imag(), a.re() * s.imag() + a.im() * s.real()};
}
inline CJet operator*(std::complex<double> s, const CJet& a) { return a * s; }

inline CJet operator*(const CJet& a, const Jet& b) { return {a.re() * b, a.im() * b}; }
inline CJet operator*(const Jet& a, const CJet& b) { return b * a; }

inline CJet conj(const CJet& a) { return {a.re(), -a.im()}; }

inline CJet partial(const CJet& a, int var) { return {partial(a.re(), var), partial(a.im(), var)}; }

} // namespace biharm::jets
