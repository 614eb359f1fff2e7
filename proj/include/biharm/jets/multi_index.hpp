#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>

#include "biharm/errors.hpp"

namespace biharm::jets {

inline constexpr int kMaxDim = 8;
inline constexpr int kMaxOrder = 4;

/// Multi-exponent of a monomial x1^a1 ... xm^am, dim <= 8, |a| <= 4.
class MultiIndex {
public:
  MultiIndex() = default;

  explicit MultiIndex(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim)
      throw CapabilityError("multi-index dimension must be in [1," +
                            std::to_string(kMaxDim) + "]");
    e_.fill(0);
  }

  MultiIndex(int dim, std::initializer_list<int> exps) : MultiIndex(dim) {
    int i = 0;
    for (int v : exps) {
      if (i >= dim) throw DimensionError("too many exponents for multi-index");
      set(i++, v);
    }
  }

  int dim() const { return dim_; }

  int operator[](int i) const { return e_[static_cast<std::size_t>(i)]; }

  void set(int i, int v) {
    if (i < 0 || i >= dim_) throw DimensionError("multi-index slot out of range");
    if (v < 0 || v > kMaxOrder) throw CapabilityError("exponent outside [0,4]");
    e_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
  }

  int degree() const {
    int d = 0;
    for (int i = 0; i < dim_; ++i) d += e_[static_cast<std::size_t>(i)];
    return d;
  }

  double factorial() const {
    static constexpr double kFact[5] = {1.0, 1.0, 2.0, 6.0, 24.0};
    double f = 1.0;
    for (int i = 0; i < dim_; ++i) f *= kFact[e_[static_cast<std::size_t>(i)]];
    return f;
  }

  /// Packed byte key, unique per (dim, exponents); used for rank lookup.
  std::uint64_t key() const {
    std::uint64_t k = 0;
    for (int i = 0; i < dim_; ++i)
      k |= static_cast<std::uint64_t>(e_[static_cast<std::size_t>(i)]) << (8 * i);
    return k;
  }

  MultiIndex bumped(int var) const {
    MultiIndex r = *this;
    r.set(var, (*this)[var] + 1);
    return r;
  }

  bool operator==(const MultiIndex& o) const {
    return dim_ == o.dim_ && e_ == o.e_;
  }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) {
      if (i) s += ",";
      s += std::to_string((*this)[i]);
    }
    return s + ")";
  }

private:
  std::array<std::uint8_t, kMaxDim> e_{};
  int dim_ = 0;
};

} // namespace biharm::jets
