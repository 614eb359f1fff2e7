#pragma once

#include <span>
#include <string>
#include <vector>

#include "biharm/jets/expr.hpp"

namespace biharm::geom {

/// Sampling region of a chart: an axis-aligned box plus strict inequalities
/// `require[k] > 0` that carve out the valid domain.
struct Region {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<expr::Expr> require;
};

/// A coordinate chart with a closed-form Riemannian metric.  `metric` stores
/// the dim*dim matrix row-major; expressions use the declared coordinate
/// names.
struct Chart {
  std::string name;
  int dim = 0;
  std::vector<std::string> coords;
  std::vector<expr::Expr> metric;
  Region region;

  const expr::Expr& g(int i, int j) const {
    return metric[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)];
  }

  /// Shape and bounds checks; throws ConfigError/DimensionError on a bad
  /// definition.
  void validate() const;

  /// True when every `require` expression is strictly positive at `p` (and
  /// evaluates without a domain fault).
  bool in_domain(std::span<const double> p) const;
};

}  // namespace biharm::geom
