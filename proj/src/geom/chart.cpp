#include "biharm/geom/chart.hpp"

#include "biharm/errors.hpp"
#include "biharm/jets/multi_index.hpp"

namespace biharm::geom {

void Chart::validate() const {
  if (dim < 1 || dim > jets::kMaxDim)
    throw DimensionError("chart '" + name + "': dimension out of range");
  if (coords.size() != static_cast<std::size_t>(dim))
    throw ConfigError("chart '" + name + "': coordinate name count != dim");
  if (metric.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim))
    throw ConfigError("chart '" + name + "': metric must have dim*dim entries");
  for (const expr::Expr& e : metric) {
    if (e.empty()) throw ConfigError("chart '" + name + "': empty metric entry");
    if (expr::var_count(e) > dim)
      throw ConfigError("chart '" + name + "': metric entry uses unknown coordinate");
  }
  if (region.lo.size() != static_cast<std::size_t>(dim) || region.hi.size() != static_cast<std::size_t>(dim))
    throw ConfigError("chart '" + name + "': region box must have dim bounds");
  for (int i = 0; i < dim; ++i)
    if (!(region.lo[static_cast<std::size_t>(i)] < region.hi[static_cast<std::size_t>(i)]))
      throw ConfigError("chart '" + name + "': region box is empty");
  for (const expr::Expr& e : region.require)
    if (e.empty() || expr::var_count(e) > dim)
      throw ConfigError("chart '" + name + "': bad region constraint");
}

bool Chart::in_domain(std::span<const double> p) const {
  if (p.size() != static_cast<std::size_t>(dim)) return false;
  for (const expr::Expr& e : region.require) {
    double v = 0.0;
    try {
      v = expr::eval(e, p);
    } catch (const DomainError&) {
      return false;
    }
    if (!(v > 0.0)) return false;
  }
  return true;
}

}  // namespace biharm::geom
