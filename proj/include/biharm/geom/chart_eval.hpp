#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "biharm/geom/chart.hpp"
#include "biharm/geom/linalg.hpp"

namespace biharm::geom {

/// Evaluates a chart's metric data at one point as jets of order `budget`.
/// Derived tensors are memoized at their natural order (each covariant
/// derivative consumes one order): g at `budget`, Christoffel at budget-1,
/// curvature at budget-2.  Requests that would need coefficients beyond the
/// budget surface as CapabilityError from the jet layer.
class ChartEval {
 public:
  ChartEval(const Chart& chart, std::span<const double> point, int budget);
  // The evaluator aliases the chart; a temporary would dangle.
  ChartEval(Chart&&, std::span<const double>, int) = delete;

  const Chart& chart() const { return *chart_; }
  int dim() const { return chart_->dim; }
  int budget() const { return budget_; }
  const std::vector<double>& point() const { return point_; }

  /// Coordinate jets seeded at the evaluation point.
  const JVec& coords() const { return coords_; }

  /// Evaluate a closed-form expression in this chart's coordinates.
  Jet eval(const expr::Expr& e) const;

  const JMat& g() const;
  const JMat& ginv() const;
  /// Christoffel symbols; at(l, i, j) = Gamma^l_{ij}.
  const JT3& gamma() const;
  /// Curvature R(d_i, d_j)d_k = riem(l, k, i, j) d_l.
  const JT4& riem() const;
  /// Ricci tensor ric(a, b) = riem(i, b, i, a) summed over i.
  const JMat& ric() const;
  Jet scalar() const;

 private:
  const Chart* chart_;
  std::vector<double> point_;
  int budget_;
  JVec coords_;
  mutable std::optional<JMat> g_, ginv_, ric_;
  mutable std::optional<JT3> gamma_;
  mutable std::optional<JT4> riem_;
};

// ---- field calculus -------------------------------------------------------
// All helpers take jet-valued component arrays in the chart's coordinate
// basis; output orders follow from the inputs (one order per derivative).

/// grad(f)^i = g^{ij} d_j f
JVec grad(const ChartEval& ev, const Jet& f);
/// hess(f)_{ij} = d_i d_j f - Gamma^k_{ij} d_k f
JMat hess(const ChartEval& ev, const Jet& f);
Jet laplacian(const ChartEval& ev, const Jet& f);
/// div(V) = d_k V^k + Gamma^k_{ka} V^a
Jet divergence(const ChartEval& ev, const JVec& v);
/// nabla_vec(V).at(k, i) = (nabla_i V)^k
JMat nabla_vec(const ChartEval& ev, const JVec& v);
/// nabla_X V, with X entering tensorially.
JVec nabla_along(const ChartEval& ev, const JVec& x, const JVec& v);
/// trace of the second covariant derivative, (g^{ij} nabla^2_{ij} V)^l.
JVec rough_laplacian(const ChartEval& ev, const JVec& v);
/// (L_V g)_{ij}
JMat lie_metric(const ChartEval& ev, const JVec& v);
/// Covariant derivative of a (1,1)-tensor; result.at(k, i, j) = (nabla_i T)^k_j.
JT3 nabla_tensor11(const ChartEval& ev, const JMat& t);
/// Covariant derivative of a 1-form; result.at(i, j) = (nabla_i w)_j.
JMat nabla_oneform(const ChartEval& ev, const JVec& w);
/// Ricci operator, (ric_op V)^l = g^{bc} R^l_{cab} V^a.
JVec ricci_op(const ChartEval& ev, const JVec& v);
Jet inner(const ChartEval& ev, const JVec& v, const JVec& w);
JVec lower(const ChartEval& ev, const JVec& v);
JVec raise(const ChartEval& ev, const JVec& w);
/// Pointwise norm sqrt(g(V,V)) of the value part.
double vec_norm(const ChartEval& ev, const JVec& v);
/// Matrix action (A V)^i = A^i_j V^j.
JVec mat_apply(const JMat& a, const JVec& v);
JVec jvec_add(const JVec& a, const JVec& b);
JVec jvec_sub(const JVec& a, const JVec& b);
JVec jvec_scale(const JVec& a, double s);

}  // namespace biharm::geom
