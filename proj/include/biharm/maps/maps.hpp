#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biharm/herm/hermitian.hpp"

namespace biharm::maps {

using geom::ChartEval;
using geom::JMat;
using geom::JT3;
using geom::JT4;
using geom::Jet;
using geom::JVec;

/// A map between charts given by closed-form component expressions in the
/// domain coordinates.  Charts are shared so that evaluators may alias them.
struct SmoothMap {
  std::string name;
  std::shared_ptr<const herm::HermitianChart> domain;
  std::shared_ptr<const herm::HermitianChart> codomain;
  std::vector<expr::Expr> components;
  bool declared_holomorphic = false;

  void validate() const;
};

/// Terms of the commutation identity for the second-order operator
/// tr(nabla^phi)^2 + Ric^phi applied to d phi(V):
///   lhs = via_domain + via_tension + via_second_fundamental.
struct ChainReport {
  std::vector<double> lhs;
  std::vector<double> via_domain;              // d phi((tr nabla^2 + Ric) V)
  std::vector<double> via_tension;             // nabla^phi_V tau
  std::vector<double> via_second_fundamental;  // 2 tr nabla d phi(., nabla_. V)
  double residual = 0.0;
  double scale = 1.0;
};

/// Bitension assembled from the Lee field sigma of the domain (valid for
/// holomorphic maps).  The mixed trace term is evaluated over a Hermitian
/// frame with complex arithmetic; `imag_max` reports how far it is from
/// being real, which should be numerical noise.
struct SigmaReport {
  std::vector<double> value;
  double imag_max = 0.0;
  double laplacian_term = 0.0;    // |d phi(tr nabla^2 sigma + Ric sigma)|
  double hessian_term = 0.0;      // |nabla d phi(sigma, sigma)|
  double transport_term = 0.0;    // |d phi(nabla_sigma sigma)|
  double mixed_trace_term = 0.0;  // |2 sum_i nabla d phi(e_i, nabla_{e_i} sigma)|
};

/// Evaluates one map at one domain point.  The domain is expanded at jet
/// order `budget` (default 4: enough for two covariant derivatives of the
/// tension field) and the codomain at `budget - 1` around the image point.
/// Codomain tensors are pulled back along the map by jet composition, so all
/// derived fields live in the domain jet algebra.
class MapEval {
 public:
  MapEval(const SmoothMap& map, std::span<const double> point, int budget = 4);
  // The evaluator aliases the map; a temporary would dangle.
  MapEval(SmoothMap&&, std::span<const double>, int = 4) = delete;

  const SmoothMap& map() const { return *map_; }
  const ChartEval& dom() const { return *dom_; }
  const ChartEval& codom() const { return *codom_; }
  int dim_from() const { return dom_->dim(); }
  int dim_to() const { return codom_->dim(); }

  /// Component jets of the map in domain variables.
  const JVec& phi() const { return phi_; }
  std::vector<double> phi_value() const;

  /// Differential, dphi().at(a, i) = d_i phi^a.
  const JMat& dphi() const;
  /// Codomain metric along the map, as jets in domain variables.
  const JMat& h_along() const;
  /// Codomain Christoffel symbols along the map; at(a, b, c) = Gamma^a_{bc}.
  const JT3& gamma_along() const;
  /// Codomain curvature along the map; at(l, k, a, b) = R^l_{kab}.
  const JT4& riem_along() const;

  /// Second fundamental form, sff().at(a, i, j) = (nabla d phi)^a_{ij}.
  const JT3& sff() const;
  /// Tension field tau^a = g^{ij} sff^a_{ij}, as jets in domain variables.
  const JVec& tension() const;
  /// Bitension field (tr(nabla^phi)^2 + Ric^phi)(tau) at the point.
  std::vector<double> bitension() const;

  /// Pullback connection on fields along the map:
  /// (nabla^phi_i w)^a = d_i w^a + Gamma^a_{bc} d_i phi^b w^c.
  JVec pullback_nabla(int i, const JVec& w) const;
  /// g^{ij}(nabla^phi_i nabla^phi_j - Gamma^k_{ij} nabla^phi_k) w, values.
  std::vector<double> trace_pullback_second(const JVec& w) const;
  /// (Ric^phi w)^l = g^{ij} R^l_{k a b} w^a d_i phi^b d_j phi^k, values.
  std::vector<double> ricci_pullback(const JVec& w) const;
  /// (d phi V)^a = d_i phi^a V^i.
  JVec dphi_apply(const JVec& v) const;

  /// max_{a,i} |d_k phi^a J^k_i - J^a_b d_i phi^b| at the point.  Requires a
  /// complex structure on both charts.
  double holomorphy_residual() const;

  double dphi_norm() const;     // sqrt(g^{ij} h_{ab} d_i phi^a d_j phi^b)
  double tension_norm() const;  // |tau|_h
  /// Normalization for residual comparisons: max(1, |dphi|^3, |tau| |dphi|).
  double scale() const;
  /// Codomain norm sqrt(h_{ab} w^a w^b) of a value vector.
  double target_norm(std::span<const double> w) const;

  /// Commutation identity for a domain vector field V (any map, any field).
  ChainReport chain_formula(const JVec& v) const;
  /// Bitension via the domain Lee field; throws PreconditionError if the map
  /// is not holomorphic at the point.
  SigmaReport bitension_via_sigma() const;

 private:
  const SmoothMap* map_;
  std::vector<double> point_;
  std::optional<ChartEval> dom_;
  std::optional<ChartEval> codom_;
  JVec phi_;
  mutable std::optional<JMat> dphi_, h_along_;
  mutable std::optional<JT3> gamma_along_, sff_;
  mutable std::optional<JT4> riem_along_;
  mutable std::optional<JVec> tension_;
};

}  // namespace biharm::maps
