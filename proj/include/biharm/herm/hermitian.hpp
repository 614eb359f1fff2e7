#pragma once

#include <complex>
#include <memory>
#include <optional>

#include "biharm/geom/chart_eval.hpp"
#include "biharm/geom/frames.hpp"
#include "biharm/jets/complex_jet.hpp"

namespace biharm::herm {

using geom::Chart;
using geom::ChartEval;
using geom::JMat;
using geom::JT3;
using geom::Jet;
using geom::JVec;
using jets::CJet;

/// Chart equipped with a closed-form almost complex structure J^i_j
/// (row-major, dim*dim).  An empty `j` means a plain Riemannian chart.
struct HermitianChart {
  Chart chart;
  std::vector<expr::Expr> j;

  bool has_j() const { return !j.empty(); }
  void validate() const;
};

/// Complexified vector field: components are complex jets.
using CVec = std::vector<CJet>;

CVec complexify(const JVec& v);
CVec cvec_add(const CVec& a, const CVec& b);
CVec cvec_sub(const CVec& a, const CVec& b);
CVec cvec_scale(const CVec& a, std::complex<double> s);
CVec cvec_conj(const CVec& a);
/// Real matrix acting on a complex vector, (A v)^i = A^i_j v^j.
CVec cmat_apply(const JMat& a, const CVec& v);
/// Complex-bilinear metric pairing g(v, w) (no conjugation).
CJet c_inner(const ChartEval& ev, const CVec& v, const CVec& w);
/// Covariant derivative nabla_u w of a complex field along a complex
/// direction (direction enters tensorially).
CVec c_nabla_along(const ChartEval& ev, const CVec& u, const CVec& w);

/// Evaluates the complex-structure data of a Hermitian chart at one point.
/// Wraps a ChartEval and memoizes J, nabla J and the Lee form family.
class HermEval {
 public:
  HermEval(const HermitianChart& hc, std::span<const double> point, int budget = 3);
  // The evaluator aliases the chart; a temporary would dangle.
  HermEval(HermitianChart&&, std::span<const double>, int = 3) = delete;

  const ChartEval& base() const { return *ev_; }
  const HermitianChart& chart() const { return *hc_; }
  int dim() const { return ev_->dim(); }

  const JMat& J() const;
  /// nablaJ().at(k, i, j) = (nabla_i J)^k_j
  const JT3& nablaJ() const;
  /// Fundamental two-form, omega().at(i, j) = g(d_i, J d_j).
  const JMat& omega() const;
  /// Exterior derivative of omega; at(i, j, k) = (d omega)_{ijk}.
  const JT3& d_omega() const;

  /// Pointwise defects of the declared structure.
  struct StructureResiduals {
    double j_squared;       // max |(J^2 + I)^i_j| over jet coefficients
    double compatibility;   // max |(J^T g J - g)_{ij}| over jet coefficients
    double nijenhuis;       // max |N^k_{ij}| at the point
  };
  StructureResiduals structure_residuals() const;

  /// Lee field data: sigma = J div J, B = (2/(2-m)) sigma, theta = B-flat.
  /// Requires m > 2.
  struct LeeData {
    JVec sigma;
    JVec b;
    JVec theta;
  };
  const LeeData& lee() const;

  /// Residuals classifying the Hermitian structure at the point.  `scale`
  /// normalizes the exterior-derivative comparisons.
  struct ClassResiduals {
    double kahler;              // max |(d omega)_{ijk}|
    double lck;                 // max |(d omega - theta ^ omega)_{ijk}|
    double dtheta;              // max |(d theta)_{ij}|
    double cosymplectic;        // |sigma|_g
    double one_two_symplectic;  // max |d omega(Z_a, conj Z_b, conj Z_c)|
    double scale;
  };
  ClassResiduals class_residuals() const;

  /// Star Ricci data used by the four-dimensional criteria.
  struct StarData {
    JMat ric_star;     // Ric*(d_i, d_j)
    double s;          // scalar curvature
    double s_star;     // star scalar curvature
    double delta_theta;  // -div(theta sharp)
    double theta_norm2;  // |theta|^2
  };
  StarData star() const;

  /// (nabla_X J)(Y) assembled from nablaJ (both slots tensorial).
  JVec nabla_j_apply(const JVec& x, const JVec& y) const;
  /// Right-hand side of the l.c.K. normal form for (nabla_X J)(Y):
  /// (1/2)(theta(JY) X - theta(Y) JX + g(X,Y) JB - omega(X,Y) B).
  JVec lck_nabla_j(const JVec& x, const JVec& y) const;

  /// J-adapted orthonormal frame {e_1, J e_1, ...} as jet fields.
  const std::vector<JVec>& adapted_frame() const;
  /// Hermitian frame Z_a = (e_a - i J e_a)/sqrt(2), a = 1..m/2.
  std::vector<CVec> hermitian_frame() const;

 private:
  const HermitianChart* hc_;
  std::optional<ChartEval> ev_;
  mutable std::optional<JMat> j_, omega_;
  mutable std::optional<JT3> nabla_j_, d_omega_;
  mutable std::optional<LeeData> lee_;
  mutable std::optional<std::vector<JVec>> frame_;
};

}  // namespace biharm::herm
