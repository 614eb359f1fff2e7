#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "biharm/maps/maps.hpp"

namespace biharm::cond {

/// Outcome of one residual check at one point.  `pass` means
/// residual <= tol * scale; hypothesis violations never reach a report, they
/// throw PreconditionError instead.
struct ConditionReport {
  std::string id;
  std::vector<double> point;
  double residual = 0.0;
  double scale = 1.0;
  double tol = 1e-6;
  bool pass = false;
  std::vector<std::pair<std::string, double>> terms;
};

inline constexpr double kDefaultTol = 1e-6;

/// Curvature-type identity for the Lee field sigma = J div J, evaluated over
/// the J-adapted orthonormal frame (A: first-order symmetric identity,
/// B: second-order vector equation).  Requires dim >= 4.
std::array<ConditionReport, 2> check_theorem_real(const herm::HermitianChart& hc,
                                                  std::span<const double> point,
                                                  double tol = kDefaultTol);

/// Same two conditions expressed over a Hermitian frame with complex
/// arithmetic; residuals agree with the real forms up to roundoff.
std::array<ConditionReport, 2> check_theorem_complex(const herm::HermitianChart& hc,
                                                     std::span<const double> point,
                                                     double tol = kDefaultTol);

/// Specialization to locally conformally Kaehler charts, written with the
/// Lee vector field B.  Precondition: chart is l.c.K. at 1e-7.
std::array<ConditionReport, 2> check_lck(const herm::HermitianChart& hc,
                                         std::span<const double> point, double tol = kDefaultTol);

/// Same conditions written with the Lee form theta (A: J-invariance of
/// nabla theta + c theta x theta, B: codifferential equation).
std::array<ConditionReport, 2> check_theta_form(const herm::HermitianChart& hc,
                                                std::span<const double> point,
                                                double tol = kDefaultTol);

/// Conformal-factor criterion on a Kaehler base: A: the associated rotated
/// gradient field is Killing (equivalently a Hessian is J-invariant),
/// B: the scalar equation for gamma.  Precondition: base chart is Kaehler.
std::array<ConditionReport, 2> check_gck(const herm::HermitianChart& base,
                                         const expr::Expr& gamma, std::span<const double> point,
                                         double tol = kDefaultTol);

/// Four-dimensional criteria: Ricci J-invariance, equality of scalar and
/// star-scalar curvature, and the bookkeeping identity tying their gap to
/// the Lee form.  Requires dim == 4 and an l.c.K. chart.
std::array<ConditionReport, 3> check_dim4(const herm::HermitianChart& hc,
                                          std::span<const double> point, double tol = kDefaultTol);

/// Holomorphic-fibre submersion criteria: A: closed-form product of the
/// singular values of the map, B: divergence equation for the vertical
/// field.  V spans the kernel of the differential and must equal grad F.
std::array<ConditionReport, 2> check_submersion(const maps::SmoothMap& map,
                                                const std::vector<expr::Expr>& v,
                                                const expr::Expr& f, std::span<const double> point,
                                                double tol = kDefaultTol);

}  // namespace biharm::cond
