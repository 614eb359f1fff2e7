#include "biharm/cond/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "biharm/errors.hpp"

namespace biharm::cond {

namespace {

using geom::ChartEval;
using geom::JMat;
using geom::Jet;
using geom::JVec;
using herm::CVec;
using herm::HermEval;
using std::complex;

std::vector<double> values_of(const JVec& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].value();
  return r;
}

std::vector<std::vector<double>> mat_values(const JMat& m) {
  std::vector<std::vector<double>> r(static_cast<std::size_t>(m.rows),
                                     std::vector<double>(static_cast<std::size_t>(m.cols)));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m.at(i, j).value();
  return r;
}

/// g-norm of a value vector.
double vnorm(const ChartEval& ev, std::span<const double> v) {
  const int n = ev.dim();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      s += ev.g().at(i, j).value() * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
  return std::sqrt(std::max(0.0, s));
}

std::vector<double> vadd(std::span<const double> a, std::span<const double> b) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

ConditionReport make_report(std::string id, std::span<const double> point, double tol) {
  ConditionReport r;
  r.id = std::move(id);
  r.point.assign(point.begin(), point.end());
  r.tol = tol;
  return r;
}

void finish(ConditionReport& r) { r.pass = r.residual <= r.tol * r.scale; }

/// Value-level frame vectors of the J-adapted orthonormal frame.
std::vector<std::vector<double>> frame_values(const HermEval& he) {
  std::vector<std::vector<double>> r;
  for (const JVec& f : he.adapted_frame()) r.push_back(values_of(f));
  return r;
}

std::vector<double> apply_values(const std::vector<std::vector<double>>& m,
                                 std::span<const double> v) {
  std::vector<double> r(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) r[i] += m[i][j] * v[j];
  return r;
}

double pair_eval(const std::vector<std::vector<double>>& t, std::span<const double> x,
                 std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) s += t[i][j] * x[i] * y[j];
  return s;
}

void require_dim_at_least_4(const HermEval& he, const std::string& id) {
  if (he.dim() < 4)
    throw DimensionError(id + ": requires dimension >= 4, chart '" + he.chart().chart.name +
                         "' has dimension " + std::to_string(he.dim()));
}

/// The l.c.K. hypotheses behind the Lee-field specializations, at 1e-7.
void require_lck(const HermEval& he, const std::string& id) {
  const auto sr = he.structure_residuals();
  if (sr.nijenhuis > 1e-7)
    throw PreconditionError(id + ": chart '" + he.chart().chart.name +
                            "' fails the integrability residual (Nijenhuis = " +
                            std::to_string(sr.nijenhuis) + " > 1e-7)");
  const auto cls = he.class_residuals();
  if (cls.lck > 1e-7 * cls.scale)
    throw PreconditionError(id + ": chart '" + he.chart().chart.name +
                            "' fails the conformal-symplectic residual (|d omega - theta ^ omega| = " +
                            std::to_string(cls.lck) + " > 1e-7 * scale)");
  if (cls.dtheta > 1e-7 * std::max(1.0, cls.scale))
    throw PreconditionError(id + ": chart '" + he.chart().chart.name +
                            "' fails the closed-Lee-form residual (|d theta| = " +
                            std::to_string(cls.dtheta) + " > 1e-7 * scale)");
}

struct LeeFrameData {
  std::vector<std::vector<double>> defect;  // L_sigma g - sigma-flat x sigma-flat
  std::vector<std::vector<double>> jval;    // J values
  std::vector<std::vector<double>> frame;   // adapted frame values
};

LeeFrameData lee_frame_data(const HermEval& he) {
  LeeFrameData d;
  d.defect = mat_values(geom::lie_metric(he.base(), he.lee().sigma));
  const std::vector<double> sf = values_of(geom::lower(he.base(), he.lee().sigma));
  for (std::size_t i = 0; i < sf.size(); ++i)
    for (std::size_t j = 0; j < sf.size(); ++j) d.defect[i][j] -= sf[i] * sf[j];
  d.jval = mat_values(he.J());
  d.frame = frame_values(he);
  return d;
}

struct InvarianceResidual {
  double coord = 0.0;      // max over coordinate pairs of |T(X,Y) - T(JX,JY)|
  double frame = 0.0;      // same over J-adapted orthonormal frame pairs
  double coord_mag = 1.0;  // scale floor 1 plus tensor magnitudes
  double frame_mag = 1.0;
};

InvarianceResidual j_invariance(const std::vector<std::vector<double>>& t,
                                const std::vector<std::vector<double>>& jval,
                                const std::vector<std::vector<double>>& frame) {
  InvarianceResidual r;
  const std::size_t m = t.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double tj = 0.0;
      for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = 0; q < m; ++q) tj += jval[p][i] * t[p][q] * jval[q][j];
      r.coord = std::max(r.coord, std::abs(t[i][j] - tj));
      r.coord_mag = std::max({r.coord_mag, std::abs(t[i][j]), std::abs(tj)});
    }
  for (const auto& x : frame)
    for (const auto& y : frame) {
      const auto jx = apply_values(jval, x);
      const auto jy = apply_values(jval, y);
      const double a = pair_eval(t, x, y), b = pair_eval(t, jx, jy);
      r.frame = std::max(r.frame, std::abs(a - b));
      r.frame_mag = std::max({r.frame_mag, std::abs(a), std::abs(b)});
    }
  return r;
}

/// X' = (X - i J X)/2 on complex value vectors.
std::vector<complex<double>> holo_part(const std::vector<std::vector<double>>& jval,
                                       const std::vector<complex<double>>& x) {
  std::vector<complex<double>> r(x.size());
  const complex<double> iu(0.0, 1.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    complex<double> jx = 0.0;
    for (std::size_t l = 0; l < x.size(); ++l) jx += jval[k][l] * x[l];
    r[k] = 0.5 * (x[k] - iu * jx);
  }
  return r;
}

/// X'' = (X + i J X)/2 on complex jet fields.
CVec antiholo_field(const HermEval& he, const CVec& x) {
  const CVec jx = herm::cmat_apply(he.J(), x);
  return herm::cvec_scale(herm::cvec_add(x, herm::cvec_scale(jx, complex<double>(0.0, 1.0))), 0.5);
}

CVec holo_field(const HermEval& he, const CVec& x) {
  const CVec jx = herm::cmat_apply(he.J(), x);
  return herm::cvec_scale(herm::cvec_sub(x, herm::cvec_scale(jx, complex<double>(0.0, 1.0))), 0.5);
}

/// Norm matching the real vector norm for a complex residual field E:
/// with E' = (E - iJE)/2, |E_real| = sqrt(2(|Re E'|^2 + |Im E'|^2)).
double prime_norm(const ChartEval& ev, const std::vector<std::vector<double>>& jval,
                  const std::vector<complex<double>>& e) {
  const auto ep = holo_part(jval, e);
  std::vector<double> re(ep.size()), im(ep.size());
  for (std::size_t k = 0; k < ep.size(); ++k) {
    re[k] = ep[k].real();
    im[k] = ep[k].imag();
  }
  const double a = vnorm(ev, re), b = vnorm(ev, im);
  return std::sqrt(2.0 * (a * a + b * b));
}

/// Second-order terms shared by the real and complex forms:
/// tr nabla^2 sigma + Ric sigma - nabla_sigma sigma (values).
struct SigmaSecondOrder {
  std::vector<double> second;
  std::vector<double> ricci;
  std::vector<double> transport;  // -nabla_sigma sigma
};

SigmaSecondOrder sigma_second_order(const HermEval& he) {
  const ChartEval& ev = he.base();
  const JVec& sigma = he.lee().sigma;
  SigmaSecondOrder s;
  s.second = values_of(geom::rough_laplacian(ev, sigma));
  s.ricci = values_of(geom::ricci_op(ev, sigma));
  s.transport = values_of(geom::nabla_along(ev, sigma, sigma));
  for (double& x : s.transport) x = -x;
  return s;
}

}  // namespace

std::array<ConditionReport, 2> check_theorem_real(const herm::HermitianChart& hc,
                                                  std::span<const double> point, double tol) {
  HermEval he(hc, point);
  require_dim_at_least_4(he, "theorem_real");
  const ChartEval& ev = he.base();
  const int m = he.dim();
  const JVec& sigma = he.lee().sigma;

  ConditionReport a = make_report("theorem_real_A", point, tol);
  const LeeFrameData d = lee_frame_data(he);
  const InvarianceResidual ir = j_invariance(d.defect, d.jval, d.frame);
  a.residual = ir.coord;
  a.scale = ir.coord_mag;
  a.terms = {{"tensor_magnitude", ir.coord_mag}, {"frame_residual", ir.frame}};
  finish(a);

  ConditionReport b = make_report("theorem_real_B", point, tol);
  const SigmaSecondOrder so = sigma_second_order(he);

  const JVec jsigma = geom::mat_apply(he.J(), sigma);
  const JVec torsion =
      geom::jvec_add(he.nabla_j_apply(sigma, sigma), he.nabla_j_apply(jsigma, jsigma));
  std::vector<double> t4 = values_of(geom::mat_apply(he.J(), torsion));
  for (double& x : t4) x *= 0.5;

  // trace of (nabla_. J) D(.) - (nabla_{D(.)} J)(.) with D(X) = nabla_{JX} sigma + J nabla_X sigma
  const auto ns = mat_values(geom::nabla_vec(ev, sigma));
  std::vector<std::vector<double>> dmat(static_cast<std::size_t>(m),
                                        std::vector<double>(static_cast<std::size_t>(m), 0.0));
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i) {
      double v = 0.0;
      for (int c = 0; c < m; ++c)
        v += d.jval[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] *
                 ns[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] +
             d.jval[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] *
                 ns[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
      dmat[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = v;
    }
  const auto gi = mat_values(ev.ginv());
  const auto& nj = he.nablaJ();
  std::vector<double> t5(static_cast<std::size_t>(m), 0.0);
  for (int k = 0; k < m; ++k) {
    double acc = 0.0;
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) {
        const double gpq = gi[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
        if (gpq == 0.0) continue;
        double v = 0.0;
        for (int j = 0; j < m; ++j)
          v += nj.at(k, p, j).value() * dmat[static_cast<std::size_t>(j)][static_cast<std::size_t>(q)] -
               dmat[static_cast<std::size_t>(j)][static_cast<std::size_t>(p)] * nj.at(k, j, q).value();
        acc += gpq * v;
      }
    t5[static_cast<std::size_t>(k)] = 0.5 * acc;
  }

  std::vector<double> e = vadd(vadd(so.second, so.ricci), vadd(so.transport, vadd(t4, t5)));
  b.residual = vnorm(ev, e);
  b.terms = {{"second_order", vnorm(ev, so.second)},
             {"ricci", vnorm(ev, so.ricci)},
             {"transport", vnorm(ev, so.transport)},
             {"j_torsion", vnorm(ev, t4)},
             {"j_trace", vnorm(ev, t5)}};
  double sum = 0.0;
  for (const auto& [name, val] : b.terms) sum += val;
  b.scale = std::max(1.0, sum);
  finish(b);
  return {std::move(a), std::move(b)};
}

std::array<ConditionReport, 2> check_theorem_complex(const herm::HermitianChart& hc,
                                                     std::span<const double> point, double tol) {
  HermEval he(hc, point);
  require_dim_at_least_4(he, "theorem_complex");
  const ChartEval& ev = he.base();
  const int m = he.dim();
  const JVec& sigma = he.lee().sigma;
  const CVec sigma_c = herm::complexify(sigma);
  const std::vector<CVec> frame = he.hermitian_frame();

  ConditionReport a = make_report("theorem_complex_A", point, tol);
  const LeeFrameData d = lee_frame_data(he);
  auto cvalues = [m](const CVec& z) {
    std::vector<complex<double>> r(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) r[static_cast<std::size_t>(k)] = z[static_cast<std::size_t>(k)].value();
    return r;
  };
  double worst = 0.0;
  for (const CVec& zj : frame)
    for (const CVec& zk : frame) {
      const auto z = cvalues(zj), w = cvalues(zk);
      complex<double> c = 0.0;
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
          c += d.defect[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] *
               z[static_cast<std::size_t>(p)] * w[static_cast<std::size_t>(q)];
      worst = std::max({worst, std::abs(2.0 * c.real()), std::abs(2.0 * c.imag())});
    }
  const InvarianceResidual ir = j_invariance(d.defect, d.jval, d.frame);
  a.residual = worst;
  a.scale = ir.frame_mag;
  a.terms = {{"tensor_magnitude", ir.frame_mag}};
  finish(a);

  ConditionReport b = make_report("theorem_complex_B", point, tol);
  const SigmaSecondOrder so = sigma_second_order(he);
  std::vector<complex<double>> e(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k)
    e[static_cast<std::size_t>(k)] = so.second[static_cast<std::size_t>(k)] +
                                     so.ricci[static_cast<std::size_t>(k)] +
                                     so.transport[static_cast<std::size_t>(k)];

  std::vector<complex<double>> frame_term(static_cast<std::size_t>(m), 0.0);
  for (const CVec& z : frame) {
    const CVec zbar = herm::cvec_conj(z);
    // nabla_{Z}(nabla_{Zbar} sigma)''
    const CVec dw = herm::c_nabla_along(ev, zbar, sigma_c);
    const CVec ta = herm::c_nabla_along(ev, z, antiholo_field(he, dw));
    // nabla_{(nabla_Z sigma)'} Zbar
    const CVec du = herm::c_nabla_along(ev, z, sigma_c);
    const CVec tb = herm::c_nabla_along(ev, holo_field(he, du), zbar);
    for (int k = 0; k < m; ++k)
      frame_term[static_cast<std::size_t>(k)] +=
          ta[static_cast<std::size_t>(k)].value() + tb[static_cast<std::size_t>(k)].value();
  }
  const CVec tc = herm::c_nabla_along(ev, holo_field(he, sigma_c), antiholo_field(he, sigma_c));
  for (int k = 0; k < m; ++k)
    frame_term[static_cast<std::size_t>(k)] =
        -2.0 * frame_term[static_cast<std::size_t>(k)] + 2.0 * tc[static_cast<std::size_t>(k)].value();

  std::vector<complex<double>> total(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k)
    total[static_cast<std::size_t>(k)] = e[static_cast<std::size_t>(k)] + frame_term[static_cast<std::size_t>(k)];
  b.residual = prime_norm(ev, d.jval, total);
  b.terms = {{"second_order", vnorm(ev, so.second)},
             {"ricci", vnorm(ev, so.ricci)},
             {"transport", vnorm(ev, so.transport)},
             {"frame_trace", prime_norm(ev, d.jval, frame_term)}};
  double sum = 0.0;
  for (const auto& [name, val] : b.terms) sum += val;
  b.scale = std::max(1.0, sum);
  finish(b);
  return {std::move(a), std::move(b)};
}

std::array<ConditionReport, 2> check_lck(const herm::HermitianChart& hc,
                                         std::span<const double> point, double tol) {
  HermEval he(hc, point);
  require_dim_at_least_4(he, "lck");
  require_lck(he, "lck");
  const ChartEval& ev = he.base();
  const int m = he.dim();
  const JVec& bfield = he.lee().b;
  const std::vector<double> theta = values_of(he.lee().theta);
  const auto jval = mat_values(he.J());
  const auto frame = frame_values(he);

  ConditionReport a = make_report("lck_A", point, tol);
  // g(nabla_. B, .) + ((m-2)/4) theta x theta; its J-invariance defect is the
  // identity's residual with the gradient route for the derivative of B.
  const auto nb = mat_values(geom::nabla_vec(ev, bfield));
  const auto gv = mat_values(ev.g());
  const double coeff = (m - 2.0) / 4.0;
  std::vector<std::vector<double>> t(static_cast<std::size_t>(m),
                                     std::vector<double>(static_cast<std::size_t>(m), 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double low = 0.0;
      for (int k = 0; k < m; ++k)
        low += gv[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] *
               nb[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
      t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          low + coeff * theta[static_cast<std::size_t>(i)] * theta[static_cast<std::size_t>(j)];
    }
  const InvarianceResidual ir = j_invariance(t, jval, frame);
  a.residual = ir.coord;
  a.scale = ir.coord_mag;
  a.terms = {{"tensor_magnitude", ir.coord_mag}, {"frame_residual", ir.frame}};
  finish(a);

  ConditionReport b = make_report("lck_B", point, tol);
  const std::vector<double> t1 = values_of(geom::rough_laplacian(ev, bfield));
  const std::vector<double> t2 = values_of(geom::ricci_op(ev, bfield));
  std::vector<double> t3 = values_of(geom::nabla_along(ev, bfield, bfield));
  for (double& x : t3) x *= (m - 6.0) / 2.0;
  const double divb = geom::divergence(ev, bfield).value();
  const double bnorm2 = geom::inner(ev, bfield, bfield).value();
  const double coef = divb - ((m - 2.0) / 4.0) * bnorm2;
  std::vector<double> t4 = values_of(bfield);
  for (double& x : t4) x *= coef;
  const std::vector<double> e = vadd(vadd(t1, t2), vadd(t3, t4));
  b.residual = vnorm(ev, e);
  b.terms = {{"second_order", vnorm(ev, t1)},
             {"ricci", vnorm(ev, t2)},
             {"transport", vnorm(ev, t3)},
             {"divergence", vnorm(ev, t4)}};
  double sum = 0.0;
  for (const auto& [name, val] : b.terms) sum += val;
  b.scale = std::max(1.0, sum);
  finish(b);
  return {std::move(a), std::move(b)};
}

std::array<ConditionReport, 2> check_theta_form(const herm::HermitianChart& hc,
                                                std::span<const double> point, double tol) {
  HermEval he(hc, point);
  require_dim_at_least_4(he, "theta_form");
  require_lck(he, "theta_form");
  const ChartEval& ev = he.base();
  const int m = he.dim();
  const JVec& bfield = he.lee().b;
  const std::vector<double> theta = values_of(he.lee().theta);
  const auto jval = mat_values(he.J());
  const auto frame = frame_values(he);
  const double coeff = (m - 2.0) / 4.0;

  ConditionReport a = make_report("theta_A", point, tol);
  // Same tensor as lck_A but with the one-form covariant derivative route.
  const auto nth = mat_values(geom::nabla_oneform(ev, he.lee().theta));
  std::vector<std::vector<double>> t(static_cast<std::size_t>(m),
                                     std::vector<double>(static_cast<std::size_t>(m)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          nth[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
          coeff * theta[static_cast<std::size_t>(i)] * theta[static_cast<std::size_t>(j)];
  const InvarianceResidual ir = j_invariance(t, jval, frame);
  a.residual = ir.coord;
  a.scale = ir.coord_mag;
  a.terms = {{"tensor_magnitude", ir.coord_mag}, {"frame_residual", ir.frame}};
  finish(a);

  ConditionReport b = make_report("theta_B", point, tol);
  const double delta_theta = -geom::divergence(ev, bfield).value();
  const double theta_norm2 = geom::inner(ev, bfield, bfield).value();
  b.residual = std::abs(delta_theta + coeff * theta_norm2);
  b.scale = std::max({1.0, std::abs(delta_theta), coeff * theta_norm2});
  b.terms = {{"codifferential", std::abs(delta_theta)}, {"lee_norm", coeff * theta_norm2}};
  finish(b);
  return {std::move(a), std::move(b)};
}

std::array<ConditionReport, 2> check_gck(const herm::HermitianChart& base, const expr::Expr& gamma,
                                         std::span<const double> point, double tol) {
  HermEval he(base, point);
  require_dim_at_least_4(he, "gck");
  double flat_j = 0.0;
  for (const Jet& c : he.nablaJ().a)
    for (std::size_t k = 0; k < c.size(); ++k) flat_j = std::max(flat_j, std::abs(c.coeff(k)));
  if (flat_j > 1e-8)
    throw PreconditionError("gck: base chart '" + base.chart.name +
                            "' is not Kaehler (|nabla J| = " + std::to_string(flat_j) + " > 1e-8)");
  const ChartEval& ev = he.base();
  const int m = he.dim();
  const Jet gj = ev.eval(gamma);
  const JVec grad_gamma = geom::grad(ev, gj);
  const double c = (m - 6.0) / 2.0;

  ConditionReport a = make_report("gck_A", point, tol);
  const Jet weight = jets::exp(gj * c);
  JVec scaled(grad_gamma.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = grad_gamma[i] * weight;
  const JVec xi = geom::mat_apply(he.J(), scaled);
  const auto lie = mat_values(geom::lie_metric(ev, xi));
  const auto frame = frame_values(he);
  const auto jval = mat_values(he.J());
  double killing = 0.0;
  for (const auto& row : lie)
    for (double x : row) killing = std::max(killing, std::abs(x));
  const Jet hess_target = (m != 6) ? weight : gj;
  const auto hv = mat_values(geom::hess(ev, hess_target));
  const InvarianceResidual ir = j_invariance(hv, jval, frame);
  const auto nxi = mat_values(geom::nabla_vec(ev, xi));
  const auto gvv = mat_values(ev.g());
  double dmag = 0.0;
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i) {
      double low = 0.0;
      for (int l = 0; l < m; ++l)
        low += gvv[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] *
               nxi[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
      dmag = std::max(dmag, std::abs(low));
    }
  a.residual = std::max(killing, ir.coord);
  a.scale = std::max({1.0, dmag, ir.coord_mag});
  a.terms = {{"killing", killing}, {"hessian_invariance", ir.coord}};
  finish(a);

  ConditionReport b = make_report("gck_B", point, tol);
  const double lap = geom::laplacian(ev, gj).value();
  const double gn = geom::inner(ev, grad_gamma, grad_gamma).value();
  b.residual = std::abs(lap + ((m - 2.0) / 2.0) * gn);
  b.scale = std::max({1.0, std::abs(lap), ((m - 2.0) / 2.0) * gn});
  b.terms = {{"laplacian", std::abs(lap)}, {"gradient_square", ((m - 2.0) / 2.0) * gn}};
  finish(b);
  return {std::move(a), std::move(b)};
}

std::array<ConditionReport, 3> check_dim4(const herm::HermitianChart& hc,
                                          std::span<const double> point, double tol) {
  HermEval he(hc, point);
  if (he.dim() != 4)
    throw DimensionError("dim4: chart '" + hc.chart.name + "' has dimension " +
                         std::to_string(he.dim()) + ", these criteria need dimension 4");
  require_lck(he, "dim4");
  const ChartEval& ev = he.base();
  const auto frame = frame_values(he);
  const auto jval = mat_values(he.J());

  ConditionReport r1 = make_report("dim4_ricci", point, tol);
  const auto ric = mat_values(ev.ric());
  const InvarianceResidual ir = j_invariance(ric, jval, frame);
  r1.residual = ir.coord;
  r1.scale = ir.coord_mag;
  r1.terms = {{"ricci_magnitude", ir.coord_mag}};
  finish(r1);

  const auto st = he.star();
  ConditionReport r2 = make_report("dim4_scalar", point, tol);
  r2.residual = std::abs(st.s - st.s_star);
  r2.scale = std::max({1.0, std::abs(st.s), std::abs(st.s_star)});
  r2.terms = {{"scalar", st.s}, {"star_scalar", st.s_star}};
  finish(r2);

  ConditionReport r3 = make_report("dim4_identity", point, tol);
  r3.residual = std::abs(st.s - st.s_star - 2.0 * st.delta_theta - st.theta_norm2);
  r3.scale = std::max({1.0, std::abs(st.s), std::abs(st.s_star), 2.0 * std::abs(st.delta_theta),
                       st.theta_norm2});
  r3.terms = {{"scalar_gap", st.s - st.s_star},
              {"codifferential", 2.0 * st.delta_theta},
              {"lee_norm", st.theta_norm2}};
  finish(r3);
  return {std::move(r1), std::move(r2), std::move(r3)};
}

std::array<ConditionReport, 2> check_submersion(const maps::SmoothMap& map,
                                                const std::vector<expr::Expr>& v,
                                                const expr::Expr& f, std::span<const double> point,
                                                double tol) {
  maps::MapEval me(map, point);
  const ChartEval& ev = me.dom();
  const int m = me.dim_from(), n = me.dim_to();
  if (n != m - 1)
    throw DimensionError("submersion: map '" + map.name + "' goes from dimension " +
                         std::to_string(m) + " to " + std::to_string(n) +
                         ", expected corank one");
  if (v.size() != static_cast<std::size_t>(m))
    throw ConfigError("submersion: vertical field needs " + std::to_string(m) + " components");

  JVec vf(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) vf[static_cast<std::size_t>(i)] = ev.eval(v[static_cast<std::size_t>(i)]);
  const Jet fj = ev.eval(f);
  if (fj.value() <= 0.0)
    throw PreconditionError("submersion: the potential must be positive at the point, got " +
                            std::to_string(fj.value()));
  const double vn = geom::vec_norm(ev, vf);
  if (vn < 1e-10)
    throw PreconditionError("submersion: the vertical field vanishes at the point");

  const std::vector<double> push = values_of(me.dphi_apply(vf));
  if (me.target_norm(push) > 1e-8 * std::max(1.0, me.dphi_norm() * vn))
    throw PreconditionError("submersion: V is not in the kernel of the differential (|d phi(V)| = " +
                            std::to_string(me.target_norm(push)) + ")");

  const JVec gf = geom::grad(ev, fj);
  const std::vector<double> gap = values_of(geom::jvec_sub(vf, gf));
  if (vnorm(ev, gap) > 1e-8 * std::max(1.0, vn))
    throw PreconditionError("submersion: V does not match the gradient of the potential (gap " +
                            std::to_string(vnorm(ev, gap)) + ")");

  herm::HermEval he(*map.domain, point);
  const JVec jv = geom::mat_apply(he.J(), vf);
  const auto lie = mat_values(geom::lie_metric(ev, jv));
  double kill = 0.0;
  for (const auto& row : lie)
    for (double x : row) kill = std::max(kill, std::abs(x));
  if (kill > 1e-8 * std::max(1.0, vn * vn))
    throw PreconditionError("submersion: J V is not a Killing field (residual " +
                            std::to_string(kill) + "), V is not holomorphic");

  // Pulled-back metric with the kernel direction replaced by a unit
  // eigenvalue: det = product of the squared singular values.
  const JMat& gi = ev.ginv();
  const JMat& h = me.h_along();
  const JMat& d = me.dphi();
  JMat k(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Jet acc = Jet::constant(m, 0, 0.0);
      bool first = true;
      for (int p = 0; p < m; ++p) {
        Jet ph = Jet::constant(m, 0, 0.0);
        bool pfirst = true;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            Jet t = h.at(a, b) * d.at(a, p) * d.at(b, j);
            if (pfirst) {
              ph = std::move(t);
              pfirst = false;
            } else {
              ph += t;
            }
          }
        Jet t = gi.at(i, p) * ph;
        if (first) {
          acc = std::move(t);
          first = false;
        } else {
          acc += t;
        }
      }
      k.at(i, j) = std::move(acc);
    }
  const JVec vlow = geom::lower(ev, vf);
  const Jet vn2 = geom::inner(ev, vf, vf);
  const Jet inv_vn2 = jets::inverse(vn2);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      k.at(i, j) += vf[static_cast<std::size_t>(i)] * vlow[static_cast<std::size_t>(j)] * inv_vn2;
  const Jet det = geom::jmat_det(k);
  if (det.value() <= 1e-12)
    throw PreconditionError("submersion: the differential is rank-deficient transverse to V "
                            "(pseudo-determinant " + std::to_string(det.value()) + ")");
  const Jet prod = jets::sqrt(det);

  auto vlog = [&](const Jet& x) {
    // V(ln x)
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      s += vf[static_cast<std::size_t>(i)].value() * partial(x, i).value();
    return s / x.value();
  };

  const Jet grad_norm = jets::sqrt(geom::inner(ev, gf, gf));
  Jet closed_form = (m != 6) ? jets::pow(fj, 4, static_cast<long long>(m) - 6) * grad_norm
                             : fj * grad_norm * 2.0;

  ConditionReport a = make_report("subm_product", point, tol);
  a.residual = std::abs(prod.value() - closed_form.value());
  a.scale = std::max({1.0, prod.value(), std::abs(closed_form.value())});
  double dwant;
  if (m != 6) {
    dwant = (4.0 / (m - 6.0)) * vlog(fj);
  } else {
    double vdf = 0.0;
    for (int i = 0; i < m; ++i)
      vdf += vf[static_cast<std::size_t>(i)].value() * partial(fj, i).value();
    dwant = 2.0 * vdf;
  }
  const Jet vnorm_jet = jets::sqrt(vn2);
  const double dratio = vlog(prod) - vlog(vnorm_jet);
  a.terms = {{"singular_value_product", prod.value()},
             {"closed_form", closed_form.value()},
             {"derivative_form", std::abs(dratio - dwant)}};
  finish(a);

  ConditionReport b = make_report("subm_eigen", point, tol);
  const double divv = geom::divergence(ev, vf).value();
  b.residual = std::abs(divv + dratio);
  b.scale = std::max({1.0, std::abs(divv), std::abs(dratio)});
  b.terms = {{"divergence", divv}, {"log_derivative", dratio}};
  finish(b);
  return {std::move(a), std::move(b)};
}

}  // namespace biharm::cond
