#include "biharm/herm/hermitian.hpp"

#include <cmath>

#include "biharm/errors.hpp"

namespace biharm::herm {

namespace {

double max_abs_coeffs(const Jet& j) {
  double m = 0.0;
  for (std::size_t k = 0; k < j.size(); ++k) m = std::max(m, std::abs(j.coeff(k)));
  return m;
}

}  // namespace

void HermitianChart::validate() const {
  chart.validate();
  if (j.empty()) return;
  if (j.size() != static_cast<std::size_t>(chart.dim) * static_cast<std::size_t>(chart.dim))
    throw ConfigError("chart '" + chart.name + "': complex structure must have dim*dim entries");
  for (const expr::Expr& e : j) {
    if (e.empty()) throw ConfigError("chart '" + chart.name + "': empty complex-structure entry");
    if (expr::var_count(e) > chart.dim)
      throw ConfigError("chart '" + chart.name + "': complex structure uses unknown coordinate");
  }
}

CVec complexify(const JVec& v) {
  CVec r;
  r.reserve(v.size());
  for (const Jet& x : v) r.emplace_back(x);
  return r;
}

CVec cvec_add(const CVec& a, const CVec& b) {
  CVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

CVec cvec_sub(const CVec& a, const CVec& b) {
  CVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

CVec cvec_scale(const CVec& a, std::complex<double> s) {
  CVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

CVec cvec_conj(const CVec& a) {
  CVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = conj(a[i]);
  return r;
}

CVec cmat_apply(const JMat& a, const CVec& v) {
  CVec r(static_cast<std::size_t>(a.rows));
  for (int i = 0; i < a.rows; ++i) {
    CJet s = a.at(i, 0) * v[0];
    for (int j = 1; j < a.cols; ++j) s += a.at(i, j) * v[static_cast<std::size_t>(j)];
    r[static_cast<std::size_t>(i)] = std::move(s);
  }
  return r;
}

CJet c_inner(const ChartEval& ev, const CVec& v, const CVec& w) {
  const int n = ev.dim();
  const JMat& g = ev.g();
  CJet s = g.at(0, 0) * (v[0] * w[0]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == 0 && j == 0) continue;
      s += g.at(i, j) * (v[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)]);
    }
  return s;
}

CVec c_nabla_along(const ChartEval& ev, const CVec& u, const CVec& w) {
  const int n = ev.dim();
  const geom::JT3& gam = ev.gamma();
  CVec r(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    CJet acc;
    bool first = true;
    for (int i = 0; i < n; ++i) {
      CJet t = partial(w[static_cast<std::size_t>(k)], i);
      for (int a = 0; a < n; ++a) t += gam.at(k, i, a) * w[static_cast<std::size_t>(a)];
      t = u[static_cast<std::size_t>(i)] * t;
      if (first) {
        acc = std::move(t);
        first = false;
      } else {
        acc += t;
      }
    }
    r[static_cast<std::size_t>(k)] = std::move(acc);
  }
  return r;
}

HermEval::HermEval(const HermitianChart& hc, std::span<const double> point, int budget) : hc_(&hc) {
  hc.validate();
  if (!hc.has_j())
    throw ConfigError("chart '" + hc.chart.name + "': complex structure required but not declared");
  ev_.emplace(hc.chart, point, budget);
}

const JMat& HermEval::J() const {
  if (!j_) {
    const int n = dim();
    JMat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        m.at(i, k) = ev_->eval(hc_->j[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)]);
    j_ = std::move(m);
  }
  return *j_;
}

const JT3& HermEval::nablaJ() const {
  if (!nabla_j_) nabla_j_ = geom::nabla_tensor11(*ev_, J());
  return *nabla_j_;
}

const JMat& HermEval::omega() const {
  if (!omega_) {
    const int n = dim();
    const JMat& g = ev_->g();
    const JMat& j = J();
    JMat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < n; ++jj) {
        Jet s = g.at(i, 0) * j.at(0, jj);
        for (int k = 1; k < n; ++k) s += g.at(i, k) * j.at(k, jj);
        m.at(i, jj) = std::move(s);
      }
    omega_ = std::move(m);
  }
  return *omega_;
}

const JT3& HermEval::d_omega() const {
  if (!d_omega_) {
    const int n = dim();
    const JMat& om = omega();
    JT3 d(n, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          d.at(i, j, k) = jets::partial(om.at(j, k), i) - jets::partial(om.at(i, k), j) + jets::partial(om.at(i, j), k);
    d_omega_ = std::move(d);
  }
  return *d_omega_;
}

HermEval::StructureResiduals HermEval::structure_residuals() const {
  const int n = dim();
  const JMat& j = J();
  StructureResiduals r{0.0, 0.0, 0.0};
  // J^2 + I
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      Jet s = j.at(i, 0) * j.at(0, k);
      for (int a = 1; a < n; ++a) s += j.at(i, a) * j.at(a, k);
      if (i == k) s += 1.0;
      r.j_squared = std::max(r.j_squared, max_abs_coeffs(s));
    }
  // J^T g J - g
  const JMat& g = ev_->g();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      Jet s = -g.at(i, k);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) s += j.at(a, i) * g.at(a, b) * j.at(b, k);
      r.compatibility = std::max(r.compatibility, max_abs_coeffs(s));
    }
  // Nijenhuis tensor from coordinate partials.
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int jj = i + 1; jj < n; ++jj) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) {
          s += j.at(a, i).value() * jets::partial(j.at(k, jj), a).value();
          s -= j.at(a, jj).value() * jets::partial(j.at(k, i), a).value();
          s += j.at(k, a).value() * jets::partial(j.at(a, i), jj).value();
          s -= j.at(k, a).value() * jets::partial(j.at(a, jj), i).value();
        }
        r.nijenhuis = std::max(r.nijenhuis, std::abs(s));
      }
  return r;
}

const HermEval::LeeData& HermEval::lee() const {
  if (!lee_) {
    const int n = dim();
    if (n == 2) throw DimensionError("lee(): Lee field is not defined in dimension two");
    const JT3& nj = nablaJ();
    const JMat& gi = ev_->ginv();
    JVec divj(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      Jet s = gi.at(0, 0) * nj.at(k, 0, 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == 0 && j == 0) continue;
          s += gi.at(i, j) * nj.at(k, i, j);
        }
      divj[static_cast<std::size_t>(k)] = std::move(s);
    }
    LeeData d;
    d.sigma = geom::mat_apply(J(), divj);
    d.b = geom::jvec_scale(d.sigma, 2.0 / (2.0 - static_cast<double>(n)));
    d.theta = geom::lower(*ev_, d.b);
    lee_ = std::move(d);
  }
  return *lee_;
}

HermEval::ClassResiduals HermEval::class_residuals() const {
  const int n = dim();
  const JT3& dom = d_omega();
  const JMat& om = omega();
  const LeeData& ld = lee();
  ClassResiduals r{0, 0, 0, 0, 0, 1.0};
  double wedge_max = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double d = dom.at(i, j, k).value();
        const double w = ld.theta[static_cast<std::size_t>(i)].value() * om.at(j, k).value() -
                         ld.theta[static_cast<std::size_t>(j)].value() * om.at(i, k).value() +
                         ld.theta[static_cast<std::size_t>(k)].value() * om.at(i, j).value();
        r.kahler = std::max(r.kahler, std::abs(d));
        r.lck = std::max(r.lck, std::abs(d - w));
        wedge_max = std::max(wedge_max, std::abs(w));
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double dt = jets::partial(ld.theta[static_cast<std::size_t>(j)], i).value() -
                        jets::partial(ld.theta[static_cast<std::size_t>(i)], j).value();
      r.dtheta = std::max(r.dtheta, std::abs(dt));
    }
  r.cosymplectic = geom::vec_norm(*ev_, ld.sigma);
  // (1,2)-component of d omega over the Hermitian frame; a pointwise scalar,
  // so contract values only.
  const std::vector<CVec> zf = hermitian_frame();
  const std::size_t nz = zf.size();
  std::vector<std::vector<std::complex<double>>> zv(nz), cv(nz);
  for (std::size_t a = 0; a < nz; ++a) {
    zv[a].resize(static_cast<std::size_t>(n));
    cv[a].resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      zv[a][static_cast<std::size_t>(i)] = zf[a][static_cast<std::size_t>(i)].value();
      cv[a][static_cast<std::size_t>(i)] = std::conj(zv[a][static_cast<std::size_t>(i)]);
    }
  }
  for (std::size_t a = 0; a < nz; ++a) {
    // stage the contraction: first slot, then the two conjugate slots
    std::vector<std::complex<double>> t1(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        std::complex<double> s = 0.0;
        for (int i = 0; i < n; ++i) s += dom.at(i, j, k).value() * zv[a][static_cast<std::size_t>(i)];
        t1[static_cast<std::size_t>(j * n + k)] = s;
      }
    for (std::size_t b = 0; b < nz; ++b) {
      std::vector<std::complex<double>> t2(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) {
        std::complex<double> s = 0.0;
        for (int j = 0; j < n; ++j) s += t1[static_cast<std::size_t>(j * n + k)] * cv[b][static_cast<std::size_t>(j)];
        t2[static_cast<std::size_t>(k)] = s;
      }
      for (std::size_t c = 0; c < nz; ++c) {
        std::complex<double> s = 0.0;
        for (int k = 0; k < n; ++k) s += t2[static_cast<std::size_t>(k)] * cv[c][static_cast<std::size_t>(k)];
        r.one_two_symplectic = std::max(r.one_two_symplectic, std::abs(s));
      }
    }
  }
  r.scale = std::max({1.0, r.kahler, wedge_max});
  return r;
}

HermEval::StarData HermEval::star() const {
  const int n = dim();
  const geom::JT4& rm = ev_->riem();
  const JMat& j = J();
  const JMat& gi = ev_->ginv();
  StarData d;
  d.ric_star = JMat(n, n);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) {
      Jet s = Jet::constant(n, 0, 0.0);
      bool first = true;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) {
            Jet t = j.at(b, a) * j.at(c, jj) * rm.at(a, c, i, b);
            if (first) {
              s = std::move(t);
              first = false;
            } else {
              s += t;
            }
          }
      d.ric_star.at(i, jj) = std::move(s);
    }
  d.s = 0.0;
  d.s_star = 0.0;
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) {
      d.s += gi.at(i, jj).value() * ev_->ric().at(i, jj).value();
      d.s_star += gi.at(i, jj).value() * d.ric_star.at(i, jj).value();
    }
  const LeeData& ld = lee();
  d.delta_theta = -geom::divergence(*ev_, ld.b).value();
  d.theta_norm2 = geom::inner(*ev_, ld.b, ld.b).value();
  return d;
}

JVec HermEval::nabla_j_apply(const JVec& x, const JVec& y) const {
  const int n = dim();
  const JT3& nj = nablaJ();
  JVec r(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Jet acc = Jet::constant(n, 0, 0.0);
    bool first = true;
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < n; ++jj) {
        Jet t = nj.at(k, i, jj) * x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(jj)];
        if (first) {
          acc = std::move(t);
          first = false;
        } else {
          acc += t;
        }
      }
    r[static_cast<std::size_t>(k)] = std::move(acc);
  }
  return r;
}

JVec HermEval::lck_nabla_j(const JVec& x, const JVec& y) const {
  const LeeData& ld = lee();
  const JMat& j = J();
  const JMat& om = omega();
  const JVec jy = geom::mat_apply(j, y);
  const JVec jx = geom::mat_apply(j, x);
  const JVec jb = geom::mat_apply(j, ld.b);
  // theta(JY), theta(Y), g(X,Y), omega(X,Y)
  Jet th_jy = ld.theta[0] * jy[0];
  Jet th_y = ld.theta[0] * y[0];
  for (std::size_t a = 1; a < jy.size(); ++a) {
    th_jy += ld.theta[a] * jy[a];
    th_y += ld.theta[a] * y[a];
  }
  const Jet gxy = geom::inner(*ev_, x, y);
  const int n = dim();
  Jet oxy = om.at(0, 0) * x[0] * y[0];
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == 0 && b == 0) continue;
      oxy += om.at(a, b) * x[static_cast<std::size_t>(a)] * y[static_cast<std::size_t>(b)];
    }
  JVec r(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Jet s = th_jy * x[static_cast<std::size_t>(k)] - th_y * jx[static_cast<std::size_t>(k)] +
            gxy * jb[static_cast<std::size_t>(k)] - oxy * ld.b[static_cast<std::size_t>(k)];
    s *= 0.5;
    r[static_cast<std::size_t>(k)] = std::move(s);
  }
  return r;
}

const std::vector<JVec>& HermEval::adapted_frame() const {
  if (!frame_) frame_ = geom::j_adapted_frame(*ev_, J());
  return *frame_;
}

std::vector<CVec> HermEval::hermitian_frame() const {
  const std::vector<JVec>& fr = adapted_frame();
  const JMat& j = J();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<CVec> z;
  z.reserve(fr.size() / 2);
  for (std::size_t p = 0; p + 1 < fr.size(); p += 2) {
    const JVec& e = fr[p];
    const JVec je = geom::mat_apply(j, e);
    CVec za(e.size());
    for (std::size_t k = 0; k < e.size(); ++k)
      za[k] = CJet(e[k] * inv_sqrt2, je[k] * (-inv_sqrt2));
    z.push_back(std::move(za));
  }
  return z;
}

}  // namespace biharm::herm
