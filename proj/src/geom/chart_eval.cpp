#include "biharm/geom/chart_eval.hpp"

#include <cmath>

#include "biharm/errors.hpp"

namespace biharm::geom {

using jets::partial;

ChartEval::ChartEval(const Chart& chart, std::span<const double> point, int budget)
    : chart_(&chart), point_(point.begin(), point.end()), budget_(budget) {
  chart.validate();
  if (point.size() != static_cast<std::size_t>(chart.dim))
    throw DimensionError("ChartEval: point dimension mismatch");
  if (budget < 1 || budget > jets::kMaxOrder)
    throw CapabilityError("ChartEval: derivative budget out of range");
  if (!chart.in_domain(point))
    throw DomainError("ChartEval: point outside chart domain '" + chart.name + "'");
  coords_ = jets::seed_point(point, budget);
}

Jet ChartEval::eval(const expr::Expr& e) const { return expr::eval(e, coords_); }

const JMat& ChartEval::g() const {
  if (!g_) {
    const int n = dim();
    JMat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m.at(i, j) = eval(chart_->g(i, j));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Jet d = m.at(i, j) - m.at(j, i);
        for (std::size_t r = 0; r < d.size(); ++r)
          if (std::abs(d.coeff(r)) > 1e-12)
            throw ConfigError("chart '" + chart_->name + "': metric is not symmetric");
      }
    g_ = std::move(m);
  }
  return *g_;
}

const JMat& ChartEval::ginv() const {
  if (!ginv_) ginv_ = jmat_inverse(g());
  return *ginv_;
}

const JT3& ChartEval::gamma() const {
  if (!gamma_) {
    const int n = dim();
    const JMat& gm = g();
    const JMat& gi = ginv();
    JT3 dg(n, n, n);  // dg.at(i, k, j) = d_i g_{kj}
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) dg.at(i, k, j) = partial(gm.at(k, j), i);
    JT3 gam(n, n, n);
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          Jet s = dg.at(i, 0, j) + dg.at(j, 0, i) - dg.at(0, i, j);
          Jet acc = gi.at(l, 0) * s;
          for (int k = 1; k < n; ++k) {
            s = dg.at(i, k, j) + dg.at(j, k, i) - dg.at(k, i, j);
            acc += gi.at(l, k) * s;
          }
          acc *= 0.5;
          gam.at(l, i, j) = acc;
          if (j != i) gam.at(l, j, i) = std::move(acc);
        }
    gamma_ = std::move(gam);
  }
  return *gamma_;
}

const JT4& ChartEval::riem() const {
  if (!riem_) {
    const int n = dim();
    const JT3& gam = gamma();
    JT4 r(n, n, n, n);
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            Jet v = partial(gam.at(l, j, k), i) - partial(gam.at(l, i, k), j);
            for (int m = 0; m < n; ++m)
              v += gam.at(l, i, m) * gam.at(m, j, k) - gam.at(l, j, m) * gam.at(m, i, k);
            r.at(l, k, i, j) = std::move(v);
          }
    riem_ = std::move(r);
  }
  return *riem_;
}

const JMat& ChartEval::ric() const {
  if (!ric_) {
    const int n = dim();
    const JT4& r = riem();
    JMat m(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Jet s = r.at(0, b, 0, a);
        for (int i = 1; i < n; ++i) s += r.at(i, b, i, a);
        m.at(a, b) = std::move(s);
      }
    ric_ = std::move(m);
  }
  return *ric_;
}

Jet ChartEval::scalar() const {
  const int n = dim();
  const JMat& gi = ginv();
  const JMat& rc = ric();
  Jet s = gi.at(0, 0) * rc.at(0, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == 0 && j == 0) continue;
      s += gi.at(i, j) * rc.at(i, j);
    }
  return s;
}

JVec grad(const ChartEval& ev, const Jet& f) {
  const int n = ev.dim();
  const JMat& gi = ev.ginv();
  JVec df(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) df[static_cast<std::size_t>(j)] = partial(f, j);
  JVec v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Jet s = gi.at(i, 0) * df[0];
    for (int j = 1; j < n; ++j) s += gi.at(i, j) * df[static_cast<std::size_t>(j)];
    v[static_cast<std::size_t>(i)] = std::move(s);
  }
  return v;
}

JMat hess(const ChartEval& ev, const Jet& f) {
  const int n = ev.dim();
  const JT3& gam = ev.gamma();
  JVec df(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) df[static_cast<std::size_t>(j)] = partial(f, j);
  JMat h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet s = partial(df[static_cast<std::size_t>(j)], i);
      for (int k = 0; k < n; ++k) s -= gam.at(k, i, j) * df[static_cast<std::size_t>(k)];
      h.at(i, j) = s;
      if (j != i) h.at(j, i) = std::move(s);
    }
  return h;
}

Jet laplacian(const ChartEval& ev, const Jet& f) {
  const int n = ev.dim();
  const JMat& gi = ev.ginv();
  const JMat h = hess(ev, f);
  Jet s = gi.at(0, 0) * h.at(0, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == 0 && j == 0) continue;
      s += gi.at(i, j) * h.at(i, j);
    }
  return s;
}

Jet divergence(const ChartEval& ev, const JVec& v) {
  const int n = ev.dim();
  const JT3& gam = ev.gamma();
  Jet s = partial(v[0], 0);
  for (int k = 1; k < n; ++k) s += partial(v[static_cast<std::size_t>(k)], k);
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a) s += gam.at(k, k, a) * v[static_cast<std::size_t>(a)];
  return s;
}

JMat nabla_vec(const ChartEval& ev, const JVec& v) {
  const int n = ev.dim();
  const JT3& gam = ev.gamma();
  JMat r(n, n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      Jet s = partial(v[static_cast<std::size_t>(k)], i);
      for (int a = 0; a < n; ++a) s += gam.at(k, i, a) * v[static_cast<std::size_t>(a)];
      r.at(k, i) = std::move(s);
    }
  return r;
}

JVec nabla_along(const ChartEval& ev, const JVec& x, const JVec& v) {
  const int n = ev.dim();
  const JMat nv = nabla_vec(ev, v);
  JVec r(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Jet s = nv.at(k, 0) * x[0];
    for (int i = 1; i < n; ++i) s += nv.at(k, i) * x[static_cast<std::size_t>(i)];
    r[static_cast<std::size_t>(k)] = std::move(s);
  }
  return r;
}

JVec rough_laplacian(const ChartEval& ev, const JVec& v) {
  const int n = ev.dim();
  const JT3& gam = ev.gamma();
  const JMat& gi = ev.ginv();
  const JMat nv = nabla_vec(ev, v);  // nv.at(k, j) = (nabla_j V)^k
  JVec r(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    Jet acc = Jet::constant(v[0].dim(), 0, 0.0);
    bool first = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        // (nabla_i nabla_j V)^l with the connection correction on the
        // direction slot.
        Jet t = partial(nv.at(l, j), i);
        for (int a = 0; a < n; ++a) t += gam.at(l, i, a) * nv.at(a, j);
        for (int k = 0; k < n; ++k) t -= gam.at(k, i, j) * nv.at(l, k);
        t = gi.at(i, j) * t;
        if (first) {
          acc = std::move(t);
          first = false;
        } else {
          acc += t;
        }
      }
    r[static_cast<std::size_t>(l)] = std::move(acc);
  }
  return r;
}

JMat lie_metric(const ChartEval& ev, const JVec& v) {
  const int n = ev.dim();
  const JMat& gm = ev.g();
  const JMat nv = nabla_vec(ev, v);
  JMat r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet s = nv.at(0, i) * gm.at(0, j) + nv.at(0, j) * gm.at(0, i);
      for (int k = 1; k < n; ++k) s += nv.at(k, i) * gm.at(k, j) + nv.at(k, j) * gm.at(k, i);
      r.at(i, j) = s;
      if (j != i) r.at(j, i) = std::move(s);
    }
  return r;
}

JT3 nabla_tensor11(const ChartEval& ev, const JMat& t) {
  const int n = ev.dim();
  const JT3& gam = ev.gamma();
  JT3 r(n, n, n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet s = partial(t.at(k, j), i);
        for (int a = 0; a < n; ++a)
          s += gam.at(k, i, a) * t.at(a, j) - gam.at(a, i, j) * t.at(k, a);
        r.at(k, i, j) = std::move(s);
      }
  return r;
}

JMat nabla_oneform(const ChartEval& ev, const JVec& w) {
  const int n = ev.dim();
  const JT3& gam = ev.gamma();
  JMat r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet s = partial(w[static_cast<std::size_t>(j)], i);
      for (int k = 0; k < n; ++k) s -= gam.at(k, i, j) * w[static_cast<std::size_t>(k)];
      r.at(i, j) = std::move(s);
    }
  return r;
}

JVec ricci_op(const ChartEval& ev, const JVec& v) {
  const int n = ev.dim();
  const JT4& rm = ev.riem();
  const JMat& gi = ev.ginv();
  JVec r(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    Jet acc = Jet::constant(v[0].dim(), 0, 0.0);
    bool first = true;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          Jet t = gi.at(b, c) * rm.at(l, c, a, b) * v[static_cast<std::size_t>(a)];
          if (first) {
            acc = std::move(t);
            first = false;
          } else {
            acc += t;
          }
        }
    r[static_cast<std::size_t>(l)] = std::move(acc);
  }
  return r;
}

Jet inner(const ChartEval& ev, const JVec& v, const JVec& w) {
  const int n = ev.dim();
  const JMat& gm = ev.g();
  Jet s = gm.at(0, 0) * v[0] * w[0];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == 0 && j == 0) continue;
      s += gm.at(i, j) * v[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
    }
  return s;
}

JVec lower(const ChartEval& ev, const JVec& v) {
  const int n = ev.dim();
  const JMat& gm = ev.g();
  JVec r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Jet s = gm.at(i, 0) * v[0];
    for (int j = 1; j < n; ++j) s += gm.at(i, j) * v[static_cast<std::size_t>(j)];
    r[static_cast<std::size_t>(i)] = std::move(s);
  }
  return r;
}

JVec raise(const ChartEval& ev, const JVec& w) {
  const int n = ev.dim();
  const JMat& gi = ev.ginv();
  JVec r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Jet s = gi.at(i, 0) * w[0];
    for (int j = 1; j < n; ++j) s += gi.at(i, j) * w[static_cast<std::size_t>(j)];
    r[static_cast<std::size_t>(i)] = std::move(s);
  }
  return r;
}

double vec_norm(const ChartEval& ev, const JVec& v) {
  const double q = inner(ev, v, v).value();
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

JVec mat_apply(const JMat& a, const JVec& v) {
  JVec r(static_cast<std::size_t>(a.rows));
  for (int i = 0; i < a.rows; ++i) {
    Jet s = a.at(i, 0) * v[0];
    for (int j = 1; j < a.cols; ++j) s += a.at(i, j) * v[static_cast<std::size_t>(j)];
    r[static_cast<std::size_t>(i)] = std::move(s);
  }
  return r;
}

JVec jvec_add(const JVec& a, const JVec& b) {
  JVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

JVec jvec_sub(const JVec& a, const JVec& b) {
  JVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

JVec jvec_scale(const JVec& a, double s) {
  JVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

}  // namespace biharm::geom
