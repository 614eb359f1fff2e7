#include "biharm/maps/maps.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "biharm/errors.hpp"

namespace biharm::maps {

namespace {

std::vector<double> values_of(const JVec& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].value();
  return r;
}

}  // namespace

void SmoothMap::validate() const {
  if (!domain || !codomain) throw ConfigError("map '" + name + "': missing domain or codomain chart");
  domain->validate();
  codomain->validate();
  const int n = codomain->chart.dim;
  if (components.size() != static_cast<std::size_t>(n))
    throw ConfigError("map '" + name + "': expected " + std::to_string(n) + " components, got " +
                      std::to_string(components.size()));
  for (const expr::Expr& e : components) {
    if (e.empty()) throw ConfigError("map '" + name + "': empty component");
    if (expr::var_count(e) > domain->chart.dim)
      throw ConfigError("map '" + name + "': component uses unknown domain coordinate");
  }
}

MapEval::MapEval(const SmoothMap& map, std::span<const double> point, int budget) : map_(&map) {
  map.validate();
  if (budget < 2 || budget > jets::kMaxOrder)
    throw CapabilityError("map evaluation budget must be in [2, " + std::to_string(jets::kMaxOrder) +
                          "], got " + std::to_string(budget));
  point_.assign(point.begin(), point.end());
  dom_.emplace(map.domain->chart, point, budget);
  phi_.reserve(map.components.size());
  for (const expr::Expr& e : map.components) phi_.push_back(dom_->eval(e));
  codom_.emplace(map.codomain->chart, values_of(phi_), budget - 1);
}

std::vector<double> MapEval::phi_value() const { return values_of(phi_); }

const JMat& MapEval::dphi() const {
  if (!dphi_) {
    const int n = dim_to(), m = dim_from();
    JMat d(n, m);
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < m; ++i) d.at(a, i) = partial(phi_[static_cast<std::size_t>(a)], i);
    dphi_ = std::move(d);
  }
  return *dphi_;
}

const JMat& MapEval::h_along() const {
  if (!h_along_) {
    const int n = dim_to();
    JMat h(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) h.at(a, b) = jets::compose(codom_->g().at(a, b), phi_);
    h_along_ = std::move(h);
  }
  return *h_along_;
}

const JT3& MapEval::gamma_along() const {
  if (!gamma_along_) {
    const int n = dim_to();
    JT3 t(n, n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) t.at(a, b, c) = jets::compose(codom_->gamma().at(a, b, c), phi_);
    gamma_along_ = std::move(t);
  }
  return *gamma_along_;
}

const JT4& MapEval::riem_along() const {
  if (!riem_along_) {
    const int n = dim_to();
    JT4 t(n, n, n, n);
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            t.at(l, k, a, b) = jets::compose(codom_->riem().at(l, k, a, b), phi_);
    riem_along_ = std::move(t);
  }
  return *riem_along_;
}

const JT3& MapEval::sff() const {
  if (!sff_) {
    const int n = dim_to(), m = dim_from();
    const JT3& gm = dom_->gamma();
    const JT3& gn = gamma_along();
    const JMat& d = dphi();
    JT3 s(n, m, m);
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
          Jet t = partial(d.at(a, i), j);
          for (int k = 0; k < m; ++k) t -= gm.at(k, i, j) * d.at(a, k);
          for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) t += gn.at(a, b, c) * d.at(b, i) * d.at(c, j);
          if (j < i) s.at(a, j, i) = t;
          s.at(a, i, j) = std::move(t);
        }
    sff_ = std::move(s);
  }
  return *sff_;
}

const JVec& MapEval::tension() const {
  if (!tension_) {
    const int n = dim_to(), m = dim_from();
    const JMat& gi = dom_->ginv();
    const JT3& s = sff();
    JVec t(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      Jet acc = gi.at(0, 0) * s.at(a, 0, 0);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          if (i == 0 && j == 0) continue;
          acc += gi.at(i, j) * s.at(a, i, j);
        }
      t[static_cast<std::size_t>(a)] = std::move(acc);
    }
    tension_ = std::move(t);
  }
  return *tension_;
}

JVec MapEval::pullback_nabla(int i, const JVec& w) const {
  const int n = dim_to();
  if (w.size() != static_cast<std::size_t>(n))
    throw DimensionError("pullback_nabla: field has wrong dimension");
  const JT3& gn = gamma_along();
  const JMat& d = dphi();
  JVec r(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    Jet acc = partial(w[static_cast<std::size_t>(a)], i);
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) acc += gn.at(a, b, c) * d.at(b, i) * w[static_cast<std::size_t>(c)];
    r[static_cast<std::size_t>(a)] = std::move(acc);
  }
  return r;
}

std::vector<double> MapEval::trace_pullback_second(const JVec& w) const {
  const int n = dim_to(), m = dim_from();
  const JMat& gi = dom_->ginv();
  const JT3& gm = dom_->gamma();
  std::vector<JVec> dw;
  dw.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) dw.push_back(pullback_nabla(j, w));
  std::vector<double> r(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double gij = gi.at(i, j).value();
      if (gij == 0.0) continue;
      const JVec ddw = pullback_nabla(i, dw[static_cast<std::size_t>(j)]);
      for (int a = 0; a < n; ++a) {
        double t = ddw[static_cast<std::size_t>(a)].value();
        for (int k = 0; k < m; ++k)
          t -= gm.at(k, i, j).value() * dw[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)].value();
        r[static_cast<std::size_t>(a)] += gij * t;
      }
    }
  return r;
}

std::vector<double> MapEval::ricci_pullback(const JVec& w) const {
  const int n = dim_to(), m = dim_from();
  if (w.size() != static_cast<std::size_t>(n))
    throw DimensionError("ricci_pullback: field has wrong dimension");
  const JMat& gi = dom_->ginv();
  const JT4& rm = riem_along();
  const JMat& d = dphi();
  std::vector<double> r(static_cast<std::size_t>(n), 0.0);
  for (int l = 0; l < n; ++l) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double gij = gi.at(i, j).value();
        if (gij == 0.0) continue;
        double s = 0.0;
        for (int k = 0; k < n; ++k)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              s += rm.at(l, k, a, b).value() * w[static_cast<std::size_t>(a)].value() *
                   d.at(b, i).value() * d.at(k, j).value();
        acc += gij * s;
      }
    r[static_cast<std::size_t>(l)] = acc;
  }
  return r;
}

std::vector<double> MapEval::bitension() const {
  const std::vector<double> second = trace_pullback_second(tension());
  const std::vector<double> ric = ricci_pullback(tension());
  std::vector<double> r(second.size());
  for (std::size_t a = 0; a < r.size(); ++a) r[a] = second[a] + ric[a];
  return r;
}

JVec MapEval::dphi_apply(const JVec& v) const {
  const int n = dim_to(), m = dim_from();
  if (v.size() != static_cast<std::size_t>(m))
    throw DimensionError("dphi_apply: vector has wrong dimension");
  const JMat& d = dphi();
  JVec r(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    Jet acc = d.at(a, 0) * v[0];
    for (int i = 1; i < m; ++i) acc += d.at(a, i) * v[static_cast<std::size_t>(i)];
    r[static_cast<std::size_t>(a)] = std::move(acc);
  }
  return r;
}

double MapEval::holomorphy_residual() const {
  if (!map_->domain->has_j() || !map_->codomain->has_j())
    throw CapabilityError("map '" + map_->name +
                          "': holomorphy residual requires complex structures on both charts");
  const int n = dim_to(), m = dim_from();
  const JMat& d = dphi();
  std::vector<double> jm(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      jm[static_cast<std::size_t>(k * m + i)] =
          dom_->eval(map_->domain->j[static_cast<std::size_t>(k * m + i)]).value();
  std::vector<double> jn(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      jn[static_cast<std::size_t>(a * n + b)] =
          codom_->eval(map_->codomain->j[static_cast<std::size_t>(a * n + b)]).value();
  double r = 0.0;
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += d.at(a, k).value() * jm[static_cast<std::size_t>(k * m + i)];
      for (int b = 0; b < n; ++b) s -= jn[static_cast<std::size_t>(a * n + b)] * d.at(b, i).value();
      r = std::max(r, std::abs(s));
    }
  return r;
}

double MapEval::dphi_norm() const {
  const int n = dim_to(), m = dim_from();
  const JMat& gi = dom_->ginv();
  const JMat& h = codom_->g();
  const JMat& d = dphi();
  double e = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double gij = gi.at(i, j).value();
      if (gij == 0.0) continue;
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          s += h.at(a, b).value() * d.at(a, i).value() * d.at(b, j).value();
      e += gij * s;
    }
  return std::sqrt(std::max(0.0, e));
}

double MapEval::tension_norm() const { return target_norm(values_of(tension())); }

double MapEval::scale() const {
  const double d = dphi_norm();
  return std::max({1.0, d * d * d, tension_norm() * d});
}

double MapEval::target_norm(std::span<const double> w) const {
  const int n = dim_to();
  if (w.size() != static_cast<std::size_t>(n))
    throw DimensionError("target_norm: vector has wrong dimension");
  const JMat& h = codom_->g();
  double s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      s += h.at(a, b).value() * w[static_cast<std::size_t>(a)] * w[static_cast<std::size_t>(b)];
  return std::sqrt(std::max(0.0, s));
}

ChainReport MapEval::chain_formula(const JVec& v) const {
  const int n = dim_to(), m = dim_from();
  if (v.size() != static_cast<std::size_t>(m))
    throw DimensionError("chain_formula: vector field has wrong dimension");
  ChainReport rep;

  const JVec w = dphi_apply(v);
  const std::vector<double> second = trace_pullback_second(w);
  const std::vector<double> ric = ricci_pullback(w);
  rep.lhs.resize(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    rep.lhs[static_cast<std::size_t>(a)] =
        second[static_cast<std::size_t>(a)] + ric[static_cast<std::size_t>(a)];

  const JVec dom_second =
      geom::jvec_add(geom::rough_laplacian(*dom_, v), geom::ricci_op(*dom_, v));
  rep.via_domain = values_of(dphi_apply(dom_second));

  rep.via_tension.assign(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < m; ++k) {
    const double vk = v[static_cast<std::size_t>(k)].value();
    if (vk == 0.0) continue;
    const JVec dk = pullback_nabla(k, tension());
    for (int a = 0; a < n; ++a)
      rep.via_tension[static_cast<std::size_t>(a)] += vk * dk[static_cast<std::size_t>(a)].value();
  }

  const JMat dv = geom::nabla_vec(*dom_, v);
  const JMat& gi = dom_->ginv();
  const JT3& s = sff();
  rep.via_second_fundamental.assign(static_cast<std::size_t>(n), 0.0);
  for (int a = 0; a < n; ++a) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double gij = gi.at(i, j).value();
        if (gij == 0.0) continue;
        for (int k = 0; k < m; ++k)
          acc += gij * s.at(a, i, k).value() * dv.at(k, j).value();
      }
    rep.via_second_fundamental[static_cast<std::size_t>(a)] = 2.0 * acc;
  }

  std::vector<double> diff(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const auto ai = static_cast<std::size_t>(a);
    diff[ai] = rep.lhs[ai] - rep.via_domain[ai] - rep.via_tension[ai] - rep.via_second_fundamental[ai];
  }
  rep.residual = target_norm(diff);
  rep.scale = std::max(1.0, target_norm(rep.lhs) + target_norm(rep.via_domain) +
                                target_norm(rep.via_tension) + target_norm(rep.via_second_fundamental));
  return rep;
}

SigmaReport MapEval::bitension_via_sigma() const {
  const double hol = holomorphy_residual();
  if (hol > 1e-8)
    throw PreconditionError("map '" + map_->name + "': holomorphy residual " + std::to_string(hol) +
                            " exceeds 1e-8; the Lee-field route applies to holomorphic maps only");
  const int n = dim_to(), m = dim_from();
  herm::HermEval he(*map_->domain, point_);
  const JVec& sigma = he.lee().sigma;
  const JT3& s = sff();
  const JMat& d = dphi();

  SigmaReport rep;
  std::vector<double> t1(static_cast<std::size_t>(n), 0.0), t2 = t1, t3 = t1, t4 = t1;

  const JVec u = geom::jvec_add(geom::rough_laplacian(*dom_, sigma), geom::ricci_op(*dom_, sigma));
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < m; ++k)
      t1[static_cast<std::size_t>(a)] -= d.at(a, k).value() * u[static_cast<std::size_t>(k)].value();

  for (int a = 0; a < n; ++a)
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l)
        t2[static_cast<std::size_t>(a)] += s.at(a, k, l).value() *
                                           sigma[static_cast<std::size_t>(k)].value() *
                                           sigma[static_cast<std::size_t>(l)].value();

  const JVec dss = geom::nabla_along(*dom_, sigma, sigma);
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < m; ++k)
      t3[static_cast<std::size_t>(a)] += d.at(a, k).value() * dss[static_cast<std::size_t>(k)].value();

  const herm::CVec sigma_c = herm::complexify(sigma);
  std::vector<std::complex<double>> acc(static_cast<std::size_t>(n), 0.0);
  for (const herm::CVec& z : he.hermitian_frame()) {
    const herm::CVec zbar = herm::cvec_conj(z);
    const herm::CVec dzbar_sigma = herm::c_nabla_along(*dom_, zbar, sigma_c);
    const herm::CVec dz_sigma = herm::c_nabla_along(*dom_, z, sigma_c);
    for (int a = 0; a < n; ++a)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const auto ks = static_cast<std::size_t>(k), ls = static_cast<std::size_t>(l);
          acc[static_cast<std::size_t>(a)] +=
              s.at(a, k, l).value() *
              (z[ks].value() * dzbar_sigma[ls].value() + zbar[ks].value() * dz_sigma[ls].value());
        }
  }
  for (int a = 0; a < n; ++a) {
    t4[static_cast<std::size_t>(a)] = -2.0 * acc[static_cast<std::size_t>(a)].real();
    rep.imag_max = std::max(rep.imag_max, 2.0 * std::abs(acc[static_cast<std::size_t>(a)].imag()));
  }

  rep.value.resize(static_cast<std::size_t>(n));
  for (std::size_t a = 0; a < rep.value.size(); ++a) rep.value[a] = t1[a] + t2[a] + t3[a] + t4[a];
  rep.laplacian_term = target_norm(t1);
  rep.hessian_term = target_norm(t2);
  rep.transport_term = target_norm(t3);
  rep.mixed_trace_term = target_norm(t4);
  return rep;
}

}  // namespace biharm::maps
