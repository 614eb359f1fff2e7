#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "biharm/geom/chart_eval.hpp"
#include "biharm/geom/frames.hpp"
#include "chart_helpers.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace biharm;
using namespace biharm::geom;
using chart_helpers::make_chart;
using chart_helpers::TestRng;

namespace {

Chart polar_chart() {
  return make_chart("polar", {"r", "t"}, {"1", "0", "0", "r^2"}, {0.6, 0.1}, {2.5, 6.2}, {"r - 0.2"});
}

Chart sphere2_chart() {
  return make_chart("sphere2", {"th", "ph"}, {"1", "0", "0", "sin(th)^2"}, {0.3, 0.1}, {2.8, 6.0},
                    {"sin(th) - 0.05"});
}

Chart halfplane_chart() {
  return make_chart("halfplane", {"x", "y"}, {"1/y^2", "0", "0", "1/y^2"}, {-2.0, 0.4}, {2.0, 3.0},
                    {"y - 0.2"});
}

Chart sphere3_chart() {
  return make_chart("sphere3", {"th", "p1", "p2"},
                    {"1", "0", "0", "0", "cos(th)^2", "0", "0", "0", "sin(th)^2"}, {0.2, 0.1, 0.1},
                    {1.35, 6.0, 6.0}, {"th - 0.05", "pi/2 - th - 0.05"});
}

Chart flat4_chart() {
  return make_chart("flat4", {"x1", "x2", "x3", "x4"},
                    {"1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "1"},
                    {-2, -2, -2, -2}, {2, 2, 2, 2});
}

// Conformally flat four-dimensional chart, g = q^-2 delta with
// q = (x1^2+x2^2+x3^2+x4^2).
Chart conformal4_chart() {
  const std::string q = "(x1^2+x2^2+x3^2+x4^2)";
  std::vector<std::string> m(16, "0");
  for (int i = 0; i < 4; ++i) m[static_cast<std::size_t>(i * 4 + i)] = q + "^(-2)";
  return make_chart("conformal4", {"x1", "x2", "x3", "x4"}, m, {-2, -2, -2, -2}, {2, 2, 2, 2},
                    {"x1^2+x2^2+x3^2+x4^2 - 0.3"});
}

std::vector<double> sample_point(const Chart& c, TestRng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> p(static_cast<std::size_t>(c.dim));
    for (int i = 0; i < c.dim; ++i)
      p[static_cast<std::size_t>(i)] = rng.in(c.region.lo[static_cast<std::size_t>(i)], c.region.hi[static_cast<std::size_t>(i)]);
    if (c.in_domain(p)) return p;
  }
  FAIL("sample_point: could not sample chart region");
  return {};
}

double lowered_riem(const ChartEval& ev, int i, int j, int k, int l) {
  // g(R(d_i, d_j) d_k, d_l)
  double s = 0.0;
  for (int m = 0; m < ev.dim(); ++m) s += ev.g().at(m, l).value() * ev.riem().at(m, k, i, j).value();
  return s;
}

}  // namespace

TEST_CASE("dense double LU: solve, inverse, determinant") {
  const std::vector<double> a = {4, 2, 0.6, 2, 5, 1.5, 0.6, 1.5, 3};
  const Lu lu = lu_factor(3, a);
  const std::vector<double> x = lu_solve(lu, {1.0, -2.0, 0.5});
  // residual A x - b
  const std::vector<double> b = {1.0, -2.0, 0.5};
  for (int i = 0; i < 3; ++i) {
    double s = 0;
    for (int j = 0; j < 3; ++j) s += a[static_cast<std::size_t>(i * 3 + j)] * x[static_cast<std::size_t>(j)];
    CHECK(s == doctest::Approx(b[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }
  const std::vector<double> inv = mat_inverse(3, a);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a[static_cast<std::size_t>(i * 3 + k)] * inv[static_cast<std::size_t>(k * 3 + j)];
      CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
  // det by cofactor expansion of the same matrix
  const double det = 4 * (5 * 3 - 1.5 * 1.5) - 2 * (2 * 3 - 1.5 * 0.6) + 0.6 * (2 * 1.5 - 5 * 0.6);
  CHECK(mat_det(3, a) == doctest::Approx(det).epsilon(1e-12));
  CHECK(mat_det(2, {1, 2, 2, 4}) == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)lu_factor(2, {1, 2, 2, 4}), PreconditionError);
}

TEST_CASE("jet matrix inverse and determinant against closed forms") {
  const Chart c = polar_chart();
  const double r0 = 1.7, t0 = 0.9;
  ChartEval ev(c, std::array<double, 2>{r0, t0}, 3);

  SUBCASE("inverse of diag(1, r^2) is diag(1, r^-2) as jets") {
    const JMat& gi = ev.ginv();
    const Jet want = ev.eval(expr::parse("r^(-2)", c.coords));
    for (std::size_t k = 0; k < want.size(); ++k) {
      CHECK(gi.at(1, 1).coeff(k) == doctest::Approx(want.coeff(k)).epsilon(1e-12));
      CHECK(gi.at(0, 1).coeff(k) == doctest::Approx(0.0));
      CHECK(gi.at(0, 0).coeff(k) == doctest::Approx(k == 0 ? 1.0 : 0.0));
    }
  }

  SUBCASE("determinant jet of diag(1, r^2) is r^2") {
    const Jet d = jmat_det(ev.g());
    const Jet want = ev.eval(expr::parse("r^2", c.coords));
    for (std::size_t k = 0; k < want.size(); ++k)
      CHECK(d.coeff(k) == doctest::Approx(want.coeff(k)).epsilon(1e-12));
  }

  SUBCASE("determinant with off-diagonal entries and pivoting") {
    // [[0, r], [r, t]] has zero leading pivot; det = -r^2.
    JMat m(2, 2);
    m.at(0, 0) = Jet::constant(2, 3, 0.0);
    m.at(0, 1) = ev.coords()[0];
    m.at(1, 0) = ev.coords()[0];
    m.at(1, 1) = ev.coords()[1];
    const Jet d = jmat_det(m);
    const Jet want = ev.eval(expr::parse("-r^2", c.coords));
    for (std::size_t k = 0; k < want.size(); ++k)
      CHECK(d.coeff(k) == doctest::Approx(want.coeff(k)).epsilon(1e-12));
  }
}

TEST_CASE("Christoffel symbols of the polar plane") {
  const Chart c = polar_chart();
  ChartEval ev(c, std::array<double, 2>{2.0, 1.2}, 3);
  const JT3& gam = ev.gamma();
  CHECK(gam.at(0, 1, 1).value() == doctest::Approx(-2.0));        // Gamma^r_tt = -r
  CHECK(gam.at(1, 0, 1).value() == doctest::Approx(0.5));         // Gamma^t_rt = 1/r
  CHECK(gam.at(1, 1, 0).value() == doctest::Approx(0.5));
  CHECK(gam.at(0, 0, 0).value() == doctest::Approx(0.0));
  CHECK(gam.at(1, 1, 1).value() == doctest::Approx(0.0));
  // Flat plane: curvature vanishes including derivative coefficients.
  const JT4& r = ev.riem();
  for (const Jet& v : r.a)
    for (std::size_t k = 0; k < v.size(); ++k) CHECK(std::abs(v.coeff(k)) < 1e-12);
}

TEST_CASE("conformal metric Christoffel identity on R^4") {
  // For g = e^{2u} delta: Gamma^k_ij = d_j u delta^k_i + d_i u delta^k_j - d_k u delta_ij.
  const Chart c = conformal4_chart();
  TestRng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<double> p = sample_point(c, rng);
    ChartEval ev(c, p, 3);
    const Jet u = ev.eval(expr::parse("-ln(x1^2+x2^2+x3^2+x4^2)", c.coords));
    std::array<double, 4> du{};
    for (int i = 0; i < 4; ++i) du[static_cast<std::size_t>(i)] = jets::partial(u, i).value();
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double want = 0.0;
          if (k == i) want += du[static_cast<std::size_t>(j)];
          if (k == j) want += du[static_cast<std::size_t>(i)];
          if (i == j) want -= du[static_cast<std::size_t>(k)];
          CHECK(ev.gamma().at(k, i, j).value() == doctest::Approx(want).epsilon(1e-10));
        }
  }
}

TEST_CASE("curvature of model spaces") {
  TestRng rng(23);

  SUBCASE("unit two-sphere: sectional +1, scalar 2, Einstein") {
    const Chart c = sphere2_chart();
    for (int trial = 0; trial < 4; ++trial) {
      const std::vector<double> p = sample_point(c, rng);
      ChartEval ev(c, p, 3);
      const double g11 = ev.g().at(0, 0).value(), g22 = ev.g().at(1, 1).value();
      const double sec = lowered_riem(ev, 0, 1, 1, 0) / (g11 * g22);
      CHECK(sec == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(ev.scalar().value() == doctest::Approx(2.0).epsilon(1e-8));
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          CHECK(ev.ric().at(a, b).value() == doctest::Approx(ev.g().at(a, b).value()).epsilon(1e-8));
    }
  }

  SUBCASE("hyperbolic half-plane: scalar -2") {
    const Chart c = halfplane_chart();
    for (int trial = 0; trial < 4; ++trial) {
      ChartEval ev(c, sample_point(c, rng), 3);
      CHECK(ev.scalar().value() == doctest::Approx(-2.0).epsilon(1e-8));
    }
  }

  SUBCASE("round three-sphere: Ricci operator is 2 Id") {
    const Chart c = sphere3_chart();
    for (int trial = 0; trial < 3; ++trial) {
      ChartEval ev(c, sample_point(c, rng), 3);
      JVec v(3);
      for (int i = 0; i < 3; ++i)
        v[static_cast<std::size_t>(i)] = Jet::constant(3, 3, 0.4 + 0.3 * i - 0.2 * rng.next());
      const JVec rv = ricci_op(ev, v);
      for (int i = 0; i < 3; ++i)
        CHECK(rv[static_cast<std::size_t>(i)].value() == doctest::Approx(2.0 * v[static_cast<std::size_t>(i)].value()).epsilon(1e-8));
      CHECK(ev.scalar().value() == doctest::Approx(6.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("curvature tensor identities on a non-trivial chart") {
  const Chart c = conformal4_chart();
  TestRng rng(37);
  for (int trial = 0; trial < 6; ++trial) {
    ChartEval ev(c, sample_point(c, rng), 3);
    double mag = 1.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) mag = std::max(mag, std::abs(lowered_riem(ev, i, j, k, l)));
    const double tol = 1e-8 * mag;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            const double r = lowered_riem(ev, i, j, k, l);
            CHECK(std::abs(r + lowered_riem(ev, j, i, k, l)) < tol);
            CHECK(std::abs(r + lowered_riem(ev, i, j, l, k)) < tol);
            CHECK(std::abs(r - lowered_riem(ev, k, l, i, j)) < tol);
            CHECK(std::abs(r + lowered_riem(ev, j, k, i, l) + lowered_riem(ev, k, i, j, l)) < tol);
          }
    // Metric compatibility: nabla_k g = 0.
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double s = jets::partial(ev.g().at(i, j), k).value();
          for (int a = 0; a < 4; ++a)
            s -= ev.gamma().at(a, k, i).value() * ev.g().at(a, j).value() +
                 ev.gamma().at(a, k, j).value() * ev.g().at(i, a).value();
          CHECK(std::abs(s) < 1e-10);
        }
    // Ricci symmetric and consistent with the operator form.
    JVec v(4), w(4);
    for (int i = 0; i < 4; ++i) {
      v[static_cast<std::size_t>(i)] = Jet::constant(4, 3, rng.in(-1, 1));
      w[static_cast<std::size_t>(i)] = Jet::constant(4, 3, rng.in(-1, 1));
    }
    double ric_vw = 0, ric_wv = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        ric_vw += ev.ric().at(a, b).value() * v[static_cast<std::size_t>(a)].value() * w[static_cast<std::size_t>(b)].value();
        ric_wv += ev.ric().at(a, b).value() * w[static_cast<std::size_t>(a)].value() * v[static_cast<std::size_t>(b)].value();
      }
    CHECK(ric_vw == doctest::Approx(ric_wv).epsilon(1e-9));
    const double op_vw = inner(ev, ricci_op(ev, v), w).value();
    CHECK(op_vw == doctest::Approx(ric_vw).epsilon(1e-8));
  }
}

TEST_CASE("Christoffel and curvature against a finite-difference pipeline") {
  const Chart c = conformal4_chart();
  const std::vector<double> p = {0.7, -0.4, 0.5, 0.6};
  ChartEval ev(c, p, 3);
  const int n = 4;

  // Plain double metric evaluation.
  auto gmat = [&](std::span<const double> x) {
    std::vector<double> m(16);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(i * 4 + j)] = expr::eval(c.g(i, j), x);
    return m;
  };
  // FD Christoffel at x.
  auto gamma_fd = [&](std::span<const double> x) {
    std::vector<double> dg(64);  // dg[k][i][j] = d_k g_ij
    for (int k = 0; k < n; ++k) {
      const std::array<int, 1> dvar = {k};
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          oracles::Field f = [&, i, j](std::span<const double> y) { return expr::eval(c.g(i, j), y); };
          dg[static_cast<std::size_t>((k * 4 + i) * 4 + j)] = oracles::fd_partial(f, x, dvar);
        }
    }
    const std::vector<double> gi = mat_inverse(n, gmat(x));
    std::vector<double> gam(64);
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = 0;
          for (int k = 0; k < n; ++k)
            s += gi[static_cast<std::size_t>(l * 4 + k)] *
                 (dg[static_cast<std::size_t>((i * 4 + k) * 4 + j)] + dg[static_cast<std::size_t>((j * 4 + k) * 4 + i)] -
                  dg[static_cast<std::size_t>((k * 4 + i) * 4 + j)]);
          gam[static_cast<std::size_t>((l * 4 + i) * 4 + j)] = 0.5 * s;
        }
    return gam;
  };

  const std::vector<double> gam0 = gamma_fd(p);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(ev.gamma().at(l, i, j).value() ==
              doctest::Approx(gam0[static_cast<std::size_t>((l * 4 + i) * 4 + j)]).epsilon(1e-6));

  // FD curvature from FD Christoffel (nested differencing, loose tolerance).
  auto gam_entry = [&](int l, int i, int j) {
    return [&, l, i, j](std::span<const double> x) {
      return gamma_fd(x)[static_cast<std::size_t>((l * 4 + i) * 4 + j)];
    };
  };
  for (const auto [l, k, i, j] : std::vector<std::array<int, 4>>{{0, 1, 0, 1}, {2, 3, 2, 3}, {1, 2, 1, 2}, {0, 2, 1, 3}}) {
    oracles::Field fjk = gam_entry(l, j, k);
    oracles::Field fik = gam_entry(l, i, k);
    const std::array<int, 1> di = {i}, dj = {j};
    double r = oracles::fd_partial(fjk, p, di) - oracles::fd_partial(fik, p, dj);
    for (int m = 0; m < n; ++m)
      r += gam0[static_cast<std::size_t>((l * 4 + i) * 4 + m)] * gam0[static_cast<std::size_t>((m * 4 + j) * 4 + k)] -
           gam0[static_cast<std::size_t>((l * 4 + j) * 4 + m)] * gam0[static_cast<std::size_t>((m * 4 + i) * 4 + k)];
    CHECK(ev.riem().at(l, k, i, j).value() == doctest::Approx(r).epsilon(5e-4));
  }
}

TEST_CASE("scalar field calculus") {
  SUBCASE("laplacian of ln(r^2) on flat R^4 is 4/r^2") {
    const Chart c = flat4_chart();
    ChartEval ev(c, std::array<double, 4>{1.0, 0.0, 0.0, 0.0}, 3);
    const Jet f = ev.eval(expr::parse("ln(x1^2+x2^2+x3^2+x4^2)", c.coords));
    CHECK(laplacian(ev, f).value() == doctest::Approx(4.0).epsilon(1e-12));
    ChartEval ev2(c, std::array<double, 4>{0.5, 0.5, -0.5, 0.5}, 3);
    const Jet f2 = ev2.eval(expr::parse("ln(x1^2+x2^2+x3^2+x4^2)", c.coords));
    CHECK(laplacian(ev2, f2).value() == doctest::Approx(4.0).epsilon(1e-12));
  }

  SUBCASE("gradient and Hessian in polar coordinates") {
    const Chart c = polar_chart();
    ChartEval ev(c, std::array<double, 2>{1.5, 0.8}, 3);
    // f = r^2: grad = 2 r d_r, Hess = 2 g (f is the squared distance / 2 * 2).
    const Jet f = ev.eval(expr::parse("r^2", c.coords));
    const JVec gf = grad(ev, f);
    CHECK(gf[0].value() == doctest::Approx(3.0));
    CHECK(gf[1].value() == doctest::Approx(0.0));
    const JMat h = hess(ev, f);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(h.at(i, j).value() == doctest::Approx(2.0 * ev.g().at(i, j).value()).epsilon(1e-12));
    CHECK(laplacian(ev, f).value() == doctest::Approx(4.0).epsilon(1e-12));
    // Hessian rows agree with the covariant derivative of df.
    const JVec df = {jets::partial(f, 0), jets::partial(f, 1)};
    const JMat ndf = nabla_oneform(ev, df);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(ndf.at(i, j).value() == doctest::Approx(h.at(i, j).value()).epsilon(1e-12));
  }
}

TEST_CASE("vector field calculus") {
  SUBCASE("divergence of the Euler field r d_r is 2 in the plane") {
    const Chart c = polar_chart();
    ChartEval ev(c, std::array<double, 2>{1.1, 2.4}, 3);
    JVec v = {ev.coords()[0], Jet::constant(2, 3, 0.0)};
    CHECK(divergence(ev, v).value() == doctest::Approx(2.0).epsilon(1e-12));
    const JMat lie = lie_metric(ev, v);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(lie.at(i, j).value() == doctest::Approx(2.0 * ev.g().at(i, j).value()).epsilon(1e-12));
  }

  SUBCASE("rotation field is Killing for the polar metric") {
    const Chart c = polar_chart();
    ChartEval ev(c, std::array<double, 2>{1.7, 0.4}, 3);
    JVec v = {Jet::constant(2, 3, 0.0), Jet::constant(2, 3, 1.0)};
    const JMat lie = lie_metric(ev, v);
    for (const Jet& e : lie.a)
      for (std::size_t k = 0; k < e.size(); ++k) CHECK(std::abs(e.coeff(k)) < 1e-12);
  }

  SUBCASE("rough laplacian is the componentwise laplacian on flat charts") {
    const Chart c = flat4_chart();
    ChartEval ev(c, std::array<double, 4>{0.3, -0.7, 1.1, 0.2}, 3);
    const std::vector<std::string> comp = {"x1^2*x2", "x3*x4", "sin(x1)", "x2*x3*x4"};
    JVec v;
    for (const std::string& s : comp) v.push_back(ev.eval(expr::parse(s, c.coords)));
    const JVec rl = rough_laplacian(ev, v);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(rl[i].value() == doctest::Approx(laplacian(ev, v[i]).value()).epsilon(1e-12));
  }

  SUBCASE("nabla of the identity (1,1)-tensor vanishes") {
    const Chart c = sphere2_chart();
    ChartEval ev(c, std::array<double, 2>{1.1, 0.8}, 3);
    JMat id(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) id.at(i, j) = Jet::constant(2, 3, i == j ? 1.0 : 0.0);
    const JT3 nid = nabla_tensor11(ev, id);
    for (const Jet& e : nid.a)
      for (std::size_t k = 0; k < e.size(); ++k) CHECK(std::abs(e.coeff(k)) < 1e-12);
  }
}

TEST_CASE("Lie derivative of the metric against a flow-pullback oracle") {
  const Chart c = polar_chart();
  const std::vector<std::string> vexpr = {"0.2*r^2", "0.3*sin(t)"};
  const std::vector<double> p = {1.3, 0.7};
  ChartEval ev(c, p, 3);
  JVec v;
  for (const std::string& s : vexpr) v.push_back(ev.eval(expr::parse(s, c.coords)));
  const JMat lie = lie_metric(ev, v);

  // Independent oracle: numerically flow the point, pull the metric back and
  // differentiate in the flow time.
  std::vector<expr::Expr> vfield = chart_helpers::parse_all(vexpr, c.coords);
  auto rhs = [&](const std::vector<double>& x) {
    std::vector<double> d(2);
    for (int i = 0; i < 2; ++i) d[static_cast<std::size_t>(i)] = expr::eval(vfield[static_cast<std::size_t>(i)], x);
    return d;
  };
  auto flow = [&](std::vector<double> x, double t) {
    const int steps = 8;
    const double h = t / steps;
    for (int s = 0; s < steps; ++s) {
      const std::vector<double> k1 = rhs(x);
      std::vector<double> x2(2), x3(2), x4(2);
      for (int i = 0; i < 2; ++i) x2[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + 0.5 * h * k1[static_cast<std::size_t>(i)];
      const std::vector<double> k2 = rhs(x2);
      for (int i = 0; i < 2; ++i) x3[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + 0.5 * h * k2[static_cast<std::size_t>(i)];
      const std::vector<double> k3 = rhs(x3);
      for (int i = 0; i < 2; ++i) x4[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + h * k3[static_cast<std::size_t>(i)];
      const std::vector<double> k4 = rhs(x4);
      for (int i = 0; i < 2; ++i)
        x[static_cast<std::size_t>(i)] += h / 6.0 * (k1[static_cast<std::size_t>(i)] + 2 * k2[static_cast<std::size_t>(i)] + 2 * k3[static_cast<std::size_t>(i)] + k4[static_cast<std::size_t>(i)]);
    }
    return x;
  };
  auto pullback = [&](double t) {
    // (Phi_t^* g)_{ij}(p) via finite-difference Jacobian of the flow map.
    const double h = 1e-4;
    std::vector<std::vector<double>> jac(2, std::vector<double>(2));
    for (int i = 0; i < 2; ++i) {
      std::vector<double> pp = p, pm = p;
      pp[static_cast<std::size_t>(i)] += h;
      pm[static_cast<std::size_t>(i)] -= h;
      const std::vector<double> fp = flow(pp, t), fm = flow(pm, t);
      for (int a = 0; a < 2; ++a) jac[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] = (fp[static_cast<std::size_t>(a)] - fm[static_cast<std::size_t>(a)]) / (2 * h);
    }
    const std::vector<double> q = flow(p, t);
    std::vector<double> gq(4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) gq[static_cast<std::size_t>(a * 2 + b)] = expr::eval(c.g(a, b), q);
    std::vector<double> out(4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double s = 0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            s += gq[static_cast<std::size_t>(a * 2 + b)] * jac[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] * jac[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i * 2 + j)] = s;
      }
    return out;
  };
  const double tau = 1e-3;
  const std::vector<double> pp = pullback(tau), pm = pullback(-tau);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double oracle = (pp[static_cast<std::size_t>(i * 2 + j)] - pm[static_cast<std::size_t>(i * 2 + j)]) / (2 * tau);
      CHECK(lie.at(i, j).value() == doctest::Approx(oracle).epsilon(2e-5));
    }
}

TEST_CASE("orthonormal frames") {
  TestRng rng(51);

  SUBCASE("plain Gram-Schmidt frame is orthonormal as jets") {
    const Chart c = conformal4_chart();
    ChartEval ev(c, sample_point(c, rng), 3);
    const std::vector<JVec> frame = orthonormal_frame(ev);
    REQUIRE(frame.size() == 4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const Jet ip = inner(ev, frame[static_cast<std::size_t>(a)], frame[static_cast<std::size_t>(b)]);
        for (std::size_t k = 0; k < ip.size(); ++k)
          CHECK(ip.coeff(k) == doctest::Approx((a == b && k == 0) ? 1.0 : 0.0).epsilon(1e-11));
      }
  }

  SUBCASE("J-adapted frame pairs e with J e") {
    const Chart c = conformal4_chart();
    ChartEval ev(c, sample_point(c, rng), 3);
    // Standard complex structure on R^4 = C^2.
    JMat j(4, 4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) j.at(a, b) = Jet::constant(4, 3, 0.0);
    j.at(1, 0) = Jet::constant(4, 3, 1.0);
    j.at(0, 1) = Jet::constant(4, 3, -1.0);
    j.at(3, 2) = Jet::constant(4, 3, 1.0);
    j.at(2, 3) = Jet::constant(4, 3, -1.0);
    const std::vector<JVec> frame = j_adapted_frame(ev, j);
    REQUIRE(frame.size() == 4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const Jet ip = inner(ev, frame[static_cast<std::size_t>(a)], frame[static_cast<std::size_t>(b)]);
        for (std::size_t k = 0; k < ip.size(); ++k)
          CHECK(ip.coeff(k) == doctest::Approx((a == b && k == 0) ? 1.0 : 0.0).epsilon(1e-11));
      }
    for (int pair = 0; pair < 2; ++pair) {
      const JVec je = mat_apply(j, frame[static_cast<std::size_t>(2 * pair)]);
      for (std::size_t comp = 0; comp < 4; ++comp) {
        const Jet diff = je[comp] - frame[static_cast<std::size_t>(2 * pair + 1)][comp];
        for (std::size_t k = 0; k < diff.size(); ++k) CHECK(std::abs(diff.coeff(k)) < 1e-11);
      }
    }
  }
}

TEST_CASE("chart evaluation errors") {
  const Chart polar = polar_chart();
  CHECK_THROWS_AS(ChartEval(polar, std::array<double, 2>{0.1, 1.0}, 3), DomainError);
  CHECK_THROWS_AS(ChartEval(polar, std::array<double, 2>{1.0, 1.0}, 5), CapabilityError);
  CHECK_THROWS_AS(ChartEval(polar, std::array<double, 3>{1.0, 1.0, 1.0}, 3), DimensionError);

  Chart bad = polar_chart();
  bad.metric[1] = expr::parse("r", bad.coords);  // g_12 != g_21
  ChartEval ev(bad, std::array<double, 2>{1.0, 1.0}, 3);
  CHECK_THROWS_AS((void)ev.g(), ConfigError);

  Chart sing = make_chart("sing", {"x", "y"}, {"x", "0", "0", "0"}, {0.5, 0.5}, {2, 2});
  ChartEval evs(sing, std::array<double, 2>{1.0, 1.0}, 3);
  CHECK_THROWS_AS((void)evs.ginv(), PreconditionError);

  // Derivative budget exhaustion surfaces as CapabilityError: curvature needs
  // two orders on top of the metric jets.
  ChartEval low(polar, std::array<double, 2>{1.0, 1.0}, 1);
  CHECK_THROWS_AS((void)low.riem(), CapabilityError);
}
