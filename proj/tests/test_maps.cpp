#include <array>
#include <cmath>
#include <memory>

#include "biharm/maps/maps.hpp"
#include "chart_helpers.hpp"
#include "doctest.h"

using namespace biharm;
using namespace biharm::maps;
using chart_helpers::make_chart;
using chart_helpers::parse_all;
using chart_helpers::TestRng;

namespace {

std::shared_ptr<herm::HermitianChart> flat_cn(int n, const std::string& name) {
  auto hc = std::make_shared<herm::HermitianChart>();
  std::vector<std::string> coords;
  for (int i = 1; i <= 2 * n; ++i) coords.push_back("x" + std::to_string(i));
  hc->chart = make_chart(name, coords, chart_helpers::flat_metric_strings(2 * n),
                         std::vector<double>(static_cast<std::size_t>(2 * n), -3.0),
                         std::vector<double>(static_cast<std::size_t>(2 * n), 3.0));
  hc->j = parse_all(chart_helpers::std_j_strings(2 * n), hc->chart.coords);
  return hc;
}

// q^-2 delta on four coordinates; alpha scales the two complex lines.
std::shared_ptr<herm::HermitianChart> conformal4(double a1, double a2, const std::string& name,
                                                 std::vector<std::string> extra_require = {}) {
  const std::string q = "(" + std::to_string(a1 / 2) + "*(x1^2+x2^2)+" + std::to_string(a2 / 2) +
                        "*(x3^2+x4^2))";
  std::vector<std::string> m(16, "0");
  for (int i = 0; i < 4; ++i) m[static_cast<std::size_t>(i * 4 + i)] = q + "^(-2)";
  std::vector<std::string> require = {q + " - 0.3", "3.9 - " + q};
  for (auto& e : extra_require) require.push_back(std::move(e));
  auto hc = std::make_shared<herm::HermitianChart>();
  hc->chart = make_chart(name, {"x1", "x2", "x3", "x4"}, m, {-2, -2, -2, -2}, {2, 2, 2, 2},
                         require);
  hc->j = parse_all(chart_helpers::std_j_strings(4), hc->chart.coords);
  return hc;
}

// Chart for the image of z1/z2: one complex line with the curvature-4 metric.
std::shared_ptr<herm::HermitianChart> projective_line() {
  auto hc = std::make_shared<herm::HermitianChart>();
  const std::string f = "(1+u^2+v^2)^(-2)";
  hc->chart = make_chart("proj_line", {"u", "v"}, {f, "0", "0", f}, {-5, -5}, {5, 5});
  hc->j = parse_all(chart_helpers::std_j_strings(2), hc->chart.coords);
  return hc;
}

SmoothMap make_map(const std::string& name, std::shared_ptr<const herm::HermitianChart> from,
                   std::shared_ptr<const herm::HermitianChart> to,
                   const std::vector<std::string>& comps, bool holo) {
  SmoothMap m;
  m.name = name;
  m.domain = std::move(from);
  m.codomain = std::move(to);
  m.components = parse_all(comps, m.domain->chart.coords);
  m.declared_holomorphic = holo;
  return m;
}

std::vector<double> sample_point(const geom::Chart& c, TestRng& rng) {
  for (int attempt = 0; attempt < 2000; ++attempt) {
    std::vector<double> p(static_cast<std::size_t>(c.dim));
    for (int i = 0; i < c.dim; ++i)
      p[static_cast<std::size_t>(i)] =
          rng.in(c.region.lo[static_cast<std::size_t>(i)], c.region.hi[static_cast<std::size_t>(i)]);
    if (c.in_domain(p)) return p;
  }
  FAIL("sample_point: could not sample chart region");
  return {};
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("flat holomorphic polynomials are harmonic and biharmonic") {
  const auto c1 = flat_cn(1, "flat_c1");
  const auto c2 = flat_cn(2, "flat_c2");
  const std::vector<SmoothMap> ms = {
      make_map("square", c1, c1, {"x1^2-x2^2", "2*x1*x2"}, true),
      make_map("product", c2, c1, {"x1*x3-x2*x4", "x1*x4+x2*x3"}, true),
      make_map("cubic_plus", c2, c1, {"x1^3-3*x1*x2^2+x3^2-x4^2", "3*x1^2*x2-x2^3+2*x3*x4"}, true),
  };
  TestRng rng(101);
  for (const SmoothMap& m : ms) {
    for (int t = 0; t < 5; ++t) {
      MapEval me(m, sample_point(m.domain->chart, rng));
      CHECK(me.holomorphy_residual() < 1e-11);
      CHECK(me.tension_norm() < 1e-11);
      CHECK(me.target_norm(me.bitension()) < 1e-10);
    }
  }
}

TEST_CASE("second fundamental form of z^2 on the flat plane") {
  const auto c1 = flat_cn(1, "flat_c1");
  const SmoothMap m = make_map("square", c1, c1, {"x1^2-x2^2", "2*x1*x2"}, true);
  MapEval me(m, std::array<double, 2>{0.7, -0.4});
  // flat charts: nabla d phi = plain second partials
  CHECK(me.sff().at(0, 0, 0).value() == doctest::Approx(2.0));
  CHECK(me.sff().at(0, 1, 1).value() == doctest::Approx(-2.0));
  CHECK(me.sff().at(0, 0, 1).value() == doctest::Approx(0.0));
  CHECK(me.sff().at(1, 0, 1).value() == doctest::Approx(2.0));
  CHECK(me.sff().at(1, 0, 0).value() == doctest::Approx(0.0));
  CHECK(me.sff().at(0, 1, 0).value() == me.sff().at(0, 0, 1).value());
}

TEST_CASE("conjugation is maximally non-holomorphic") {
  const auto c1 = flat_cn(1, "flat_c1");
  const SmoothMap m = make_map("conj", c1, c1, {"x1", "0-x2"}, false);
  MapEval me(m, std::array<double, 2>{0.3, 0.9});
  CHECK(me.holomorphy_residual() == doctest::Approx(2.0));
}

TEST_CASE("identity of a curved chart onto itself has vanishing tension") {
  const auto cc = conformal4(2, 2, "conf22");
  const SmoothMap m = make_map("id", cc, cc, {"x1", "x2", "x3", "x4"}, true);
  MapEval me(m, std::array<double, 4>{0.7, -0.2, 0.5, 0.8});
  CHECK(me.holomorphy_residual() < 1e-13);
  for (const Jet& t : me.tension())
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(std::abs(t.coeff(k)) < 1e-10);
  CHECK(max_abs(me.bitension()) < 1e-9);
}

TEST_CASE("tension of the identity onto the flat chart equals the Lee field") {
  const auto cc = conformal4(2, 2, "conf22");
  const auto flat = flat_cn(2, "flat_c2");
  const SmoothMap m = make_map("id_to_flat", cc, flat, {"x1", "x2", "x3", "x4"}, true);
  TestRng rng(55);
  for (int t = 0; t < 4; ++t) {
    const std::vector<double> p = sample_point(cc->chart, rng);
    MapEval me(m, p);
    herm::HermEval he(*cc, p);
    const JVec& tau = me.tension();
    const JVec& b = he.lee().b;
    // closed form: tau^i = B^i = -4 q x_i for this conformal factor
    for (int i = 0; i < 4; ++i) {
      const double q = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
      const double want = -4.0 * q * p[static_cast<std::size_t>(i)];
      CHECK(tau[static_cast<std::size_t>(i)].value() == doctest::Approx(want).epsilon(1e-9));
      CHECK(b[static_cast<std::size_t>(i)].value() == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("commutation identity for the pullback second-order operator") {
  const auto c1 = flat_cn(1, "flat_c1");
  const auto c2 = flat_cn(2, "flat_c2");
  const auto cc = conformal4(2, 2, "conf22", {"x3^2+x4^2-0.1"});
  const auto aniso = conformal4(1, 2, "conf12");
  const auto line = projective_line();
  const std::vector<SmoothMap> ms = {
      make_map("product", c2, c1, {"x1*x3-x2*x4", "x1*x4+x2*x3"}, true),
      make_map("skew", c2, c1, {"x1^2+x3", "x2*x4"}, false),
      make_map("proj", cc, c1, {"x1", "x2"}, true),
      make_map("quotient", cc, line,
               {"(x1*x3+x2*x4)/(x3^2+x4^2)", "(x2*x3-x1*x4)/(x3^2+x4^2)"}, true),
      make_map("id_aniso", aniso, flat_cn(2, "flat_c2"), {"x1", "x2", "x3", "x4"}, true),
  };
  TestRng rng(77);
  int instances = 0;
  while (instances < 30) {
    for (const SmoothMap& m : ms) {
      const int md = m.domain->chart.dim;
      MapEval me(m, sample_point(m.domain->chart, rng));
      const JVec& xs = me.dom().coords();
      JVec v(static_cast<std::size_t>(md));
      for (int k = 0; k < md; ++k) {
        const auto r1 = static_cast<std::size_t>(rng.in(0, md));
        const auto r2 = static_cast<std::size_t>(rng.in(0, md));
        const auto r3 = static_cast<std::size_t>(rng.in(0, md));
        v[static_cast<std::size_t>(k)] = Jet::constant(md, me.dom().budget(), rng.in(-1, 1)) +
                                         xs[r1] * rng.in(-1, 1) + xs[r2] * xs[r3] * rng.in(-1, 1);
      }
      const ChainReport rep = me.chain_formula(v);
      CHECK(rep.residual < 1e-7 * rep.scale);
      ++instances;
    }
  }
}

TEST_CASE("bitension routes agree and detect the failing scaling") {
  const auto flat2 = flat_cn(2, "flat_c2");
  const auto c1 = flat_cn(1, "flat_c1");
  const auto line = projective_line();
  const auto good = conformal4(2, 2, "conf22", {"x3^2+x4^2-0.1"});
  const auto bad = conformal4(1, 2, "conf12");
  TestRng rng(911);

  SUBCASE("balanced scaling: identity, projection and quotient are biharmonic") {
    const std::vector<SmoothMap> ms = {
        make_map("id", good, flat2, {"x1", "x2", "x3", "x4"}, true),
        make_map("proj", good, c1, {"x1", "x2"}, true),
        make_map("quotient", good, line,
                 {"(x1*x3+x2*x4)/(x3^2+x4^2)", "(x2*x3-x1*x4)/(x3^2+x4^2)"}, true),
    };
    for (const SmoothMap& m : ms) {
      for (int t = 0; t < 5; ++t) {
        MapEval me(m, sample_point(m.domain->chart, rng));
        const std::vector<double> direct = me.bitension();
        CHECK(me.target_norm(direct) < 1e-6 * me.scale());
        const SigmaReport sr = me.bitension_via_sigma();
        std::vector<double> diff(direct.size());
        for (std::size_t a = 0; a < diff.size(); ++a) diff[a] = direct[a] - sr.value[a];
        CHECK(me.target_norm(diff) < 1e-7 * me.scale());
        CHECK(sr.imag_max < 1e-9 * me.scale());
      }
    }
  }

  SUBCASE("unbalanced scaling: both routes see the same nonzero bitension") {
    const SmoothMap m = make_map("id", bad, flat2, {"x1", "x2", "x3", "x4"}, true);
    double seen = 0.0;
    for (int t = 0; t < 5; ++t) {
      MapEval me(m, sample_point(m.domain->chart, rng));
      const std::vector<double> direct = me.bitension();
      const SigmaReport sr = me.bitension_via_sigma();
      std::vector<double> diff(direct.size());
      for (std::size_t a = 0; a < diff.size(); ++a) diff[a] = direct[a] - sr.value[a];
      CHECK(me.target_norm(diff) < 1e-7 * me.scale());
      CHECK(sr.imag_max < 1e-9 * me.scale());
      seen = std::max(seen, me.target_norm(direct) / me.scale());
    }
    CHECK(seen > 1e-3);
  }
}

TEST_CASE("pullback connection is metric for the pulled-back metric") {
  const auto cc = conformal4(2, 2, "conf22", {"x3^2+x4^2-0.1"});
  const auto line = projective_line();
  const SmoothMap m = make_map("quotient", cc, line,
                               {"(x1*x3+x2*x4)/(x3^2+x4^2)", "(x2*x3-x1*x4)/(x3^2+x4^2)"}, true);
  TestRng rng(303);
  MapEval me(m, sample_point(m.domain->chart, rng));
  const JVec& xs = me.dom().coords();
  JVec w1(2), w2(2);
  w1[0] = xs[0] * xs[2] + xs[1];
  w1[1] = xs[3] * xs[3] * 0.5 + Jet::constant(4, 4, 0.3);
  w2[0] = xs[1] * xs[1] - xs[2];
  w2[1] = xs[0] + xs[2] * xs[3];
  const JMat& h = me.h_along();
  Jet pairing = h.at(0, 0) * w1[0] * w2[0];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      if (a == 0 && b == 0) continue;
      pairing += h.at(a, b) * w1[static_cast<std::size_t>(a)] * w2[static_cast<std::size_t>(b)];
    }
  for (int i = 0; i < 4; ++i) {
    const JVec dw1 = me.pullback_nabla(i, w1);
    const JVec dw2 = me.pullback_nabla(i, w2);
    double rhs = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        rhs += h.at(a, b).value() * (dw1[static_cast<std::size_t>(a)].value() * w2[static_cast<std::size_t>(b)].value() +
                                     w1[static_cast<std::size_t>(a)].value() * dw2[static_cast<std::size_t>(b)].value());
    CHECK(partial(pairing, i).value() == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("map errors") {
  const auto c1 = flat_cn(1, "flat_c1");
  const auto c2 = flat_cn(2, "flat_c2");

  SmoothMap wrong = make_map("wrong", c2, c1, {"x1", "x2"}, false);
  wrong.components.pop_back();
  CHECK_THROWS_AS(MapEval(wrong, std::array<double, 4>{0, 0, 0, 0}), ConfigError);

  // image outside the codomain's declared region
  const auto cc = conformal4(2, 2, "conf22");
  const SmoothMap tiny = make_map("tiny", c2, cc, {"0.1", "0.1", "0.1", "0.1"}, false);
  CHECK_THROWS_AS(MapEval(tiny, std::array<double, 4>{0, 0, 0, 0}), DomainError);

  // holomorphy needs J on both sides
  auto bare = std::make_shared<herm::HermitianChart>();
  bare->chart = make_chart("bare", {"u", "v"}, chart_helpers::flat_metric_strings(2), {-3, -3}, {3, 3});
  const SmoothMap no_j = make_map("no_j", c1, bare, {"x1", "x2"}, false);
  MapEval me(no_j, std::array<double, 2>{0.1, 0.2});
  CHECK_THROWS_AS((void)me.holomorphy_residual(), CapabilityError);

  // the Lee-field route refuses non-holomorphic maps
  const SmoothMap conj = make_map("conj", c2, c1, {"x1", "0-x2"}, false);
  MapEval mc(conj, std::array<double, 4>{0.3, 0.4, 0.5, 0.6});
  CHECK_THROWS_AS((void)mc.bitension_via_sigma(), PreconditionError);

  CHECK_THROWS_AS(MapEval(conj, std::array<double, 4>{0, 0, 0, 0}, 1), CapabilityError);
}
