#include "biharm/atlas/atlas.hpp"

#include <cmath>
#include <initializer_list>

#include "biharm/errors.hpp"

namespace biharm::atlas {

namespace {

std::vector<expr::Expr> parse_all(const std::vector<std::string>& texts,
                                  std::span<const std::string> coords) {
  std::vector<expr::Expr> out;
  out.reserve(texts.size());
  for (const std::string& s : texts) out.push_back(expr::parse(s, coords));
  return out;
}

geom::Chart make_chart(std::string name, std::vector<std::string> coords,
                       const std::vector<std::string>& metric, std::vector<double> lo,
                       std::vector<double> hi, const std::vector<std::string>& require = {}) {
  geom::Chart c;
  c.name = std::move(name);
  c.dim = static_cast<int>(coords.size());
  c.coords = std::move(coords);
  c.metric.reserve(metric.size());
  for (const std::string& s : metric) c.metric.push_back(expr::parse(s, c.coords));
  c.region.lo = std::move(lo);
  c.region.hi = std::move(hi);
  for (const std::string& s : require) c.region.require.push_back(expr::parse(s, c.coords));
  return c;
}

std::vector<std::string> flat_metric(int m) {
  std::vector<std::string> g(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), "0");
  for (int i = 0; i < m; ++i) g[static_cast<std::size_t>(i * m + i)] = "1";
  return g;
}

/// Standard pairing J d_{2k-1} = d_{2k} as row-major component strings.
std::vector<std::string> std_j(int m) {
  std::vector<std::string> j(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), "0");
  for (int k = 0; k + 1 < m; k += 2) {
    j[static_cast<std::size_t>((k + 1) * m + k)] = "1";
    j[static_cast<std::size_t>(k * m + (k + 1))] = "-1";
  }
  return j;
}

std::vector<std::string> coord_names(int m) {
  std::vector<std::string> c;
  for (int i = 1; i <= m; ++i) c.push_back("x" + std::to_string(i));
  return c;
}

std::shared_ptr<herm::HermitianChart> flat_hermitian(int m, const std::string& name,
                                                     double half_width = 3.0) {
  auto hc = std::make_shared<herm::HermitianChart>();
  hc->chart = make_chart(name, coord_names(m), flat_metric(m),
                         std::vector<double>(static_cast<std::size_t>(m), -half_width),
                         std::vector<double>(static_cast<std::size_t>(m), half_width));
  hc->j = parse_all(std_j(m), hc->chart.coords);
  return hc;
}

maps::SmoothMap make_map(const std::string& name,
                         std::shared_ptr<const herm::HermitianChart> from,
                         std::shared_ptr<const herm::HermitianChart> to,
                         const std::vector<std::string>& comps, bool holomorphic = true) {
  maps::SmoothMap m;
  m.name = name;
  m.domain = std::move(from);
  m.codomain = std::move(to);
  m.components = parse_all(comps, m.domain->chart.coords);
  m.declared_holomorphic = holomorphic;
  m.validate();
  return m;
}

std::vector<std::string> identity_components(const geom::Chart& c) {
  return std::vector<std::string>(c.coords.begin(), c.coords.end());
}

void add(std::vector<std::pair<std::string, Expect>>& v,
         std::initializer_list<const char*> ids, Expect e) {
  for (const char* id : ids) v.emplace_back(id, e);
}

std::vector<std::pair<std::string, Expect>> all_conditions_pass(int m) {
  std::vector<std::pair<std::string, Expect>> v;
  add(v, {"theorem_real_A", "theorem_real_B", "theorem_complex_A", "theorem_complex_B",  //
          "lck_A", "lck_B", "theta_A", "theta_B", "gck_A", "gck_B"},
      Expect::pass);
  if (m == 4) add(v, {"dim4_ricci", "dim4_scalar", "dim4_identity"}, Expect::pass);
  return v;
}

std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double unit_draw(std::uint64_t& s) {
  return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
}

}  // namespace

const char* to_string(Expect e) {
  switch (e) {
    case Expect::pass: return "pass";
    case Expect::fail: return "fail";
    case Expect::measure: return "measure";
  }
  return "?";
}

ExampleBundle make_flat_cn(int n) {
  if (n < 1 || n > 4)
    throw ConfigError("flat_cn: n must be between 1 and 4, got " + std::to_string(n));
  const int m = 2 * n;
  ExampleBundle b;
  b.name = "flat_c" + std::to_string(n);
  b.summary = "flat C^" + std::to_string(n) + " with the standard complex structure";
  b.chart = flat_hermitian(m, b.name);
  b.base = b.chart;
  b.gamma = expr::parse("0", b.chart->chart.coords);
  b.maps.push_back(make_map("identity", b.chart, b.chart, identity_components(b.chart->chart)));
  if (n == 1) {
    b.maps.push_back(make_map("square", b.chart, b.chart, {"x1^2-x2^2", "2*x1*x2"}));
  } else {
    const auto line = flat_hermitian(2, "flat_c1");
    b.maps.push_back(make_map("proj_first", b.chart, line, {"x1", "x2"}));
    if (n == 2) {
      b.maps.push_back(make_map("product_lines", b.chart, line,
                                {"x1*x3-x2*x4", "x1*x4+x2*x3"}));
      std::vector<std::string> sq = identity_components(b.chart->chart);
      sq[0] = "x1^2-x2^2";
      sq[1] = "2*x1*x2";
      b.maps.push_back(make_map("square_first", b.chart, b.chart, sq));
    }
  }
  if (m >= 4) b.expected = all_conditions_pass(m);
  return b;
}

ExampleBundle make_conformal_c2(double alpha1, double alpha2) {
  if (alpha1 <= 0.0 || alpha2 <= 0.0)
    throw ConfigError("conformal_c2: weights must be positive");
  const bool equal = alpha1 == alpha2;
  const std::string q = "(" + std::to_string(alpha1 / 2) + "*(x1^2+x2^2)+" +
                        std::to_string(alpha2 / 2) + "*(x3^2+x4^2))";
  ExampleBundle b;
  b.name = equal ? "conformal_c2" : "conformal_c2_control";
  b.summary = equal ? "C^2 minus the origin, metric q^-2 delta with equal weights"
                    : "unequal-weight conformal factor on C^2: the second-order criteria fail";
  b.control = !equal;
  b.bitension = equal ? Expect::pass : Expect::measure;

  std::vector<std::string> metric(16, "0");
  for (int i = 0; i < 4; ++i) metric[static_cast<std::size_t>(i * 4 + i)] = q + "^(-2)";
  auto hc = std::make_shared<herm::HermitianChart>();
  hc->chart = make_chart(b.name, coord_names(4), metric, {-2, -2, -2, -2}, {2, 2, 2, 2},
                         {q + " - 0.3", "3.9 - " + q, "x3^2+x4^2 - 0.1"});
  hc->j = parse_all(std_j(4), hc->chart.coords);
  b.chart = hc;

  b.base = flat_hermitian(4, "flat_c2_base");
  b.gamma = expr::parse("-ln(" + q + ")", b.base->chart.coords);

  const auto plane = flat_hermitian(4, "flat_c2");
  const auto line = flat_hermitian(2, "flat_c1");
  auto fs = std::make_shared<herm::HermitianChart>();
  const std::string fsw = "(1+u^2+v^2)^(-2)";
  fs->chart = make_chart("projective_line", {"u", "v"}, {fsw, "0", "0", fsw}, {-10, -10},
                         {10, 10});
  fs->j = parse_all(std_j(2), fs->chart.coords);

  b.maps.push_back(make_map("identity_to_flat", b.chart, plane, identity_components(hc->chart)));
  b.maps.push_back(make_map("proj_first", b.chart, line, {"x1", "x2"}));
  b.maps.push_back(make_map("quotient", b.chart, fs,
                            {"(x1*x3+x2*x4)/(x3^2+x4^2)", "(x2*x3-x1*x4)/(x3^2+x4^2)"}));

  if (equal) {
    b.expected = all_conditions_pass(4);
  } else {
    // First-order identities survive; the second-order equations break.
    add(b.expected, {"theorem_real_A"}, Expect::pass);
    add(b.expected, {"theorem_real_B"}, Expect::fail);
    add(b.expected, {"theorem_complex_A"}, Expect::pass);
    add(b.expected, {"theorem_complex_B"}, Expect::fail);
    add(b.expected, {"lck_A"}, Expect::pass);
    add(b.expected, {"lck_B"}, Expect::fail);
    add(b.expected, {"theta_A"}, Expect::pass);
    add(b.expected, {"theta_B"}, Expect::fail);
    add(b.expected, {"gck_A"}, Expect::pass);
    add(b.expected, {"gck_B"}, Expect::fail);
    add(b.expected, {"dim4_ricci"}, Expect::pass);
    add(b.expected, {"dim4_scalar"}, Expect::fail);
    add(b.expected, {"dim4_identity"}, Expect::pass);
  }
  return b;
}

ExampleBundle make_sasakian_cone() {
  ExampleBundle b;
  b.name = "sasakian_cone";
  b.summary = "cone over the round 3-sphere with the cone complex structure, rescaled by r^-4";
  const std::vector<std::string> coords = {"r", "th", "p1", "p2"};
  const std::vector<double> lo = {0.6, 0.2, 0.2, 0.2};
  const std::vector<double> hi = {1.9, 1.35, 6.0, 6.0};
  const std::vector<std::string> jrows = {
      "0", "0", "-r*cos(th)^2", "-r*sin(th)^2",          //
      "0", "0", "sin(th)*cos(th)", "-sin(th)*cos(th)",   //
      "1/r", "-sin(th)/cos(th)", "0", "0",               //
      "1/r", "cos(th)/sin(th)", "0", "0"};

  auto lck = std::make_shared<herm::HermitianChart>();
  lck->chart = make_chart("sasakian_cone", coords,
                          {"r^(-4)", "0", "0", "0",                  //
                           "0", "r^(-2)", "0", "0",                  //
                           "0", "0", "r^(-2)*cos(th)^2", "0",        //
                           "0", "0", "0", "r^(-2)*sin(th)^2"},
                          lo, hi);
  lck->j = parse_all(jrows, lck->chart.coords);
  b.chart = lck;

  auto cone = std::make_shared<herm::HermitianChart>();
  cone->chart = make_chart("kahler_cone", coords,
                           {"1", "0", "0", "0",                 //
                            "0", "r^2", "0", "0",               //
                            "0", "0", "r^2*cos(th)^2", "0",     //
                            "0", "0", "0", "r^2*sin(th)^2"},
                           lo, hi);
  cone->j = parse_all(jrows, cone->chart.coords);
  b.base = cone;
  b.gamma = expr::parse("-ln(r^2)", cone->chart.coords);

  const auto plane = flat_hermitian(4, "flat_c2");
  const auto line = flat_hermitian(2, "flat_c1");
  b.maps.push_back(make_map("cone_to_plane", lck, plane,
                            {"r*cos(th)*cos(p1)", "r*cos(th)*sin(p1)",  //
                             "r*sin(th)*cos(p2)", "r*sin(th)*sin(p2)"}));
  b.maps.push_back(make_map("proj_first_line", lck, line,
                            {"r*cos(th)*cos(p1)", "r*cos(th)*sin(p1)"}));

  auto sphere = std::make_shared<herm::HermitianChart>();
  sphere->chart = make_chart("round_s3", {"th", "p1", "p2"},
                             {"1", "0", "0",             //
                              "0", "cos(th)^2", "0",     //
                              "0", "0", "sin(th)^2"},
                             {0.1, 0.1, 0.1}, {1.45, 6.1, 6.1});
  SubmersionCase sc;
  sc.map = make_map("radial_projection", cone, sphere, {"th", "p1", "p2"},
                    /*holomorphic=*/false);
  sc.vertical = parse_all({"r", "0", "0", "0"}, cone->chart.coords);
  sc.potential = expr::parse("r^2/2", cone->chart.coords);
  b.submersions.push_back(std::move(sc));

  b.expected = all_conditions_pass(4);
  add(b.expected, {"subm_product"}, Expect::measure);
  add(b.expected, {"subm_eigen"}, Expect::pass);
  return b;
}

ExampleBundle make_inoue_family(int n) {
  if (n < 2 || n > 4)
    throw ConfigError("inoue family: n must be between 2 and 4, got " + std::to_string(n));
  const int m = 2 * n;
  ExampleBundle b;
  b.name = "inoue_n" + std::to_string(n);
  b.summary = "half-plane times C^" + std::to_string(n - 1) +
              " with the w2-weighted product metric";

  std::vector<std::string> coords = {"w1", "w2"};
  for (int i = 1; i <= m - 2; ++i) coords.push_back("x" + std::to_string(i));
  std::vector<double> lo(static_cast<std::size_t>(m), -2.0);
  std::vector<double> hi(static_cast<std::size_t>(m), 2.0);
  lo[1] = 0.5;
  hi[1] = 2.5;

  const std::string up = (n == 2) ? "w2^2" : (n == 3) ? "w2" : "w2^(2/3)";
  const std::string down = (n == 2) ? "w2^(-2)" : (n == 3) ? "w2^(-1)" : "w2^(-2/3)";
  auto diag_metric = [m](const std::string& head, const std::string& tail) {
    std::vector<std::string> g(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), "0");
    g[0] = head;
    g[static_cast<std::size_t>(m + 1)] = head;
    for (int i = 2; i < m; ++i) g[static_cast<std::size_t>(i * m + i)] = tail;
    return g;
  };

  auto lck = std::make_shared<herm::HermitianChart>();
  lck->chart = make_chart(b.name, coords, diag_metric("1", up), lo, hi);
  lck->j = parse_all(std_j(m), lck->chart.coords);
  b.chart = lck;

  auto base = std::make_shared<herm::HermitianChart>();
  base->chart = make_chart("inoue_base_n" + std::to_string(n), coords, diag_metric(down, "1"),
                           lo, hi);
  base->j = parse_all(std_j(m), base->chart.coords);
  b.base = base;
  const std::string gsrc = (n == 2) ? "ln(w2)" : (n == 3) ? "1/2*ln(w2)" : "1/3*ln(w2)";
  b.gamma = expr::parse(gsrc, base->chart.coords);

  const auto target = flat_hermitian(m, "flat_product_" + std::to_string(m));
  b.maps.push_back(make_map("identity_to_flat", lck, target, identity_components(lck->chart)));
  const auto fiber = flat_hermitian(m - 2, "flat_c" + std::to_string(n - 1));
  std::vector<std::string> proj(coords.begin() + 2, coords.end());
  b.maps.push_back(make_map("proj_fiber", lck, fiber, proj));

  auto sub_target = std::make_shared<herm::HermitianChart>();
  std::vector<std::string> tcoords = {"y1"};
  for (int i = 1; i <= m - 2; ++i) tcoords.push_back("y" + std::to_string(i + 1));
  sub_target->chart = make_chart("flat_" + std::to_string(m - 1), tcoords, flat_metric(m - 1),
                                 std::vector<double>(static_cast<std::size_t>(m - 1), -3.0),
                                 std::vector<double>(static_cast<std::size_t>(m - 1), 3.0));
  std::vector<std::string> drop = {"w1"};
  for (int i = 1; i <= m - 2; ++i) drop.push_back("x" + std::to_string(i));
  SubmersionCase sc;
  sc.map = make_map("drop_thickness", base, sub_target, drop, /*holomorphic=*/false);
  std::vector<std::string> vert(static_cast<std::size_t>(m), "0");
  std::string fsrc;
  if (n == 2) {
    vert[1] = "-1";
    fsrc = "w2^(-1)";
  } else if (n == 3) {
    vert[1] = "1/2";
    fsrc = "1+1/2*ln(w2)";
  } else {
    vert[1] = "3^(-2/3)";
    fsrc = "(3*w2)^(1/3)";
  }
  sc.vertical = parse_all(vert, base->chart.coords);
  sc.potential = expr::parse(fsrc, base->chart.coords);
  b.submersions.push_back(std::move(sc));

  b.expected = all_conditions_pass(m);
  add(b.expected, {"subm_product"}, (n == 3) ? Expect::measure : Expect::pass);
  add(b.expected, {"subm_eigen"}, Expect::pass);
  return b;
}

const std::vector<ExampleBundle>& registry() {
  static const std::vector<ExampleBundle> bundles = [] {
    std::vector<ExampleBundle> v;
    v.push_back(make_conformal_c2(2.0, 2.0));
    v.push_back(make_conformal_c2(1.0, 2.0));
    v.push_back(make_flat_cn(1));
    v.push_back(make_flat_cn(2));
    v.push_back(make_inoue_family(2));
    v.push_back(make_inoue_family(3));
    v.push_back(make_inoue_family(4));
    v.push_back(make_sasakian_cone());
    return v;
  }();
  return bundles;
}

const ExampleBundle& find_bundle(const std::string& name) {
  std::string known;
  for (const ExampleBundle& b : registry()) {
    if (b.name == name) return b;
    if (!known.empty()) known += ", ";
    known += b.name;
  }
  throw ConfigError("unknown example '" + name + "'; built-in examples: " + known);
}

std::vector<std::vector<double>> sample_points(const geom::Chart& chart, int count,
                                               std::uint64_t seed, double margin) {
  if (count < 1) throw ConfigError("sample_points: count must be at least 1");
  const int m = chart.dim;
  for (int i = 0; i < m; ++i) {
    if (chart.region.hi[static_cast<std::size_t>(i)] -
            chart.region.lo[static_cast<std::size_t>(i)] <=
        2.0 * margin)
      throw ConfigError("sample_points: chart '" + chart.name + "' box is empty after margin");
  }
  std::uint64_t state = seed;
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  int rejected = 0;
  while (static_cast<int>(out.size()) < count) {
    std::vector<double> p(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const double a = chart.region.lo[static_cast<std::size_t>(i)] + margin;
      const double b = chart.region.hi[static_cast<std::size_t>(i)] - margin;
      p[static_cast<std::size_t>(i)] = a + unit_draw(state) * (b - a);
    }
    bool ok = true;
    for (const expr::Expr& req : chart.region.require) {
      if (expr::eval(req, p) <= margin) {
        ok = false;
        break;
      }
    }
    if (ok) {
      out.push_back(std::move(p));
      rejected = 0;
    } else if (++rejected > 10000) {
      throw ConfigError("sample_points: chart '" + chart.name +
                        "' region rejected 10000 consecutive draws");
    }
  }
  return out;
}

}  // namespace biharm::atlas
