#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "biharm/cli/cli.hpp"
#include "biharm/errors.hpp"

namespace biharm::cli {

namespace {

constexpr const char* kEngineVersion = "0.1.0";
constexpr double kHolomorphyTol = 1e-8;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void append_escaped(std::string& out, const std::string& s) {
  for (const char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned char>(ch));
          out += buf;
        } else {
          out += ch;
        }
    }
  }
}

std::string point_string(const std::vector<double>& p, char sep) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += sep;
    s += fmt17(p[i]);
  }
  return s;
}

}  // namespace

const std::vector<std::string>& condition_ids() {
  static const std::vector<std::string> ids = {
      "theorem_real_A", "theorem_real_B", "theorem_complex_A", "theorem_complex_B",
      "lck_A",          "lck_B",          "theta_A",           "theta_B",
      "gck_A",          "gck_B",          "dim4_ricci",        "dim4_scalar",
      "dim4_identity",  "subm_product",   "subm_eigen"};
  return ids;
}

std::vector<std::string> applicable_ids(const atlas::ExampleBundle& b) {
  std::vector<std::string> ids;
  const int m = b.chart ? b.chart->chart.dim : 0;
  if (m >= 4) {
    ids = {"theorem_real_A", "theorem_real_B", "theorem_complex_A", "theorem_complex_B",
           "lck_A",          "lck_B",          "theta_A",           "theta_B"};
    if (b.base && b.gamma) {
      ids.emplace_back("gck_A");
      ids.emplace_back("gck_B");
    }
    if (m == 4) {
      ids.emplace_back("dim4_ricci");
      ids.emplace_back("dim4_scalar");
      ids.emplace_back("dim4_identity");
    }
  }
  if (!b.submersions.empty()) {
    ids.emplace_back("subm_product");
    ids.emplace_back("subm_eigen");
  }
  return ids;
}

RunReport run_verify(const RunConfig& cfg) {
  if (cfg.run.points < 1) throw ConfigError("run: points must be at least 1");
  if (!(cfg.run.tol > 0.0)) throw ConfigError("run: tolerance must be positive");
  if (cfg.targets.empty()) throw ConfigError("config defines no targets");

  RunReport rep;
  rep.run = cfg.run;
  bool any_precondition = false;
  bool any_mismatch = false;

  for (const Target& t : cfg.targets) {
    const atlas::ExampleBundle& b = t.bundle;
    if (!b.chart) throw ConfigError("target '" + b.name + "' has no chart");
    const auto want = [&t](const std::string& id) {
      return t.conditions.empty() ||
             std::find(t.conditions.begin(), t.conditions.end(), id) != t.conditions.end();
    };
    const std::map<std::string, atlas::Expect> expected(b.expected.begin(), b.expected.end());
    const auto expect_of = [&expected](const std::string& id) {
      const auto it = expected.find(id);
      return it == expected.end() ? atlas::Expect::pass : it->second;
    };

    const auto points = atlas::sample_points(b.chart->chart, cfg.run.points, cfg.run.seed);

    const auto push_condition = [&](const cond::ConditionReport& r,
                                    const std::string& chart_name,
                                    const std::vector<double>& p) {
      if (!want(r.id)) return;
      ReportItem item;
      item.kind = "condition";
      item.id = r.id;
      item.chart = chart_name;
      item.point = p;
      item.residual = r.residual;
      item.scale = r.scale;
      item.verdict = r.pass ? "pass" : "fail";
      item.terms = r.terms;
      const atlas::Expect e = expect_of(r.id);
      if ((e == atlas::Expect::pass && !r.pass) || (e == atlas::Expect::fail && r.pass)) {
        any_mismatch = true;
        rep.diagnostics.push_back(b.name + "/" + r.id + " at (" + point_string(p, ' ') +
                                  "): expected " + atlas::to_string(e) + ", got " +
                                  item.verdict);
      }
      rep.items.push_back(std::move(item));
    };
    const auto push_preconditions = [&](std::initializer_list<const char*> ids,
                                        const std::string& chart_name,
                                        const std::vector<double>& p, const std::string& what) {
      any_precondition = true;
      rep.diagnostics.push_back(b.name + ": " + what);
      for (const char* id : ids) {
        if (!want(id)) continue;
        ReportItem item;
        item.kind = "condition";
        item.id = id;
        item.chart = chart_name;
        item.point = p;
        item.verdict = "precondition";
        rep.items.push_back(std::move(item));
      }
    };
    const auto run_checker = [&](std::initializer_list<const char*> ids,
                                 const std::string& chart_name, const std::vector<double>& p,
                                 auto&& fn) {
      if (std::none_of(ids.begin(), ids.end(), [&](const char* id) { return want(id); })) return;
      try {
        for (const cond::ConditionReport& r : fn()) push_condition(r, chart_name, p);
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        push_preconditions(ids, chart_name, p, e.what());
      }
    };

    const int m = b.chart->chart.dim;
    const std::string chart_name = b.chart->chart.name;
    for (const auto& p : points) {
      if (m >= 4) {
        run_checker({"theorem_real_A", "theorem_real_B"}, chart_name, p,
                    [&] { return cond::check_theorem_real(*b.chart, p, cfg.run.tol); });
        run_checker({"theorem_complex_A", "theorem_complex_B"}, chart_name, p,
                    [&] { return cond::check_theorem_complex(*b.chart, p, cfg.run.tol); });
        run_checker({"lck_A", "lck_B"}, chart_name, p,
                    [&] { return cond::check_lck(*b.chart, p, cfg.run.tol); });
        run_checker({"theta_A", "theta_B"}, chart_name, p,
                    [&] { return cond::check_theta_form(*b.chart, p, cfg.run.tol); });
        if (b.base && b.gamma)
          run_checker({"gck_A", "gck_B"}, b.base->chart.name, p,
                      [&] { return cond::check_gck(*b.base, *b.gamma, p, cfg.run.tol); });
        if (m == 4)
          run_checker({"dim4_ricci", "dim4_scalar", "dim4_identity"}, chart_name, p,
                      [&] { return cond::check_dim4(*b.chart, p, cfg.run.tol); });
      }
    }

    for (const maps::SmoothMap& mp : b.maps) {
      for (const auto& p : points) {
        try {
          maps::MapEval me(mp, p);
          const auto t2 = me.bitension();
          ReportItem item;
          item.kind = "bitension";
          item.id = "bitension";
          item.chart = mp.domain->chart.name;
          item.map = mp.name;
          item.point = p;
          item.residual = me.target_norm(t2);
          item.scale = me.scale();
          const bool pass = item.residual <= cfg.run.tol * item.scale;
          item.verdict = pass ? "pass" : "fail";
          item.terms = {{"tension", me.tension_norm()}, {"dphi", me.dphi_norm()}};
          const atlas::Expect e = b.bitension;
          if ((e == atlas::Expect::pass && !pass) || (e == atlas::Expect::fail && pass)) {
            any_mismatch = true;
            rep.diagnostics.push_back(b.name + "/" + mp.name + " bitension at (" +
                                      point_string(p, ' ') + "): expected " +
                                      atlas::to_string(e) + ", got " + item.verdict);
          }
          rep.items.push_back(std::move(item));

          if (mp.declared_holomorphic) {
            ReportItem h;
            h.kind = "identity";
            h.id = "holomorphy";
            h.chart = mp.domain->chart.name;
            h.map = mp.name;
            h.point = p;
            h.residual = me.holomorphy_residual();
            h.scale = std::max(1.0, me.dphi_norm());
            const bool hpass = h.residual <= kHolomorphyTol * h.scale;
            h.verdict = hpass ? "pass" : "fail";
            if (!hpass) {
              any_mismatch = true;
              rep.diagnostics.push_back(b.name + "/" + mp.name +
                                        ": holomorphy residual " + fmt17(h.residual));
            }
            rep.items.push_back(std::move(h));
          }
        } catch (const ConfigError&) {
          throw;
        } catch (const Error& e) {
          any_precondition = true;
          rep.diagnostics.push_back(b.name + "/" + mp.name + ": " + e.what());
          ReportItem item;
          item.kind = "bitension";
          item.id = "bitension";
          item.chart = mp.domain->chart.name;
          item.map = mp.name;
          item.point = p;
          item.verdict = "precondition";
          rep.items.push_back(std::move(item));
        }
      }
    }

    for (const atlas::SubmersionCase& sc : b.submersions) {
      for (const auto& p : points) {
        run_checker({"subm_product", "subm_eigen"}, sc.map.domain->chart.name, p, [&] {
          return cond::check_submersion(sc.map, sc.vertical, sc.potential, p, cfg.run.tol);
        });
      }
    }
  }

  rep.exit_code = any_precondition ? 3 : (any_mismatch ? 1 : 0);
  return rep;
}

std::string to_json(const RunReport& rep) {
  std::string out = "{\"run\":{\"seed\":" + std::to_string(rep.run.seed) +
                    ",\"points\":" + std::to_string(rep.run.points) +
                    ",\"tolerance\":" + fmt17(rep.run.tol) + ",\"versions\":{\"engine\":\"" +
                    kEngineVersion + "\",\"report\":1}},\"items\":[";
  bool first = true;
  for (const ReportItem& item : rep.items) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "{\"kind\":\"" + item.kind + "\",\"id\":\"" + item.id + "\",\"chart\":\"";
    append_escaped(out, item.chart);
    out += "\"";
    if (!item.map.empty()) {
      out += ",\"map\":\"";
      append_escaped(out, item.map);
      out += "\"";
    }
    out += ",\"point\":[" + point_string(item.point, ',') + "]";
    out += ",\"residual\":" + fmt17(item.residual) + ",\"scale\":" + fmt17(item.scale);
    out += ",\"verdict\":\"" + item.verdict + "\",\"terms\":{";
    for (std::size_t i = 0; i < item.terms.size(); ++i) {
      if (i) out += ",";
      out += "\"";
      append_escaped(out, item.terms[i].first);
      out += "\":" + fmt17(item.terms[i].second);
    }
    out += "}}";
  }
  out += "\n]}\n";
  return out;
}

std::string to_csv(const RunReport& rep) {
  std::string out = "kind,id,chart,map,point,residual,scale,verdict\n";
  for (const ReportItem& item : rep.items) {
    out += item.kind + "," + item.id + "," + item.chart + "," + item.map + "," +
           point_string(item.point, ';') + "," + fmt17(item.residual) + "," +
           fmt17(item.scale) + "," + item.verdict + "\n";
  }
  return out;
}

std::string list_examples() {
  std::string out = "name                   dim  maps  subs  expected               summary\n";
  for (const atlas::ExampleBundle& b : atlas::registry()) {
    int pass = 0, failv = 0, measure = 0;
    for (const auto& [id, e] : b.expected) {
      if (e == atlas::Expect::pass) ++pass;
      if (e == atlas::Expect::fail) ++failv;
      if (e == atlas::Expect::measure) ++measure;
    }
    std::string verdicts;
    if (pass) verdicts += std::to_string(pass) + " pass";
    if (failv) verdicts += (verdicts.empty() ? "" : ", ") + std::to_string(failv) + " fail";
    if (measure)
      verdicts += (verdicts.empty() ? "" : ", ") + std::to_string(measure) + " measure";
    if (verdicts.empty()) verdicts = "-";
    char line[256];
    std::snprintf(line, sizeof line, "%-22s %3d  %4zu  %4zu  %-22s %s%s\n", b.name.c_str(),
                  b.chart->chart.dim, b.maps.size(), b.submersions.size(), verdicts.c_str(),
                  b.summary.c_str(), b.control ? " [control]" : "");
    out += line;
  }
  return out;
}

namespace {

const std::map<std::string, std::string>& explain_texts() {
  static const std::map<std::string, std::string> texts = [] {
    std::map<std::string, std::string> t;
    const std::string conventions =
        "Conventions: m = chart dimension, J = complex structure, theta = Lee form "
        "(d omega = theta ^ omega for the fundamental 2-form omega), B = theta with the "
        "index raised, L = Lie derivative.  Verdict: pass iff residual <= tol * scale "
        "(default tol 1e-06).\n";
    t["theorem_real_A"] =
        "First-order criterion: M = L_B g - theta (x) theta must be J-invariant, "
        "M(JX, JY) = M(X, Y).\nresidual: max over coordinate pairs of |(J^T M J - M)_ij|; "
        "scale: max(1, max |M_ij|).\nThe term frame_residual is the same defect over the "
        "adapted frame {e_a, J e_a}.\n" +
        conventions;
    t["theorem_real_B"] =
        "Second-order criterion: with D X = nabla_{JX} B + J(nabla_X B),\n"
        "  E = tr nabla^2 B + Ric(B) - nabla_B B\n"
        "      + (1/2) J((nabla_B J) B + (nabla_{JB} J) JB)\n"
        "      + (1/2) g^{pq} ((nabla_{e_p} J)(D e_q) - (nabla_{D e_p} J) e_q) = 0.\n"
        "residual: |E|_g; scale: max(1, sum of the term norms).\n" +
        conventions;
    t["theorem_complex_A"] =
        "First-order criterion over the Hermitian frame Z_j = (e_j - i J e_j)/sqrt(2): "
        "the defect tensor M of theorem_real_A must satisfy M(Z_j, Z_k) = 0.\n"
        "residual: max_jk max(|2 Re M(Z_j, Z_k)|, |2 Im M(Z_j, Z_k)|); equals the "
        "frame_residual term of theorem_real_A by polarization.\n" +
        conventions;
    t["theorem_complex_B"] =
        "Second-order criterion in complex form: with ' and '' the (1,0)/(0,1) parts,\n"
        "  E = tr nabla^2 B + Ric(B) - nabla_B B\n"
        "      - 2 sum_j (nabla_{Z_j} (nabla_{conj Z_j} B)'' + nabla_{(nabla_{Z_j} B)'} "
        "conj Z_j) + 2 nabla_{B'} B'' = 0.\n"
        "residual: sqrt(2 (|Re E'|_g^2 + |Im E'|_g^2)) for the (1,0) part E'; agrees "
        "with theorem_real_B.\n" +
        conventions;
    t["lck_A"] =
        "Locally conformally Kaehler form of the first-order criterion: the tensor "
        "nabla theta + ((m-2)/4) theta (x) theta must be J-invariant (computed from the "
        "lowered covariant derivative of B).\nresidual: max coordinate-pair defect; "
        "scale: max(1, max entry).  Precondition: the chart is l.c.K.\n" +
        conventions;
    t["lck_B"] =
        "Locally conformally Kaehler form of the second-order criterion:\n"
        "  tr nabla^2 B + Ric(B) + ((m-6)/2) nabla_B B "
        "+ (div B - ((m-2)/4) |B|^2) B = 0.\n"
        "residual: norm of the left side; scale: max(1, sum of term norms).\n" +
        conventions;
    t["theta_A"] =
        "Same tensor as lck_A computed directly from the one-form theta: "
        "nabla theta + ((m-2)/4) theta (x) theta must be J-invariant.  The two routes "
        "agree through metric compatibility.\n" +
        conventions;
    t["theta_B"] =
        "Scalar trace of lck_B: delta theta + ((m-2)/4) |theta|^2 = 0 with "
        "delta theta = -div B.\nresidual: absolute value of the left side; scale: "
        "max(1, |delta theta|, ((m-2)/4)|theta|^2).\n" +
        conventions;
    t["gck_A"] =
        "Conformal-factor criterion on a Kaehler chart with potential gamma: the field "
        "xi = J(e^{c gamma} grad gamma), c = (m-6)/2, must be Killing "
        "(max |(L_xi g)_ij| = 0), equivalently the Hessian of e^{c gamma} (of gamma "
        "itself when m = 6) must be J-invariant.\nresidual: max of the Killing and "
        "Hessian defects (terms killing, hessian_invariance).  Precondition: the chart "
        "is Kaehler.\n" +
        conventions;
    t["gck_B"] =
        "Scalar equation for the conformal factor on the Kaehler chart:\n"
        "  Delta gamma + ((m-2)/2) |grad gamma|^2 = 0.\n"
        "residual: absolute value of the left side (terms laplacian, gradient_square).\n" +
        conventions;
    t["dim4_ricci"] =
        "Four-dimensional criterion: the Ricci tensor must be J-invariant, "
        "Ric(JX, JY) = Ric(X, Y).\nresidual: max coordinate-pair defect; scale: "
        "max(1, max |Ric_ij|).\n" +
        conventions;
    t["dim4_scalar"] =
        "Four-dimensional criterion: the scalar curvature s must equal the star-scalar "
        "curvature s* (trace of the curvature action on the fundamental 2-form).\n"
        "residual: |s - s*|; scale: max(1, |s|, |s*|).\n" +
        conventions;
    t["dim4_identity"] =
        "Bookkeeping identity on 4-dimensional l.c.K. charts: "
        "s - s* - 2 delta theta - |theta|^2 = 0.  Expected to hold on every such chart; "
        "a failure indicates an inconsistent structure, not a property of the example.\n" +
        conventions;
    t["subm_product"] =
        "Corank-one submersion criterion: with vertical field V = grad F, the product "
        "of the principal stretches, prod lambda = sqrt(det(g^{-1} phi^* h + P_V)) with "
        "P_V the vertical projector, must equal F^{4/(m-6)} |grad F| "
        "(2 F |grad F| when m = 6).\nresidual: |prod lambda - closed form| (terms "
        "singular_value_product, closed_form, derivative_form).\n" +
        conventions;
    t["subm_eigen"] =
        "Corank-one submersion criterion: div V + V(ln(prod lambda / |V|)) = 0 for the "
        "vertical field V (terms divergence, log_derivative).\n" +
        conventions;
    t["bitension"] =
        "Norm |tau_2|_h of the bitension field tau_2 = (tr (nabla^phi)^2 + Ric^phi) tau "
        "of a registered map; tau is the tension field.  pass iff "
        "|tau_2| <= tol * scale with scale = max(1, |dphi|^3, |tau| |dphi|).\n";
    t["holomorphy"] =
        "Commutation defect max |dphi . J - J . dphi| of a map declared holomorphic.  "
        "pass iff residual <= 1e-08 * max(1, |dphi|); this bound is fixed, not tied to "
        "--tol.\n";
    return t;
  }();
  return texts;
}

}  // namespace

std::string explain(const std::string& condition_id) {
  const auto& texts = explain_texts();
  const auto it = texts.find(condition_id);
  if (it == texts.end()) {
    std::string known;
    for (const auto& [id, text] : texts) {
      if (!known.empty()) known += ", ";
      known += id;
    }
    throw ConfigError("unknown condition id '" + condition_id + "'; known ids: " + known);
  }
  return condition_id + ": " + it->second;
}

}  // namespace biharm::cli
