#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "biharm/cli/cli.hpp"
#include "biharm/errors.hpp"

namespace biharm::cli {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

struct Entry {
  int line = 0;
  std::vector<std::string> key;
  std::string value;
};

struct Section {
  int line = 0;
  std::string kind;
  std::string name;
  std::vector<Entry> entries;
};

std::vector<Section> lex_sections(const std::string& text) {
  std::vector<Section> out;
  bool open = false;
  int line_no = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line == "}") {
      if (!open) fail(line_no, "unmatched '}'");
      open = false;
      continue;
    }
    if (line.back() == '{') {
      if (open) fail(line_no, "sections do not nest");
      const auto head = split_ws(trim(line.substr(0, line.size() - 1)));
      if (head.empty() || head.size() > 2)
        fail(line_no, "section header must be '<kind> [name] {'");
      out.push_back({line_no, head[0], head.size() == 2 ? head[1] : "", {}});
      open = true;
      continue;
    }
    const auto eq = line.find('=');
    if (!open) fail(line_no, "expected a section header, got '" + line + "'");
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    Entry e{line_no, split_ws(trim(line.substr(0, eq))), trim(line.substr(eq + 1))};
    if (e.key.empty()) fail(line_no, "missing key before '='");
    if (e.value.empty()) fail(line_no, "missing value for key '" + e.key[0] + "'");
    out.back().entries.push_back(std::move(e));
  }
  if (open) fail(line_no, "unterminated section");
  return out;
}

long long to_int(const Entry& e) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc{} || p != e.value.data() + e.value.size())
    fail(e.line, "'" + e.value + "' is not an integer");
  return v;
}

double to_double_tok(int line, const std::string& tok) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(line, "'" + tok + "' is not a number");
  }
}

std::vector<double> to_doubles(const Entry& e) {
  std::vector<double> out;
  for (const std::string& tok : split_ws(e.value)) out.push_back(to_double_tok(e.line, tok));
  return out;
}

bool to_bool(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail(e.line, "'" + e.value + "' must be true or false");
}

int to_index(const Entry& e, const std::string& tok, int dim, const char* what) {
  int v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size() || v < 1 || v > dim)
    fail(e.line, std::string(what) + " index '" + tok + "' must be between 1 and " +
                     std::to_string(dim));
  return v;
}

expr::Expr parse_expr(int line, const std::string& text, std::span<const std::string> coords,
                      const std::string& what) {
  try {
    return expr::parse(text, coords);
  } catch (const Error& err) {
    fail(line, what + ": " + err.what());
  }
}

atlas::Expect to_expect(const Entry& e) {
  if (e.value == "pass") return atlas::Expect::pass;
  if (e.value == "fail") return atlas::Expect::fail;
  if (e.value == "measure") return atlas::Expect::measure;
  fail(e.line, "verdict '" + e.value + "' must be pass, fail or measure");
}

std::vector<std::string> standard_j(int dim) {
  std::vector<std::string> j(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), "0");
  for (int k = 0; k + 1 < dim; k += 2) {
    j[static_cast<std::size_t>((k + 1) * dim + k)] = "1";
    j[static_cast<std::size_t>(k * dim + (k + 1))] = "-1";
  }
  return j;
}

std::shared_ptr<herm::HermitianChart> build_chart(const Section& s) {
  std::vector<std::string> coords;
  std::vector<double> lo, hi;
  std::vector<Entry> require;
  std::map<std::pair<int, int>, Entry> g, j;
  bool j_standard = false;

  for (const Entry& e : s.entries) {
    const std::string& k = e.key[0];
    if (k == "coords" && e.key.size() == 1) {
      coords = split_ws(e.value);
    } else if (k == "lo" && e.key.size() == 1) {
      lo = to_doubles(e);
    } else if (k == "hi" && e.key.size() == 1) {
      hi = to_doubles(e);
    } else if (k == "require" && e.key.size() == 1) {
      require.push_back(e);
    } else if ((k == "g" || k == "j") && e.key.size() == 3) {
      if (coords.empty()) fail(e.line, "'coords' must come before metric entries");
      const int dim = static_cast<int>(coords.size());
      const int a = to_index(e, e.key[1], dim, k == "g" ? "metric" : "complex structure");
      const int b = to_index(e, e.key[2], dim, k == "g" ? "metric" : "complex structure");
      (k == "g" ? g : j).insert_or_assign({a, b}, e);
    } else if (k == "j" && e.key.size() == 1 && e.value == "standard") {
      j_standard = true;
    } else {
      fail(e.line, "unknown chart key '" + k + "'");
    }
  }

  if (coords.empty()) fail(s.line, "chart '" + s.name + "' needs a 'coords' entry");
  const int dim = static_cast<int>(coords.size());
  if (dim > jets::kMaxDim)
    fail(s.line, "chart '" + s.name + "' has dimension " + std::to_string(dim) +
                     "; the jet engine supports at most " + std::to_string(jets::kMaxDim));
  for (const auto& c : coords)
    if (std::count(coords.begin(), coords.end(), c) != 1)
      fail(s.line, "duplicate coordinate name '" + c + "'");
  if (lo.size() != coords.size() || hi.size() != coords.size())
    fail(s.line, "chart '" + s.name + "' needs 'lo' and 'hi' with one bound per coordinate");
  if (g.empty()) fail(s.line, "chart '" + s.name + "' has no metric entries");

  auto hc = std::make_shared<herm::HermitianChart>();
  geom::Chart& c = hc->chart;
  c.name = s.name;
  c.dim = dim;
  c.coords = coords;
  c.region.lo = lo;
  c.region.hi = hi;
  for (const Entry& e : require)
    c.region.require.push_back(parse_expr(e.line, e.value, coords, "require expression"));

  std::vector<std::string> metric(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim),
                                  "0");
  std::vector<int> metric_line(metric.size(), s.line);
  for (const auto& [idx, e] : g) {
    const auto [a, b] = idx;
    metric[static_cast<std::size_t>((a - 1) * dim + (b - 1))] = e.value;
    metric[static_cast<std::size_t>((b - 1) * dim + (a - 1))] = e.value;
    metric_line[static_cast<std::size_t>((a - 1) * dim + (b - 1))] = e.line;
    metric_line[static_cast<std::size_t>((b - 1) * dim + (a - 1))] = e.line;
  }
  for (std::size_t i = 0; i < metric.size(); ++i)
    c.metric.push_back(parse_expr(metric_line[i], metric[i], coords, "metric entry"));

  if (j_standard) {
    if (!j.empty()) fail(s.line, "chart '" + s.name + "' mixes 'j = standard' with j entries");
    if (dim % 2 != 0)
      fail(s.line, "chart '" + s.name + "' has odd dimension; 'j = standard' needs an even one");
    for (const std::string& text : standard_j(dim))
      hc->j.push_back(parse_expr(s.line, text, coords, "complex structure entry"));
  } else if (!j.empty()) {
    std::vector<std::string> jm(metric.size(), "0");
    std::vector<int> jm_line(metric.size(), s.line);
    for (const auto& [idx, e] : j) {
      const auto [a, b] = idx;
      jm[static_cast<std::size_t>((a - 1) * dim + (b - 1))] = e.value;
      jm_line[static_cast<std::size_t>((a - 1) * dim + (b - 1))] = e.line;
    }
    for (std::size_t i = 0; i < jm.size(); ++i)
      hc->j.push_back(parse_expr(jm_line[i], jm[i], coords, "complex structure entry"));
  }
  try {
    hc->validate();
  } catch (const Error& err) {
    fail(s.line, std::string("chart '") + s.name + "': " + err.what());
  }
  return hc;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  const std::vector<Section> sections = lex_sections(text);
  RunConfig cfg;

  std::map<std::string, std::shared_ptr<herm::HermitianChart>> charts;
  std::map<std::string, maps::SmoothMap> mapdefs;
  std::map<std::string, atlas::SubmersionCase> subdefs;
  std::vector<std::string> map_order, sub_order;

  auto named = [](const Section& s) {
    if (s.name.empty()) fail(s.line, s.kind + " sections need a name: '" + s.kind + " <name> {'");
  };

  for (const Section& s : sections) {
    if (s.kind == "chart") {
      named(s);
      if (charts.count(s.name)) fail(s.line, "duplicate chart '" + s.name + "'");
      charts.emplace(s.name, build_chart(s));
    }
  }
  for (const Section& s : sections) {
    if (s.kind != "map") continue;
    named(s);
    if (mapdefs.count(s.name)) fail(s.line, "duplicate map '" + s.name + "'");
    maps::SmoothMap m;
    m.name = s.name;
    m.declared_holomorphic = true;
    for (const Entry& e : s.entries) {
      const std::string& k = e.key[0];
      if (k == "from" && e.key.size() == 1) {
        const auto it = charts.find(e.value);
        if (it == charts.end()) fail(e.line, "unknown chart '" + e.value + "'");
        m.domain = it->second;
      } else if (k == "to" && e.key.size() == 1) {
        const auto it = charts.find(e.value);
        if (it == charts.end()) fail(e.line, "unknown chart '" + e.value + "'");
        m.codomain = it->second;
      } else if (k == "holomorphic" && e.key.size() == 1) {
        m.declared_holomorphic = to_bool(e);
      } else if (k == "c" && e.key.size() == 2) {
        // collected below once the codomain dimension is known
      } else {
        fail(e.line, "unknown map key '" + k + "'");
      }
    }
    if (!m.domain) fail(s.line, "map '" + s.name + "' needs a 'from' chart");
    if (!m.codomain) fail(s.line, "map '" + s.name + "' needs a 'to' chart");
    const int dim_to = m.codomain->chart.dim;
    std::map<int, Entry> by_index;
    for (const Entry& e : s.entries) {
      if (e.key[0] != "c" || e.key.size() != 2) continue;
      const int a = to_index(e, e.key[1], dim_to, "component");
      if (!by_index.emplace(a, e).second) fail(e.line, "duplicate component " + e.key[1]);
    }
    for (int a = 1; a <= dim_to; ++a) {
      const auto it = by_index.find(a);
      if (it == by_index.end())
        fail(s.line, "map '" + s.name + "' is missing component c " + std::to_string(a));
      m.components.push_back(parse_expr(it->second.line, it->second.value,
                                        m.domain->chart.coords, "component expression"));
    }
    try {
      m.validate();
    } catch (const Error& err) {
      fail(s.line, std::string("map '") + s.name + "': " + err.what());
    }
    mapdefs.emplace(s.name, std::move(m));
    map_order.push_back(s.name);
  }
  for (const Section& s : sections) {
    if (s.kind != "submersion") continue;
    named(s);
    if (subdefs.count(s.name)) fail(s.line, "duplicate submersion '" + s.name + "'");
    atlas::SubmersionCase sc;
    const Entry* potential = nullptr;
    std::map<int, Entry> vert;
    for (const Entry& e : s.entries) {
      const std::string& k = e.key[0];
      if (k == "map" && e.key.size() == 1) {
        const auto it = mapdefs.find(e.value);
        if (it == mapdefs.end()) fail(e.line, "unknown map '" + e.value + "'");
        sc.map = it->second;
      } else if (k == "potential" && e.key.size() == 1) {
        potential = &e;
      } else if (k == "v" && e.key.size() == 2) {
        if (!sc.map.domain) fail(e.line, "'map' must come before vertical entries");
        const int a = to_index(e, e.key[1], sc.map.domain->chart.dim, "vertical");
        if (!vert.emplace(a, e).second) fail(e.line, "duplicate vertical entry v " + e.key[1]);
      } else {
        fail(e.line, "unknown submersion key '" + k + "'");
      }
    }
    if (!sc.map.domain) fail(s.line, "submersion '" + s.name + "' needs a 'map' entry");
    if (!potential) fail(s.line, "submersion '" + s.name + "' needs a 'potential' entry");
    const auto& coords = sc.map.domain->chart.coords;
    for (int a = 1; a <= sc.map.domain->chart.dim; ++a) {
      const auto it = vert.find(a);
      sc.vertical.push_back(it == vert.end()
                                ? parse_expr(s.line, "0", coords, "vertical entry")
                                : parse_expr(it->second.line, it->second.value, coords,
                                             "vertical entry"));
    }
    sc.potential = parse_expr(potential->line, potential->value, coords, "potential expression");
    subdefs.emplace(s.name, std::move(sc));
    sub_order.push_back(s.name);
  }

  bool saw_run = false;
  for (const Section& s : sections) {
    if (s.kind == "chart" || s.kind == "map" || s.kind == "submersion") continue;
    if (s.kind == "run") {
      if (saw_run) fail(s.line, "duplicate run section");
      saw_run = true;
      for (const Entry& e : s.entries) {
        const std::string& k = e.key[0];
        if (k == "points") {
          const long long v = to_int(e);
          if (v < 1) fail(e.line, "points must be at least 1");
          cfg.run.points = static_cast<int>(v);
        } else if (k == "seed") {
          cfg.run.seed = static_cast<std::uint64_t>(to_int(e));
        } else if (k == "tol") {
          const double v = to_double_tok(e.line, e.value);
          if (!(v > 0.0)) fail(e.line, "tol must be positive");
          cfg.run.tol = v;
        } else {
          fail(e.line, "unknown run key '" + k + "'");
        }
      }
      continue;
    }
    if (s.kind == "bundle") {
      named(s);
      Target t;
      try {
        t.bundle = atlas::find_bundle(s.name);
      } catch (const Error& err) {
        fail(s.line, err.what());
      }
      for (const Entry& e : s.entries) {
        if (e.key[0] == "conditions" && e.key.size() == 1) {
          if (e.value != "all") t.conditions = split_ws(e.value);
        } else {
          fail(e.line, "unknown bundle key '" + e.key[0] + "'");
        }
      }
      for (const std::string& id : t.conditions) {
        const auto& known = condition_ids();
        if (std::find(known.begin(), known.end(), id) == known.end())
          fail(s.line, "unknown condition id '" + id + "'");
      }
      cfg.targets.push_back(std::move(t));
      continue;
    }
    if (s.kind == "target") {
      named(s);
      Target t;
      atlas::ExampleBundle& b = t.bundle;
      b.name = s.name;
      std::vector<std::pair<int, std::string>> expects_seen;
      const Entry* gamma = nullptr;
      for (const Entry& e : s.entries) {
        const std::string& k = e.key[0];
        if (k == "chart" && e.key.size() == 1) {
          const auto it = charts.find(e.value);
          if (it == charts.end()) fail(e.line, "unknown chart '" + e.value + "'");
          b.chart = it->second;
        } else if (k == "base" && e.key.size() == 1) {
          const auto it = charts.find(e.value);
          if (it == charts.end()) fail(e.line, "unknown chart '" + e.value + "'");
          b.base = it->second;
        } else if (k == "gamma" && e.key.size() == 1) {
          gamma = &e;
        } else if (k == "maps" && e.key.size() == 1) {
          for (const std::string& name : split_ws(e.value)) {
            const auto it = mapdefs.find(name);
            if (it == mapdefs.end()) fail(e.line, "unknown map '" + name + "'");
            b.maps.push_back(it->second);
          }
        } else if (k == "submersions" && e.key.size() == 1) {
          for (const std::string& name : split_ws(e.value)) {
            const auto it = subdefs.find(name);
            if (it == subdefs.end()) fail(e.line, "unknown submersion '" + name + "'");
            b.submersions.push_back(it->second);
          }
        } else if (k == "conditions" && e.key.size() == 1) {
          if (e.value != "all") t.conditions = split_ws(e.value);
        } else if (k == "expect" && e.key.size() == 2) {
          b.expected.emplace_back(e.key[1], to_expect(e));
          expects_seen.emplace_back(e.line, e.key[1]);
        } else if (k == "bitension" && e.key.size() == 1) {
          b.bitension = to_expect(e);
        } else {
          fail(e.line, "unknown target key '" + k + "'");
        }
      }
      if (!b.chart) fail(s.line, "target '" + s.name + "' needs a 'chart' entry");
      if (b.base && !gamma) fail(s.line, "target '" + s.name + "' has a base but no gamma");
      if (gamma && !b.base) fail(s.line, "target '" + s.name + "' has a gamma but no base");
      if (gamma)
        b.gamma = parse_expr(gamma->line, gamma->value, b.base->chart.coords,
                             "gamma expression");
      const std::vector<std::string> applicable = applicable_ids(b);
      for (const auto& [line, id] : expects_seen)
        if (std::find(applicable.begin(), applicable.end(), id) == applicable.end())
          fail(line, "condition '" + id + "' does not apply to target '" + s.name + "'");
      for (const std::string& id : t.conditions)
        if (std::find(applicable.begin(), applicable.end(), id) == applicable.end())
          fail(s.line, "condition '" + id + "' does not apply to target '" + s.name + "'");
      if (expects_seen.empty())
        for (const std::string& id : applicable) b.expected.emplace_back(id, atlas::Expect::pass);
      cfg.targets.push_back(std::move(t));
      continue;
    }
    fail(s.line, "unknown section kind '" + s.kind + "'");
  }

  if (cfg.targets.empty()) throw ConfigError("config defines no targets");
  return cfg;
}

namespace {

std::string fmt_num(double x) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

void emit_chart(std::string& out, const herm::HermitianChart& hc) {
  const geom::Chart& c = hc.chart;
  out += "chart " + c.name + " {\n  coords =";
  for (const auto& n : c.coords) out += " " + n;
  out += "\n  lo =";
  for (double v : c.region.lo) out += " " + fmt_num(v);
  out += "\n  hi =";
  for (double v : c.region.hi) out += " " + fmt_num(v);
  out += "\n";
  for (const auto& e : c.region.require)
    out += "  require = " + expr::to_string(e, c.coords) + "\n";
  for (int i = 0; i < c.dim; ++i)
    for (int j = i; j < c.dim; ++j) {
      const std::string text =
          expr::to_string(c.metric[static_cast<std::size_t>(i * c.dim + j)], c.coords);
      if (text != "0")
        out += "  g " + std::to_string(i + 1) + " " + std::to_string(j + 1) + " = " + text + "\n";
    }
  for (int i = 0; i < c.dim && hc.has_j(); ++i)
    for (int j = 0; j < c.dim; ++j) {
      const std::string text =
          expr::to_string(hc.j[static_cast<std::size_t>(i * c.dim + j)], c.coords);
      if (text != "0")
        out += "  j " + std::to_string(i + 1) + " " + std::to_string(j + 1) + " = " + text + "\n";
    }
  out += "}\n\n";
}

void emit_map(std::string& out, const maps::SmoothMap& m) {
  out += "map " + m.name + " {\n";
  out += "  from = " + m.domain->chart.name + "\n";
  out += "  to = " + m.codomain->chart.name + "\n";
  if (!m.declared_holomorphic) out += "  holomorphic = false\n";
  for (std::size_t a = 0; a < m.components.size(); ++a)
    out += "  c " + std::to_string(a + 1) + " = " +
           expr::to_string(m.components[a], m.domain->chart.coords) + "\n";
  out += "}\n\n";
}

}  // namespace

std::string export_example(const std::string& name) {
  const atlas::ExampleBundle& b = atlas::find_bundle(name);
  std::string out;
  out += "# " + b.name + ": " + b.summary + "\n";
  out += "# written by: biharm export-example " + b.name + "\n\n";
  out += "run {\n  points = 5\n  seed = 7\n  tol = 1e-06\n}\n\n";

  std::vector<const herm::HermitianChart*> charts;
  auto add_chart = [&charts](const herm::HermitianChart* hc) {
    for (const auto* seen : charts)
      if (seen->chart.name == hc->chart.name) return;
    charts.push_back(hc);
  };
  add_chart(b.chart.get());
  if (b.base) add_chart(b.base.get());
  for (const auto& m : b.maps) {
    add_chart(m.domain.get());
    add_chart(m.codomain.get());
  }
  for (const auto& sc : b.submersions) {
    add_chart(sc.map.domain.get());
    add_chart(sc.map.codomain.get());
  }
  for (const auto* hc : charts) emit_chart(out, *hc);
  std::vector<std::string> emitted;
  const auto emit_once = [&out, &emitted](const maps::SmoothMap& m) {
    if (std::find(emitted.begin(), emitted.end(), m.name) != emitted.end()) return;
    emitted.push_back(m.name);
    emit_map(out, m);
  };
  for (const auto& m : b.maps) emit_once(m);
  for (const auto& sc : b.submersions) emit_once(sc.map);
  for (const auto& sc : b.submersions) {
    const auto& coords = sc.map.domain->chart.coords;
    out += "submersion " + sc.map.name + " {\n  map = " + sc.map.name + "\n";
    for (std::size_t i = 0; i < sc.vertical.size(); ++i) {
      const std::string text = expr::to_string(sc.vertical[i], coords);
      if (text != "0") out += "  v " + std::to_string(i + 1) + " = " + text + "\n";
    }
    out += "  potential = " + expr::to_string(sc.potential, coords) + "\n}\n\n";
  }

  out += "target " + b.name + " {\n";
  out += "  chart = " + b.chart->chart.name + "\n";
  if (b.base) out += "  base = " + b.base->chart.name + "\n";
  if (b.gamma)
    out += "  gamma = " + expr::to_string(*b.gamma, b.base->chart.coords) + "\n";
  if (!b.maps.empty()) {
    out += "  maps =";
    for (const auto& m : b.maps) out += " " + m.name;
    out += "\n";
  }
  if (!b.submersions.empty()) {
    out += "  submersions =";
    for (const auto& sc : b.submersions) out += " " + sc.map.name;
    out += "\n";
  }
  out += std::string("  bitension = ") + atlas::to_string(b.bitension) + "\n";
  for (const auto& [id, e] : b.expected)
    out += "  expect " + id + " = " + atlas::to_string(e) + "\n";
  out += "}\n";
  return out;
}

}  // namespace biharm::cli
