#include "biharm/geom/frames.hpp"

#include <cmath>

#include "biharm/errors.hpp"

namespace biharm::geom {

namespace {

JVec coordinate_field(const ChartEval& ev, int i) {
  JVec v(static_cast<std::size_t>(ev.dim()));
  for (int k = 0; k < ev.dim(); ++k)
    v[static_cast<std::size_t>(k)] = Jet::constant(ev.dim(), ev.budget(), k == i ? 1.0 : 0.0);
  return v;
}

void project_out(const ChartEval& ev, JVec& v, const std::vector<JVec>& frame) {
  for (const JVec& u : frame) {
    const Jet c = inner(ev, v, u);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * u[k];
  }
}

JVec normalized(const ChartEval& ev, const JVec& v) {
  const Jet n = jets::sqrt(inner(ev, v, v));
  const Jet inv = jets::inverse(n);
  JVec r(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) r[k] = v[k] * inv;
  return r;
}

}  // namespace

std::vector<JVec> orthonormal_frame(const ChartEval& ev) {
  const int n = ev.dim();
  std::vector<JVec> frame;
  frame.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    JVec v = coordinate_field(ev, i);
    project_out(ev, v, frame);
    const double q = inner(ev, v, v).value();
    if (!(q > 1e-20))
      throw PreconditionError("orthonormal_frame: degenerate metric at point");
    frame.push_back(normalized(ev, v));
  }
  return frame;
}

std::vector<JVec> j_adapted_frame(const ChartEval& ev, const JMat& j) {
  const int n = ev.dim();
  if (n % 2 != 0) throw DimensionError("j_adapted_frame: odd dimension");
  std::vector<JVec> frame;
  frame.reserve(static_cast<std::size_t>(n));
  int cand = 0;
  while (static_cast<int>(frame.size()) < n) {
    // First coordinate field that is not nearly inside the current span.
    JVec v;
    for (; cand < n; ++cand) {
      v = coordinate_field(ev, cand);
      project_out(ev, v, frame);
      if (inner(ev, v, v).value() > 1e-10) break;
    }
    if (cand == n)
      throw PreconditionError("j_adapted_frame: coordinate fields exhausted");
    ++cand;
    const JVec e = normalized(ev, v);
    JVec f = mat_apply(j, e);
    // When J is exactly compatible and skew, J e is already unit and normal
    // to the previous span; re-orthonormalize anyway so small defects in the
    // inputs do not leak into downstream contractions.
    project_out(ev, f, frame);
    const Jet fe = inner(ev, f, e);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] -= fe * e[k];
    if (!(inner(ev, f, f).value() > 1e-10))
      throw PreconditionError("j_adapted_frame: J e collapsed under projection");
    frame.push_back(e);
    frame.push_back(normalized(ev, f));
  }
  return frame;
}

}  // namespace biharm::geom
