#pragma once

#include "biharm/geom/chart_eval.hpp"

namespace biharm::geom {

/// Jet-valued orthonormal frame fields obtained by Gram-Schmidt on the
/// coordinate fields (deterministic: candidates scanned in coordinate order).
std::vector<JVec> orthonormal_frame(const ChartEval& ev);

/// Orthonormal frame adapted to an almost complex structure:
/// {e_1, J e_1, e_2, J e_2, ...}.  Requires even dimension and a J that is
/// g-compatible to working precision; candidates are the coordinate fields,
/// scanned in order, skipping ones that have nearly collapsed after
/// projection.
std::vector<JVec> j_adapted_frame(const ChartEval& ev, const JMat& j);

}  // namespace biharm::geom
