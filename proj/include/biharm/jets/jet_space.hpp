#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "biharm/jets/kernels.hpp"
#include "biharm/jets/multi_index.hpp"

namespace biharm::jets {

/// Dense coefficient layout for truncated Taylor expansions of a fixed
/// (dim, order).  Monomials are stored in graded lexicographic order: all
/// degrees d = 0..order, lexicographic within each degree.  The layout of
/// order k is a prefix of the layout of order k+1, so truncation is a prefix
/// copy.  Instances are immutable and shared; obtain them via jet_space().
class JetSpace {
public:
  JetSpace(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t size() const { return indices_.size(); }

  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& index(std::size_t rank) const { return indices_[rank]; }

  /// Graded-lex rank of a multi-index; throws CapabilityError when the
  /// degree exceeds this space's order.
  std::size_t rank(const MultiIndex& mi) const;

  kernels::PlanView plan() const;

  /// Partial-derivative table for variable v: entry t of the order-1-lower
  /// layout reads source coefficient deriv_src(v)[t] scaled by
  /// deriv_factor(v)[t].
  const std::vector<std::int32_t>& deriv_src(int v) const { return dsrc_[static_cast<std::size_t>(v)]; }
  const std::vector<double>& deriv_factor(int v) const { return dfac_[static_cast<std::size_t>(v)]; }

private:
  int dim_;
  int order_;
  std::vector<MultiIndex> indices_;
  std::unordered_map<std::uint64_t, std::int32_t> rank_;
  // product plan: for each output rank, a run of index pairs (ia, ib)
  std::vector<kernels::PlanRun> runs_;
  std::vector<std::int32_t> ia_, ib_;
  std::vector<std::vector<std::int32_t>> dsrc_;
  std::vector<std::vector<double>> dfac_;
};

/// Shared immutable layout registry, dims 1..8, orders 0..4.
const JetSpace& jet_space(int dim, int order);

} // namespace biharm::jets
