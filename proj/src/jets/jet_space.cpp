#include "biharm/jets/jet_space.hpp"

#include <algorithm>
#include <array>
#include <memory>

namespace biharm::jets {

namespace {

// Enumerate exponent tuples of exact degree d in lexicographic order
// (first slot most significant, descending exponent).
void enumerate_degree(int dim, int d, int slot, MultiIndex& cur,
                      std::vector<MultiIndex>& out) {
  if (slot == dim - 1) {
    cur.set(slot, d);
    out.push_back(cur);
    cur.set(slot, 0);
    return;
  }
  for (int e = d; e >= 0; --e) {
    cur.set(slot, e);
    enumerate_degree(dim, d - e, slot + 1, cur, out);
  }
  cur.set(slot, 0);
}

} // namespace

JetSpace::JetSpace(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1 || dim > kMaxDim)
    throw CapabilityError("jet dimension must be in [1,8], got " + std::to_string(dim));
  if (order < 0 || order > kMaxOrder)
    throw CapabilityError("jet order must be in [0,4], got " + std::to_string(order));

  MultiIndex cur(dim);
  for (int d = 0; d <= order; ++d) enumerate_degree(dim, d, 0, cur, indices_);
  rank_.reserve(indices_.size() * 2);
  for (std::size_t r = 0; r < indices_.size(); ++r)
    rank_.emplace(indices_[r].key(), static_cast<std::int32_t>(r));

  // Product plan: group all admissible coefficient pairs by output rank.
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> per_out(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    const int di = indices_[i].degree();
    for (std::size_t j = 0; j < indices_.size(); ++j) {
      if (di + indices_[j].degree() > order) continue;
      MultiIndex sum(dim);
      for (int v = 0; v < dim; ++v) sum.set(v, indices_[i][v] + indices_[j][v]);
      per_out[rank_.at(sum.key())].emplace_back(static_cast<std::int32_t>(i),
                                                static_cast<std::int32_t>(j));
    }
  }
  for (std::size_t out = 0; out < per_out.size(); ++out) {
    kernels::PlanRun run;
    run.out = static_cast<std::int32_t>(out);
    run.begin = static_cast<std::int32_t>(ia_.size());
    run.count = static_cast<std::int32_t>(per_out[out].size());
    for (auto [i, j] : per_out[out]) {
      ia_.push_back(i);
      ib_.push_back(j);
    }
    runs_.push_back(run);
  }

  // Partial-derivative tables into the order-1-lower layout.
  dsrc_.resize(static_cast<std::size_t>(dim));
  dfac_.resize(static_cast<std::size_t>(dim));
  if (order > 0) {
    std::vector<MultiIndex> lower;
    for (int d = 0; d < order; ++d) enumerate_degree(dim, d, 0, cur, lower);
    for (int v = 0; v < dim; ++v) {
      auto& src = dsrc_[static_cast<std::size_t>(v)];
      auto& fac = dfac_[static_cast<std::size_t>(v)];
      src.reserve(lower.size());
      fac.reserve(lower.size());
      for (const MultiIndex& beta : lower) {
        src.push_back(rank_.at(beta.bumped(v).key()));
        fac.push_back(static_cast<double>(beta[v] + 1));
      }
    }
  }
}

std::size_t JetSpace::rank(const MultiIndex& mi) const {
  if (mi.dim() != dim_) throw DimensionError("multi-index dimension mismatch");
  auto it = rank_.find(mi.key());
  if (it == rank_.end())
    throw CapabilityError("multi-index " + mi.str() + " exceeds truncation order " +
                          std::to_string(order_));
  return static_cast<std::size_t>(it->second);
}

kernels::PlanView JetSpace::plan() const {
  return kernels::PlanView{runs_.data(), runs_.size(), ia_.data(), ib_.data()};
}

const JetSpace& jet_space(int dim, int order) {
  struct Registry {
    std::array<std::array<std::unique_ptr<JetSpace>, kMaxOrder + 1>, kMaxDim + 1> s;
    Registry() {
      for (int d = 1; d <= kMaxDim; ++d)
        for (int o = 0; o <= kMaxOrder; ++o)
          s[static_cast<std::size_t>(d)][static_cast<std::size_t>(o)] =
              std::make_unique<JetSpace>(d, o);
    }
  };
  static const Registry reg;
  if (dim < 1 || dim > kMaxDim)
    throw CapabilityError("jet dimension must be in [1,8], got " + std::to_string(dim));
  if (order < 0 || order > kMaxOrder)
    throw CapabilityError("jet order must be in [0,4], got " + std::to_string(order));
  return *reg.s[static_cast<std::size_t>(dim)][static_cast<std::size_t>(order)];
}

} // namespace biharm::jets
