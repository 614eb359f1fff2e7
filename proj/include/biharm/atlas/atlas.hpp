#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biharm/herm/hermitian.hpp"
#include "biharm/maps/maps.hpp"

namespace biharm::atlas {

/// What a bundle promises for one condition id (or for map bitension):
/// criteria expected to hold, criteria expected to fail on a control, and
/// quantities that are recorded without a verdict.
enum class Expect { pass, fail, measure };

const char* to_string(Expect e);

/// A corank-one projection together with its vertical gradient field and the
/// potential whose gradient it is.
struct SubmersionCase {
  maps::SmoothMap map;
  std::vector<expr::Expr> vertical;
  expr::Expr potential;
};

/// A self-contained worked example: the chart the condition checkers run on,
/// the Kaehler base + potential behind it (when the example is built that
/// way), registered maps, and the expected verdict per condition id.
struct ExampleBundle {
  std::string name;
  std::string summary;
  std::shared_ptr<herm::HermitianChart> chart;
  std::shared_ptr<herm::HermitianChart> base;  // Kaehler base for the potential criterion
  std::optional<expr::Expr> gamma;             // conformal potential on the base
  std::vector<maps::SmoothMap> maps;
  std::vector<SubmersionCase> submersions;
  std::vector<std::pair<std::string, Expect>> expected;  // fixed iteration order
  Expect bitension = Expect::pass;  // verdict class for registered maps' bitension
  bool control = false;
};

/// Flat C^n with the standard complex structure; 1 <= n <= 4.
ExampleBundle make_flat_cn(int n);

/// C^2 minus the origin with metric q^-2 delta for the quadratic potential
/// with weights (alpha1, alpha2); the weights are equal exactly when every
/// criterion holds.  Requires positive weights.
ExampleBundle make_conformal_c2(double alpha1, double alpha2);

/// The cone over the round 3-sphere, carrying the cone complex structure,
/// its Kaehler metric, and the r^-4-rescaled metric the criteria act on.
ExampleBundle make_sasakian_cone();

/// The half-plane times C^{n-1} family (2 <= n <= 4): product chart with the
/// w2-weighted metric, its Kaehler base, and the corank-one projection.
ExampleBundle make_inoue_family(int n);

/// All built-in bundles in fixed registry order.
const std::vector<ExampleBundle>& registry();

/// Bundle lookup by name; throws ConfigError listing valid names.
const ExampleBundle& find_bundle(const std::string& name);

/// Deterministic sampler: uniform draws inside the chart box shrunk by
/// `margin`, rejecting points where any region requirement evaluates below
/// the margin.  Same (chart, count, seed) always yields the same list.
/// Throws ConfigError when the region rejects too many consecutive draws.
std::vector<std::vector<double>> sample_points(const geom::Chart& chart, int count,
                                               std::uint64_t seed, double margin = 0.1);

}  // namespace biharm::atlas
