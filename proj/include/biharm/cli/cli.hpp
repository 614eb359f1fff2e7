#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "biharm/atlas/atlas.hpp"
#include "biharm/cond/conditions.hpp"

namespace biharm::cli {

struct RunSettings {
  int points = 5;
  std::uint64_t seed = 7;
  double tol = cond::kDefaultTol;
};

/// One verification target: a bundle (built-in or assembled from config
/// sections) plus an optional whitelist of condition ids to run.
struct Target {
  atlas::ExampleBundle bundle;
  std::vector<std::string> conditions;  // empty: run everything applicable
};

struct RunConfig {
  RunSettings run;
  std::vector<Target> targets;
};

/// Parses the key-value config format (the format written by
/// `export_example`; see README for a commented example).  Throws
/// ConfigError with a line number on malformed input.
RunConfig parse_config(const std::string& text);

struct ReportItem {
  std::string kind;  // "condition" | "bitension" | "identity"
  std::string id;
  std::string chart;
  std::string map;  // empty for chart-level conditions
  std::vector<double> point;
  double residual = 0.0;
  double scale = 1.0;
  std::string verdict;  // "pass" | "fail" | "precondition"
  std::vector<std::pair<std::string, double>> terms;
};

struct RunReport {
  RunSettings run;
  std::vector<ReportItem> items;
  /// Human-readable notes for mismatches and precondition failures.
  std::vector<std::string> diagnostics;
  /// 0 all expectations met, 1 verdict mismatch, 3 precondition failure.
  int exit_code = 0;
};

/// Runs every target: condition suites at sampled points, bitension and
/// holomorphy of each registered map, submersion criteria.  Item order is
/// deterministic (targets in config order, conditions in canonical order,
/// points in sample order).  Throws ConfigError on configuration problems;
/// per-point numeric precondition failures become "precondition" items.
RunReport run_verify(const RunConfig& config);

/// Fixed-field-order JSON with floats in full round-trip precision; two runs
/// of the same config produce byte-identical output.
std::string to_json(const RunReport& report);
/// Lossy one-line-per-item summary; the JSON is the record.
std::string to_csv(const RunReport& report);

/// All condition ids in canonical report order.
const std::vector<std::string>& condition_ids();
/// Condition ids a bundle can produce, given its dimension, base/potential
/// and submersion cases, in canonical order.
std::vector<std::string> applicable_ids(const atlas::ExampleBundle& bundle);

/// Table of built-in bundles (stable name order).
std::string list_examples();
/// The equation a condition id verifies, with residual/scale/tolerance
/// semantics.  Throws ConfigError on unknown ids, listing the valid ones.
std::string explain(const std::string& condition_id);
/// Config file reproducing a built-in bundle, ready for `verify`.
std::string export_example(const std::string& name);

}  // namespace biharm::cli
