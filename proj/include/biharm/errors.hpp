#pragma once

#include <stdexcept>
#include <string>

namespace biharm {

/// Base class for every error the engine raises deliberately.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Request exceeds a hard capability bound (truncation order, dimension cap).
class CapabilityError : public Error {
public:
  using Error::Error;
};

/// Numerically invalid input: point outside a chart domain, log/sqrt of a
/// non-positive leading coefficient, division by a zero leading coefficient,
/// singular or non-positive-definite metric.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Structural mismatch: wrong tensor shape, wrong chart dimension for an
/// operation that only exists in specific dimensions.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A checker's mathematical precondition failed (chart is not locally
/// conformally Kaehler, base metric is not Kaehler, map is not holomorphic,
/// vertical field does not span the kernel, ...).  Distinct from a failed
/// verdict: the check never ran.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Malformed configuration or expression text.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace biharm
