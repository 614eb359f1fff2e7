#pragma once

#include <cstddef>
#include <cstdint>

namespace biharm::jets::kernels {

/// One output coefficient of a truncated product: dst[out] is the sum of
/// a[ia[t]] * b[ib[t]] over t in [begin, begin + count).
struct PlanRun {
  std::int32_t out;
  std::int32_t begin;
  std::int32_t count;
};

struct PlanView {
  const PlanRun* runs;
  std::size_t nruns;
  const std::int32_t* ia;
  const std::int32_t* ib;
};

/// Coefficient-array kernels.  All take raw double arrays; `dst` never
/// aliases a source.  The scalar implementation is the reference; SIMD
/// variants must agree with it to tight relative tolerance (equivalence
/// tested) but may differ in rounding (fused multiply-add, lane order).
struct Ops {
  const char* name;
  void (*add)(double* dst, const double* a, const double* b, std::size_t n);
  void (*sub)(double* dst, const double* a, const double* b, std::size_t n);
  void (*scale)(double* dst, const double* a, double s, std::size_t n);
  void (*axpy)(double* dst, const double* a, double s, std::size_t n); // dst += s*a
  void (*mul_plan)(double* dst, const double* a, const double* b, const PlanView& plan);
};

enum class Backend { Auto, Scalar, Avx2 };

/// Currently selected kernel set.  Default selection happens once: AVX2+FMA
/// when compiled in and supported by the CPU (overridable with the
/// BIHARM_KERNELS environment variable: "scalar", "avx2", "auto").
const Ops& active();

/// Programmatic override, mainly for equivalence tests.  Throws
/// CapabilityError when the requested backend is unavailable.
void select(Backend b);

bool avx2_available();

extern const Ops kScalarOps;
#if BIHARM_HAVE_AVX2
extern const Ops kAvx2Ops;
#endif

} // namespace biharm::jets::kernels
