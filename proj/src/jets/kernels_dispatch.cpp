#include <atomic>
#include <cstdlib>
#include <string>

#include "biharm/errors.hpp"
#include "biharm/jets/kernels.hpp"

namespace biharm::jets::kernels {

bool avx2_available() {
#if BIHARM_HAVE_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const Ops* resolve(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &kScalarOps;
    case Backend::Avx2:
#if BIHARM_HAVE_AVX2
      if (avx2_available()) return &kAvx2Ops;
#endif
      throw CapabilityError("avx2 kernels unavailable on this host");
    case Backend::Auto:
    default:
#if BIHARM_HAVE_AVX2
      if (avx2_available()) return &kAvx2Ops;
#endif
      return &kScalarOps;
  }
}

const Ops* initial() {
  const char* env = std::getenv("BIHARM_KERNELS");
  if (env) {
    const std::string v(env);
    if (v == "scalar") return resolve(Backend::Scalar);
    if (v == "avx2") return resolve(Backend::Avx2);
    if (!v.empty() && v != "auto")
      throw ConfigError("BIHARM_KERNELS must be scalar, avx2 or auto, got '" + v + "'");
  }
  return resolve(Backend::Auto);
}

std::atomic<const Ops*>& slot() {
  static std::atomic<const Ops*> s{initial()};
  return s;
}

} // namespace

const Ops& active() { return *slot().load(std::memory_order_relaxed); }

void select(Backend b) { slot().store(resolve(b), std::memory_order_relaxed); }

} // namespace biharm::jets::kernels
