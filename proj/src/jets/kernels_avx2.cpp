#if BIHARM_HAVE_AVX2

#include <cmath>
#include <immintrin.h>

#include "biharm/jets/kernels.hpp"

namespace biharm::jets::kernels {

namespace {

void add_avx2(double* dst, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) dst[i] = a[i] + b[i];
}

void sub_avx2(double* dst, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) dst[i] = a[i] - b[i];
}

void scale_avx2(double* dst, const double* a, double s, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vs));
  for (; i < n; ++i) dst[i] = a[i] * s;
}

void axpy_avx2(double* dst, const double* a, double s, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i,
                     _mm256_fmadd_pd(_mm256_loadu_pd(a + i), vs, _mm256_loadu_pd(dst + i)));
  for (; i < n; ++i) dst[i] += a[i] * s;
}

// Truncated-product convolution.  Graded-lex layout gives no scatter-free
// vectorization over outputs, so vectorize within each output run: gather
// the paired coefficients four at a time and FMA-accumulate.
void mul_plan_avx2(double* dst, const double* a, const double* b, const PlanView& plan) {
  for (std::size_t r = 0; r < plan.nruns; ++r) {
    const PlanRun& run = plan.runs[r];
    const std::int32_t end = run.begin + run.count;
    std::int32_t t = run.begin;
    __m256d acc = _mm256_setzero_pd();
    for (; t + 4 <= end; t += 4) {
      const __m128i via = _mm_loadu_si128(reinterpret_cast<const __m128i*>(plan.ia + t));
      const __m128i vib = _mm_loadu_si128(reinterpret_cast<const __m128i*>(plan.ib + t));
      const __m256d va = _mm256_i32gather_pd(a, via, 8);
      const __m256d vb = _mm256_i32gather_pd(b, vib, 8);
      acc = _mm256_fmadd_pd(va, vb, acc);
    }
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d s2 = _mm_add_pd(lo, hi);
    double sum = _mm_cvtsd_f64(_mm_add_sd(s2, _mm_unpackhi_pd(s2, s2)));
    for (; t < end; ++t) sum = std::fma(a[plan.ia[t]], b[plan.ib[t]], sum);
    dst[run.out] = sum;
  }
}

} // namespace

const Ops kAvx2Ops = {
    "avx2", add_avx2, sub_avx2, scale_avx2, axpy_avx2, mul_plan_avx2,
};

} // namespace biharm::jets::kernels

#endif // BIHARM_HAVE_AVX2
