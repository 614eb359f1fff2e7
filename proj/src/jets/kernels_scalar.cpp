#include "biharm/jets/kernels.hpp"

namespace biharm::jets::kernels {

namespace {

void add_scalar(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] + b[i];
}

void sub_scalar(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] - b[i];
}

void scale_scalar(double* dst, const double* a, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * s;
}

void axpy_scalar(double* dst, const double* a, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += a[i] * s;
}

void mul_plan_scalar(double* dst, const double* a, const double* b, const PlanView& plan) {
  for (std::size_t r = 0; r < plan.nruns; ++r) {
    const PlanRun& run = plan.runs[r];
    double acc = 0.0;
    const std::int32_t end = run.begin + run.count;
    for (std::int32_t t = run.begin; t < end; ++t)
      acc += a[plan.ia[t]] * b[plan.ib[t]];
    dst[run.out] = acc;
  }
}

} // namespace

const Ops kScalarOps = {
    "scalar", add_scalar, sub_scalar, scale_scalar, axpy_scalar, mul_plan_scalar,
};

} // namespace biharm::jets::kernels
