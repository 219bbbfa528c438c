#include "clockmps/kernels.hpp"

#include <atomic>

namespace clockmps::kernels {

namespace {

Isa probe() {
#if defined(CLOCKMPS_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Isa::Avx2;
#endif
  return Isa::Scalar;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

Isa detected_isa() {
  static const Isa isa = probe();
  return isa;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) isa = Isa::Scalar;
  active().store(isa, std::memory_order_relaxed);
}

#if defined(CLOCKMPS_HAVE_AVX2)
#define CLOCKMPS_DISPATCH(fn, ...)                                  \
  (active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define CLOCKMPS_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

double dot(std::span<const double> a, std::span<const double> b) {
  return CLOCKMPS_DISPATCH(dot, a, b);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  CLOCKMPS_DISPATCH(axpy, alpha, x, y);
}

void scale(double alpha, std::span<double> x) {
  CLOCKMPS_DISPATCH(scale, alpha, x);
}

void csr_matvec(std::span<const std::int64_t> row_ptr,
                std::span<const std::int32_t> col_idx,
                std::span<const double> values, std::span<const double> x,
                std::span<double> y) {
  CLOCKMPS_DISPATCH(csr_matvec, row_ptr, col_idx, values, x, y);
}

void sturm_counts(std::span<const double> diag,
                  std::span<const double> offdiag_sq,
                  std::span<const double> shifts, double pivmin,
                  std::span<std::int32_t> counts) {
  CLOCKMPS_DISPATCH(sturm_counts, diag, offdiag_sq, shifts, pivmin, counts);
}

#undef CLOCKMPS_DISPATCH

}  // namespace clockmps::kernels
