// Compiled with -mavx2 -mfma. Only reached through runtime dispatch.

#include "clockmps/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace clockmps::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i),
                           _mm256_loadu_pd(b.data() + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 4),
                           _mm256_loadu_pd(b.data() + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i),
                           _mm256_loadu_pd(b.data() + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(y.data() + i,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), vy));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x.data() + i,
                     _mm256_mul_pd(va, _mm256_loadu_pd(x.data() + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void csr_matvec(std::span<const std::int64_t> row_ptr,
                std::span<const std::int32_t> col_idx,
                std::span<const double> values, std::span<const double> x,
                std::span<double> y) {
  const std::size_t rows = row_ptr.size() - 1;
  for (std::size_t r = 0; r < rows; ++r) {
    auto k = row_ptr[r];
    const auto end = row_ptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(
          reinterpret_cast<const __m128i*>(col_idx.data() + k));
      const __m256d xv = _mm256_i32gather_pd(x.data(), idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(values.data() + k), xv, acc);
    }
    double s = hsum(acc);
    for (; k < end; ++k) s += values[k] * x[col_idx[k]];
    y[r] = s;
  }
}

// Four shifts per lane group. No multiply-add appears in the recurrence, so
// the result is bitwise identical to the scalar reference.
void sturm_counts(std::span<const double> diag,
                  std::span<const double> offdiag_sq,
                  std::span<const double> shifts, double pivmin,
                  std::span<std::int32_t> counts) {
  const std::size_t n = diag.size();
  const std::size_t m = shifts.size();
  const __m256d vpiv = _mm256_set1_pd(pivmin);
  const __m256d vnegpiv = _mm256_set1_pd(-pivmin);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= m; k += 4) {
    const __m256d x = _mm256_loadu_pd(shifts.data() + k);
    __m256i cnt = _mm256_setzero_si256();
    __m256d q = _mm256_sub_pd(_mm256_set1_pd(diag[0]), x);
    for (std::size_t i = 0;; ++i) {
      const __m256d absq = _mm256_andnot_pd(sign_mask, q);
      q = _mm256_blendv_pd(q, vnegpiv, _mm256_cmp_pd(absq, vpiv, _CMP_LT_OQ));
      // Comparison mask lanes are all-ones (-1), so subtracting counts up.
      cnt = _mm256_sub_epi64(
          cnt, _mm256_castpd_si256(_mm256_cmp_pd(q, zero, _CMP_LT_OQ)));
      if (i + 1 == n) break;
      const __m256d d = _mm256_sub_pd(_mm256_set1_pd(diag[i + 1]), x);
      q = _mm256_sub_pd(d, _mm256_div_pd(_mm256_set1_pd(offdiag_sq[i]), q));
    }
    alignas(32) std::int64_t out[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(out), cnt);
    for (int j = 0; j < 4; ++j) counts[k + j] = static_cast<std::int32_t>(out[j]);
  }
  if (k < m)
    scalar::sturm_counts(diag, offdiag_sq, shifts.subspan(k), pivmin,
                         counts.subspan(k));
}

}  // namespace clockmps::kernels::avx2
