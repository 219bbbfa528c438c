#include "clockmps/kernels.hpp"

#include <cmath>

namespace clockmps::kernels::scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
  for (auto& v : x) v *= alpha;
}

void csr_matvec(std::span<const std::int64_t> row_ptr,
                std::span<const std::int32_t> col_idx,
                std::span<const double> values, std::span<const double> x,
                std::span<double> y) {
  const std::size_t rows = row_ptr.size() - 1;
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (auto k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      s += values[k] * x[col_idx[k]];
    y[r] = s;
  }
}

void sturm_counts(std::span<const double> diag,
                  std::span<const double> offdiag_sq,
                  std::span<const double> shifts, double pivmin,
                  std::span<std::int32_t> counts) {
  const std::size_t n = diag.size();
  for (std::size_t k = 0; k < shifts.size(); ++k) {
    const double x = shifts[k];
    std::int32_t c = 0;
    double q = diag[0] - x;
    if (std::fabs(q) < pivmin) q = -pivmin;
    c += q < 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      q = (diag[i] - x) - offdiag_sq[i - 1] / q;
      if (std::fabs(q) < pivmin) q = -pivmin;
      c += q < 0.0;
    }
    counts[k] = c;
  }
}

}  // namespace clockmps::kernels::scalar
