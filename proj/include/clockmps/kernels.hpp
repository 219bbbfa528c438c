#pragma once

// Data-parallel inner loops used by the solvers.
//
// Every kernel has a portable scalar reference in `kernels::scalar` and, on
// x86-64, an AVX2/FMA variant in `kernels::avx2`. The unqualified entry points
// dispatch at runtime on the detected ISA. Tests pin the variants against the
// scalar reference.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace clockmps::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Best ISA supported by this CPU and build.
Isa detected_isa();

/// ISA used by the dispatching entry points. Defaults to detected_isa().
Isa active_isa();

/// Override dispatch (tests, benchmarking). Requesting an ISA the CPU lacks
/// falls back to Scalar.
void force_isa(Isa isa);

/// Sum of a[i] * b[i].
double dot(std::span<const double> a, std::span<const double> b);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// x *= alpha
void scale(double alpha, std::span<double> x);

/// y = A x for a CSR matrix with 32-bit column indices.
void csr_matvec(std::span<const std::int64_t> row_ptr,
                std::span<const std::int32_t> col_idx,
                std::span<const double> values, std::span<const double> x,
                std::span<double> y);

/// For each shift x_k, counts eigenvalues strictly below x_k of the symmetric
/// tridiagonal matrix with diagonal `diag` and squared off-diagonal
/// `offdiag_sq` (length n-1). `pivmin` replaces vanishing pivots.
void sturm_counts(std::span<const double> diag,
                  std::span<const double> offdiag_sq,
                  std::span<const double> shifts, double pivmin,
                  std::span<std::int32_t> counts);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
void csr_matvec(std::span<const std::int64_t> row_ptr,
                std::span<const std::int32_t> col_idx,
                std::span<const double> values, std::span<const double> x,
                std::span<double> y);
void sturm_counts(std::span<const double> diag,
                  std::span<const double> offdiag_sq,
                  std::span<const double> shifts, double pivmin,
                  std::span<std::int32_t> counts);
}  // namespace scalar

#if defined(__x86_64__)
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
void csr_matvec(std::span<const std::int64_t> row_ptr,
                std::span<const std::int32_t> col_idx,
                std::span<const double> values, std::span<const double> x,
                std::span<double> y);
void sturm_counts(std::span<const double> diag,
                  std::span<const double> offdiag_sq,
                  std::span<const double> shifts, double pivmin,
                  std::span<std::int32_t> counts);
}  // namespace avx2
#endif

}  // namespace clockmps::kernels
