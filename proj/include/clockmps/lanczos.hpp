#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "clockmps/sparse.hpp"

namespace clockmps {

template <typename Scalar>
using LinearOperator =
    std::function<void(std::span<const Scalar> in, std::span<Scalar> out)>;

struct LanczosOptions {
  int max_krylov = 200;    // basis size before an explicit restart
  int max_restarts = 100;  // per requested eigenpair
  double tol = 1e-10;      // residual tolerance relative to the norm scale
  std::uint64_t seed = 0x5eed;
  /// Known bound on the operator norm; estimated from the Krylov
  /// tridiagonal when absent.
  std::optional<double> norm_hint;
};

template <typename Scalar>
struct EigenPair {
  double value = 0.0;
  Vector<Scalar> vector;
  double residual = 0.0;  // ||A v - value v||, measured
};

template <typename Scalar>
struct LanczosResult {
  std::vector<EigenPair<Scalar>> pairs;  // ascending
  bool converged = true;
  int matvecs = 0;
  double norm_scale = 1.0;
};

/// Lowest `k` eigenpairs of a Hermitian operator of dimension `dim`.
///
/// Pairs are found one at a time; each run is restricted to the orthogonal
/// complement of the pairs already locked, so degenerate eigenvalues are
/// returned with their multiplicity. Full reorthogonalization throughout.
/// `start`, when given, seeds the first run instead of the random vector.
template <typename Scalar>
LanczosResult<Scalar> lanczos_lowest(const LinearOperator<Scalar>& op,
                                     std::int64_t dim, int k,
                                     const LanczosOptions& options,
                                     const Vector<Scalar>* start = nullptr);

template <typename Scalar>
LanczosResult<Scalar> lanczos_lowest(const SparseMatrix<Scalar>& a, int k,
                                     const LanczosOptions& options) {
  LanczosOptions opts = options;
  if (!opts.norm_hint) opts.norm_hint = a.norm_bound();
  return lanczos_lowest<Scalar>(
      [&a](std::span<const Scalar> in, std::span<Scalar> out) {
        a.multiply(in, out);
      },
      a.rows(), k, opts);
}

extern template LanczosResult<double> lanczos_lowest<double>(
    const LinearOperator<double>&, std::int64_t, int, const LanczosOptions&,
    const Vector<double>*);
extern template LanczosResult<Complex> lanczos_lowest<Complex>(
    const LinearOperator<Complex>&, std::int64_t, int, const LanczosOptions&,
    const Vector<Complex>*);

}  // namespace clockmps
