#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace clockmps {

/// Real symmetric tridiagonal matrix: `diag` has n entries, `offdiag` n-1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> offdiag;

  std::size_t size() const { return diag.size(); }
  double one_norm() const;
  Eigen::MatrixXd to_dense() const;
};

/// Number of eigenvalues strictly below each shift.
std::vector<std::int32_t> sturm_counts(const SymTridiagonal& t,
                                       std::span<const double> shifts);

/// Eigenvalues with ascending indices [first, first + count), by Sturm
/// bisection to full working precision. Absolute accuracy is a few ulps of
/// the matrix norm.
std::vector<double> tridiagonal_eigenvalues(const SymTridiagonal& t,
                                            std::size_t first,
                                            std::size_t count);

inline std::vector<double> tridiagonal_eigenvalues(const SymTridiagonal& t) {
  return tridiagonal_eigenvalues(t, 0, t.size());
}

/// Unit eigenvectors for the given (ascending, accurate) eigenvalues by
/// inverse iteration. Vectors in a cluster (gap below 1e-3 * one_norm) are
/// kept mutually orthogonal. Column j pairs with eigenvalues[j].
Eigen::MatrixXd tridiagonal_eigenvectors(const SymTridiagonal& t,
                                         std::span<const double> eigenvalues);

}  // namespace clockmps
