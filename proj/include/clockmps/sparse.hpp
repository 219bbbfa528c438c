#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace clockmps {

using Complex = std::complex<double>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;


/// Compressed sparse row matrix. Column indices are 32-bit so the AVX2
/// gather path can consume them directly.
template <typename Scalar>
class SparseMatrix {
 public:
  struct Entry {
    std::int64_t row;
    std::int64_t col;
    Scalar value;
  };

  SparseMatrix() = default;

  /// Builds from unsorted entries; duplicates are summed and exact zeros
  /// dropped.
  static SparseMatrix from_entries(std::int64_t rows, std::int64_t cols,
                                   std::vector<Entry> entries);

  using RowEntries = std::vector<std::pair<std::int64_t, Scalar>>;

  /// Builds row by row; `fill(r, out)` appends the entries of row r in any
  /// order (duplicates summed, exact zeros dropped).
  static SparseMatrix from_rows(std::int64_t rows, std::int64_t cols,
                                const std::function<void(std::int64_t, RowEntries&)>& fill);

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::int64_t nonzeros() const {
    return static_cast<std::int64_t>(values_.size());
  }

  std::span<const std::int64_t> row_ptr() const { return row_ptr_; }
  std::span<const std::int32_t> col_idx() const { return col_idx_; }
  std::span<const Scalar> values() const { return values_; }

  void multiply(std::span<const Scalar> x, std::span<Scalar> y) const;
  Vector<Scalar> operator*(const Vector<Scalar>& x) const;

  /// Entry (r, c), zero when structurally absent.
  Scalar coeff(std::int64_t r, std::int64_t c) const;

  Matrix<Scalar> to_dense() const;

  /// max |A - A^H| over stored entries and their mirrors.
  double hermiticity_defect() const;

  /// Upper bound on the spectral norm (max absolute row sum).
  double norm_bound() const;

 private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<std::int32_t> col_idx_;
  std::vector<Scalar> values_;
};

extern template class SparseMatrix<double>;
extern template class SparseMatrix<Complex>;

}  // namespace clockmps
