#include "clockmps/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <type_traits>

#include "clockmps/kernels.hpp"

namespace clockmps {

template <typename Scalar>
SparseMatrix<Scalar> SparseMatrix<Scalar>::from_entries(
    std::int64_t rows, std::int64_t cols, std::vector<Entry> entries) {
  if (cols > std::numeric_limits<std::int32_t>::max())
    throw std::length_error("sparse matrix: column count exceeds 32-bit index");
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
  m.col_idx_.reserve(entries.size());
  m.values_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size();) {
    const auto r = entries[i].row;
    const auto c = entries[i].col;
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw std::out_of_range("sparse matrix: entry index out of range");
    Scalar v{0};
    for (; i < entries.size() && entries[i].row == r && entries[i].col == c; ++i)
      v += entries[i].value;
    if (v == Scalar{0}) continue;
    m.col_idx_.push_back(static_cast<std::int32_t>(c));
    m.values_.push_back(v);
    ++m.row_ptr_[static_cast<std::size_t>(r) + 1];
  }
  for (std::size_t r = 0; r < static_cast<std::size_t>(rows); ++r)
    m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

template <typename Scalar>
SparseMatrix<Scalar> SparseMatrix<Scalar>::from_rows(
    std::int64_t rows, std::int64_t cols,
    const std::function<void(std::int64_t, RowEntries&)>& fill) {
  if (cols > std::numeric_limits<std::int32_t>::max())
    throw std::length_error("sparse matrix: column count exceeds 32-bit index");
  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
  RowEntries row;
  for (std::int64_t r = 0; r < rows; ++r) {
    row.clear();
    fill(r, row);
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < row.size();) {
      const auto c = row[i].first;
      if (c < 0 || c >= cols) throw std::out_of_range("sparse matrix: column out of range");
      Scalar v{0};
      for (; i < row.size() && row[i].first == c; ++i) v += row[i].second;
      if (v == Scalar{0}) continue;
      m.col_idx_.push_back(static_cast<std::int32_t>(c));
      m.values_.push_back(v);
    }
    m.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<std::int64_t>(m.values_.size());
  }
  return m;
}

template <typename Scalar>
void SparseMatrix<Scalar>::multiply(std::span<const Scalar> x,
                                    std::span<Scalar> y) const {
  if (static_cast<std::int64_t>(x.size()) != cols_ ||
      static_cast<std::int64_t>(y.size()) != rows_)
    throw std::invalid_argument("sparse matvec: dimension mismatch");
  if constexpr (std::is_same_v<Scalar, double>) {
    kernels::csr_matvec(row_ptr_, col_idx_, values_, x, y);
  } else {
    for (std::int64_t r = 0; r < rows_; ++r) {
      Scalar s{0};
      for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        s += values_[k] * x[col_idx_[k]];
      y[r] = s;
    }
  }
}

template <typename Scalar>
Vector<Scalar> SparseMatrix<Scalar>::operator*(const Vector<Scalar>& x) const {
  Vector<Scalar> y(rows_);
  multiply(std::span<const Scalar>(x.data(), x.size()),
           std::span<Scalar>(y.data(), y.size()));
  return y;
}

template <typename Scalar>
Scalar SparseMatrix<Scalar>::coeff(std::int64_t r, std::int64_t c) const {
  const auto first = col_idx_.begin() + row_ptr_[r];
  const auto last = col_idx_.begin() + row_ptr_[r + 1];
  const auto it = std::lower_bound(first, last, static_cast<std::int32_t>(c));
  if (it == last || *it != c) return Scalar{0};
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

template <typename Scalar>
Matrix<Scalar> SparseMatrix<Scalar>::to_dense() const {
  Matrix<Scalar> d = Matrix<Scalar>::Zero(rows_, cols_);
  for (std::int64_t r = 0; r < rows_; ++r)
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      d(r, col_idx_[k]) = values_[k];
  return d;
}

template <typename Scalar>
double SparseMatrix<Scalar>::hermiticity_defect() const {
  if (rows_ != cols_) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::int64_t r = 0; r < rows_; ++r)
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const Scalar mirror = coeff(col_idx_[k], r);
      worst = std::max(worst, std::abs(values_[k] - Eigen::numext::conj(mirror)));
    }
  return worst;
}

template <typename Scalar>
double SparseMatrix<Scalar>::norm_bound() const {
  double best = 0.0;
  for (std::int64_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += std::abs(values_[k]);
    best = std::max(best, s);
  }
  return best;
}

template class SparseMatrix<double>;
template class SparseMatrix<Complex>;

}  // namespace clockmps
