#include "clockmps/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "clockmps/kernels.hpp"

namespace clockmps {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_shape(const SymTridiagonal& t) {
  if (t.diag.empty()) throw std::invalid_argument("tridiagonal: empty matrix");
  if (t.offdiag.size() + 1 != t.diag.size())
    throw std::invalid_argument("tridiagonal: off-diagonal length must be n-1");
}

std::vector<double> squared(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return x * x; });
  return out;
}

double pivmin_for(const std::vector<double>& e2) {
  double m = 1.0;
  for (double v : e2) m = std::max(m, v);
  return std::numeric_limits<double>::min() * m;
}

// LU with partial pivoting of (T - shift I), LAPACK dgttrf layout.
struct TridiagonalLu {
  std::vector<double> dl, d, du, du2;
  std::vector<unsigned char> swapped;

  TridiagonalLu(const SymTridiagonal& t, double shift, double tiny) {
    const std::size_t n = t.size();
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
    dl = t.offdiag;
    du = t.offdiag;
    du2.assign(n > 2 ? n - 2 : 0, 0.0);
    swapped.assign(n > 0 ? n - 1 : 0, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::fabs(d[i]) >= std::fabs(dl[i])) {
        if (d[i] != 0.0) {
          const double fact = dl[i] / d[i];
          dl[i] = fact;
          d[i + 1] -= fact * du[i];
        }
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    for (auto& p : d)
      if (std::fabs(p) < tiny) p = p < 0.0 ? -tiny : tiny;
  }

  void solve(Eigen::VectorXd& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped[i]) {
        b[i + 1] -= dl[i] * b[i];
      } else {
        const double temp = b[i] - dl[i] * b[i + 1];
        b[i] = b[i + 1];
        b[i + 1] = temp;
      }
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t i = n >= 2 ? n - 2 : 0; i-- > 0;)
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
  }
};

}  // namespace

double SymTridiagonal::one_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    double s = std::fabs(diag[i]);
    if (i > 0) s += std::fabs(offdiag[i - 1]);
    if (i < offdiag.size()) s += std::fabs(offdiag[i]);
    best = std::max(best, s);
  }
  return best;
}

Eigen::MatrixXd SymTridiagonal::to_dense() const {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diag[i];
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = offdiag[i];
  }
  return m;
}

std::vector<std::int32_t> sturm_counts(const SymTridiagonal& t,
                                       std::span<const double> shifts) {
  check_shape(t);
  const auto e2 = squared(t.offdiag);
  std::vector<std::int32_t> counts(shifts.size());
  kernels::sturm_counts(t.diag, e2, shifts, pivmin_for(e2), counts);
  return counts;
}

std::vector<double> tridiagonal_eigenvalues(const SymTridiagonal& t,
                                            std::size_t first,
                                            std::size_t count) {
  check_shape(t);
  const std::size_t n = t.size();
  if (first + count > n)
    throw std::out_of_range("tridiagonal_eigenvalues: index range exceeds n");
  if (count == 0) return {};

  const auto e2 = squared(t.offdiag);
  const double pivmin = pivmin_for(e2);

  // Gershgorin enclosure, widened slightly.
  double gl = std::numeric_limits<double>::infinity();
  double gu = -gl;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::fabs(t.offdiag[i - 1]);
    if (i + 1 < n) r += std::fabs(t.offdiag[i]);
    gl = std::min(gl, t.diag[i] - r);
    gu = std::max(gu, t.diag[i] + r);
  }
  const double widen = 2.0 * kEps * std::max(std::fabs(gl), std::fabs(gu)) + pivmin;
  gl -= widen;
  gu += widen;

  // Width floor well below the attainable accuracy; keeps zero eigenvalues
  // from bisecting down to the underflow threshold.
  const double floor = kEps * kEps * std::max(std::fabs(gl), std::fabs(gu)) + pivmin;

  std::vector<double> lo(count, gl), hi(count, gu), mid(count);
  std::vector<std::int32_t> counts(count);
  std::vector<std::size_t> active(count);
  for (std::size_t k = 0; k < count; ++k) active[k] = k;

  std::vector<double> shifts;
  while (!active.empty()) {
    shifts.resize(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t k = active[a];
      shifts[a] = 0.5 * (lo[k] + hi[k]);
    }
    counts.resize(active.size());
    kernels::sturm_counts(t.diag, e2, shifts, pivmin, counts);
    std::vector<std::size_t> next;
    next.reserve(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t k = active[a];
      const double x = shifts[a];
      if (x <= lo[k] || x >= hi[k]) continue;  // interval exhausted
      if (static_cast<std::size_t>(counts[a]) > first + k)
        hi[k] = x;
      else
        lo[k] = x;
      const double width = hi[k] - lo[k];
      if (width > 2.0 * kEps * std::max(std::fabs(lo[k]), std::fabs(hi[k])) + floor)
        next.push_back(k);
    }
    active.swap(next);
  }
  for (std::size_t k = 0; k < count; ++k) mid[k] = 0.5 * (lo[k] + hi[k]);
  return mid;
}

Eigen::MatrixXd tridiagonal_eigenvectors(const SymTridiagonal& t,
                                         std::span<const double> eigenvalues) {
  check_shape(t);
  const auto n = static_cast<Eigen::Index>(t.size());
  const auto m = static_cast<Eigen::Index>(eigenvalues.size());
  const double norm = std::max(t.one_norm(), std::numeric_limits<double>::min());
  const double cluster_gap = 1e-3 * norm;
  const double tiny = kEps * norm;

  Eigen::MatrixXd vecs(n, m);
  Eigen::Index cluster_start = 0;
  double previous = 0.0;
  std::uint64_t lcg = 0x9e3779b97f4a7c15ull;
  for (Eigen::Index j = 0; j < m; ++j) {
    double shift = eigenvalues[j];
    if (j > 0 && shift - eigenvalues[j - 1] > cluster_gap) cluster_start = j;
    // Separate coincident shifts inside a cluster.
    if (j > cluster_start && shift <= previous + 10.0 * kEps * std::fabs(shift))
      shift = previous + 10.0 * kEps * std::max(std::fabs(shift), norm);
    previous = shift;

    const TridiagonalLu lu(t, shift, tiny);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      lcg = lcg * 6364136223846793005ull + 1442695040888963407ull;
      v[i] = static_cast<double>(lcg >> 11) * 0x1.0p-53 - 0.5;
    }
    for (int iter = 0; iter < 5; ++iter) {
      for (Eigen::Index c = cluster_start; c < j; ++c)
        v -= vecs.col(c).dot(v) * vecs.col(c);
      v.normalize();
      lu.solve(v);
    }
    for (Eigen::Index c = cluster_start; c < j; ++c)
      v -= vecs.col(c).dot(v) * vecs.col(c);
    v.normalize();
    // Deterministic sign: largest-magnitude component positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    vecs.col(j) = v;
  }
  return vecs;
}

}  // namespace clockmps
