#include "clockmps/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <type_traits>

#include "clockmps/kernels.hpp"
#include "clockmps/tridiagonal.hpp"

namespace clockmps {

namespace {

template <typename Scalar>
Scalar inner(const Vector<Scalar>& a, const Vector<Scalar>& b) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return kernels::dot({a.data(), static_cast<std::size_t>(a.size())},
                        {b.data(), static_cast<std::size_t>(b.size())});
  } else {
    return a.dot(b);
  }
}

template <typename Scalar>
void subtract_projection(Vector<Scalar>& w, const Vector<Scalar>& v) {
  const Scalar c = inner(v, w);
  if constexpr (std::is_same_v<Scalar, double>) {
    kernels::axpy(-c, {v.data(), static_cast<std::size_t>(v.size())},
                  {w.data(), static_cast<std::size_t>(w.size())});
  } else {
    w -= c * v;
  }
}

template <typename Scalar>
Vector<Scalar> random_vector(std::int64_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vector<Scalar> v(dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      v[i] = nd(rng);
    } else {
      const double re = nd(rng);
      v[i] = Scalar(re, nd(rng));
    }
  }
  return v;
}

// Orthogonalize against one or two sets, twice ("twice is enough").
template <typename Scalar>
void orthogonalize(Vector<Scalar>& w, const std::vector<Vector<Scalar>>& basis,
                   const std::vector<Vector<Scalar>>* more = nullptr) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& v : basis) subtract_projection(w, v);
    if (more)
      for (const auto& v : *more) subtract_projection(w, v);
  }
}

struct Ritz {
  double value;
  Eigen::VectorXd coeffs;
  double residual_estimate;
};

Ritz smallest_ritz(const std::vector<double>& alpha,
                   const std::vector<double>& beta) {
  // Bisection plus inverse iteration; Eigen's tridiagonal QR can stall on
  // Krylov matrices with underflowing off-diagonals.
  const std::size_t m = alpha.size();
  SymTridiagonal t;
  t.diag = alpha;
  t.offdiag.assign(beta.begin(), beta.begin() + static_cast<std::ptrdiff_t>(m - 1));
  const std::vector<double> lowest = tridiagonal_eigenvalues(t, 0, 1);
  Ritz r;
  r.value = lowest[0];
  r.coeffs = tridiagonal_eigenvectors(t, lowest).col(0);
  const double tail = beta.size() >= m ? beta[m - 1] : 0.0;
  r.residual_estimate = std::abs(tail * r.coeffs[static_cast<Eigen::Index>(m) - 1]);
  return r;
}

}  // namespace

template <typename Scalar>
LanczosResult<Scalar> lanczos_lowest(const LinearOperator<Scalar>& op,
                                     std::int64_t dim, int k,
                                     const LanczosOptions& options,
                                     const Vector<Scalar>* start) {
  LanczosResult<Scalar> result;
  if (dim <= 0 || k <= 0) return result;
  k = static_cast<int>(std::min<std::int64_t>(k, dim));

  std::mt19937_64 rng(options.seed);
  std::vector<Vector<Scalar>> locked;
  double scale = options.norm_hint.value_or(0.0);

  auto apply = [&](const Vector<Scalar>& in, Vector<Scalar>& out) {
    out.resize(dim);
    op({in.data(), static_cast<std::size_t>(dim)},
       {out.data(), static_cast<std::size_t>(dim)});
    ++result.matvecs;
  };

  for (int target = 0; target < k; ++target) {
    Vector<Scalar> x = (target == 0 && start && start->size() == dim)
                           ? *start
                           : random_vector<Scalar>(dim, rng);
    orthogonalize(x, locked);
    if (x.norm() < 1e-14) x = random_vector<Scalar>(dim, rng), orthogonalize(x, locked);
    x.normalize();

    EigenPair<Scalar> best;
    bool done = false;
    const std::int64_t room = dim - static_cast<std::int64_t>(locked.size());
    const int m_max = static_cast<int>(std::min<std::int64_t>(options.max_krylov, room));

    for (int restart = 0; restart <= options.max_restarts && !done; ++restart) {
      std::vector<Vector<Scalar>> basis;
      std::vector<double> alpha, beta;
      basis.push_back(x);
      Vector<Scalar> w;
      Ritz ritz{};
      for (int j = 0; j < m_max; ++j) {
        apply(basis[j], w);
        const double a = std::real(inner(basis[j], w));
        alpha.push_back(a);
        orthogonalize(w, locked, &basis);
        const double b = w.norm();
        beta.push_back(b);
        if (!options.norm_hint)
          scale = std::max(scale, std::abs(a) + b + (j > 0 ? beta[j - 1] : 0.0));
        const bool exhausted = b <= 1e-13 * std::max(scale, 1.0) || j + 1 == m_max;
        if (exhausted || (j + 1) % 10 == 0) {
          ritz = smallest_ritz(alpha, beta);
          if (exhausted || ritz.residual_estimate <= 0.1 * options.tol * std::max(scale, 1.0))
            break;
        }
        w /= b;
        basis.push_back(w);
      }
      if (alpha.size() != static_cast<std::size_t>(ritz.coeffs.size()))
        ritz = smallest_ritz(alpha, beta);

      x.setZero(dim);
      for (std::size_t i = 0; i < alpha.size(); ++i) x += ritz.coeffs[i] * basis[i];
      orthogonalize(x, locked);
      x.normalize();
      Vector<Scalar> hx;
      apply(x, hx);
      const double value = std::real(inner(x, hx));
      const double res = (hx - value * x).norm();
      best.value = value;
      best.vector = x;
      best.residual = res;
      done = res <= options.tol * std::max(scale, 1.0) ||
             static_cast<std::int64_t>(alpha.size()) >= room;
    }
    if (!done) result.converged = false;
    locked.push_back(best.vector);
    result.pairs.push_back(std::move(best));
  }
  std::stable_sort(result.pairs.begin(), result.pairs.end(),
                   [](const auto& a, const auto& b) { return a.value < b.value; });
  result.norm_scale = std::max(scale, 1.0);
  return result;
}

template LanczosResult<double> lanczos_lowest<double>(
    const LinearOperator<double>&, std::int64_t, int, const LanczosOptions&,
    const Vector<double>*);
template LanczosResult<Complex> lanczos_lowest<Complex>(
    const LinearOperator<Complex>&, std::int64_t, int, const LanczosOptions&,
    const Vector<Complex>*);

}  // namespace clockmps
