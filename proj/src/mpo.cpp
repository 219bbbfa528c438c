#include <algorithm>
#include <stdexcept>

#include "clockmps/mps.hpp"

namespace clockmps {

template <typename Scalar>
MatrixProductOperator<Scalar>::MatrixProductOperator(std::vector<MpoSite<Scalar>> sites,
                                                     bool hermitian)
    : sites_(std::move(sites)), hermitian_(hermitian) {
  validate();
}

template <typename Scalar>
void MatrixProductOperator<Scalar>::validate() const {
  if (sites_.empty()) throw std::invalid_argument("MPO needs at least one site");
  for (std::size_t s = 0; s < sites_.size(); ++s) {
    const auto& site = sites_[s];
    const std::string where = "MPO site " + std::to_string(s);
    if (site.left_dim < 1 || site.right_dim < 1 || site.phys_dim < 1)
      throw std::invalid_argument(where + ": bad dimensions");
    if (s + 1 < sites_.size() && site.right_dim != sites_[s + 1].left_dim)
      throw std::invalid_argument(where + ": bond mismatch");
    for (const auto& b : site.blocks) {
      if (b.left < 0 || b.left >= site.left_dim || b.right < 0 || b.right >= site.right_dim)
        throw std::invalid_argument(where + ": block index out of range");
      if (b.op.rows() != site.phys_dim || b.op.cols() != site.phys_dim)
        throw std::invalid_argument(where + ": block operator has the wrong shape");
    }
  }
  if (sites_.front().left_dim != 1 || sites_.back().right_dim != 1)
    throw std::invalid_argument("MPO boundary bonds must be 1");
}

template <typename Scalar>
std::vector<Index> MatrixProductOperator<Scalar>::phys_dims() const {
  std::vector<Index> d;
  for (const auto& s : sites_) d.push_back(s.phys_dim);
  return d;
}

template <typename Scalar>
std::vector<Index> MatrixProductOperator<Scalar>::bond_dims() const {
  std::vector<Index> b{sites_.front().left_dim};
  for (const auto& s : sites_) b.push_back(s.right_dim);
  return b;
}

template <typename Scalar>
Index MatrixProductOperator<Scalar>::max_bond() const {
  const auto b = bond_dims();
  return *std::max_element(b.begin(), b.end());
}

template <typename Scalar>
Scalar expectation(const Mps<Scalar>& mps, const Mpo<Scalar>& mpo) {
  if (mps.phys_dims() != mpo.phys_dims())
    throw std::invalid_argument("expectation: site dimensions differ");
  // env[w] is (bra bond) x (ket bond).
  std::vector<Matrix<Scalar>> env{Matrix<Scalar>::Ones(1, 1)};
  for (std::size_t s = 0; s < mps.num_sites(); ++s) {
    const auto& a = mps.site(s);
    const auto& w = mpo.site(s);
    const Index dr = a[0].cols();
    const Index d = w.phys_dim;
    std::vector<Matrix<Scalar>> next(static_cast<std::size_t>(w.right_dim),
                                     Matrix<Scalar>::Zero(dr, dr));
    std::vector<Matrix<Scalar>> a_adj(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) a_adj[k] = a[k].adjoint();
    // cache[wl][in] = env[wl] * A[in]
    std::vector<std::vector<Matrix<Scalar>>> cache(env.size());
    for (const auto& b : w.blocks) {
      auto& row = cache[static_cast<std::size_t>(b.left)];
      if (row.empty()) {
        row.resize(static_cast<std::size_t>(d));
        for (Index i = 0; i < d; ++i)
          row[static_cast<std::size_t>(i)] = env[static_cast<std::size_t>(b.left)] * a[static_cast<std::size_t>(i)];
      }
      auto& out = next[static_cast<std::size_t>(b.right)];
      for (Index i = 0; i < d; ++i)
        for (Index o = 0; o < d; ++o) {
          const Scalar c = b.op(o, i);
          if (c == Scalar(0)) continue;
          out.noalias() += c * (a_adj[static_cast<std::size_t>(o)] * row[static_cast<std::size_t>(i)]);
        }
    }
    env = std::move(next);
  }
  return env[0](0, 0);
}

template <typename Scalar>
Matrix<Scalar> to_dense(const Mpo<Scalar>& mpo, std::uint64_t max_dim) {
  checked_dimension(mpo.phys_dims(), max_dim);
  std::vector<Matrix<Scalar>> acc{Matrix<Scalar>::Ones(1, 1)};
  for (std::size_t s = 0; s < mpo.num_sites(); ++s) {
    const auto& w = mpo.site(s);
    const Index n = acc[0].rows();
    const Index d = w.phys_dim;
    std::vector<Matrix<Scalar>> next(static_cast<std::size_t>(w.right_dim),
                                     Matrix<Scalar>::Zero(n * d, n * d));
    for (const auto& b : w.blocks) {
      const auto& prev = acc[static_cast<std::size_t>(b.left)];
      auto& out = next[static_cast<std::size_t>(b.right)];
      for (Index o = 0; o < d; ++o)
        for (Index i = 0; i < d; ++i) {
          const Scalar c = b.op(o, i);
          if (c == Scalar(0)) continue;
          for (Index c2 = 0; c2 < n; ++c2)
            for (Index r = 0; r < n; ++r) out(r * d + o, c2 * d + i) += c * prev(r, c2);
        }
    }
    acc = std::move(next);
  }
  return acc[0];
}

template <typename Scalar>
Vector<Scalar> apply(const Mpo<Scalar>& mpo, const Vector<Scalar>& v) {
  std::uint64_t total = 1;
  for (Index d : mpo.phys_dims()) total *= static_cast<std::uint64_t>(d);
  if (total != static_cast<std::uint64_t>(v.size()))
    throw std::invalid_argument("apply: vector length does not match the MPO");
  // t[w]: (remaining input) x (output prefix); output prefix index = p * d + o.
  std::vector<Matrix<Scalar>> t{v};
  Index prefix = 1;
  for (std::size_t s = 0; s < mpo.num_sites(); ++s) {
    const auto& w = mpo.site(s);
    const Index d = w.phys_dim;
    const Index rest = t[0].rows() / d;
    std::vector<Matrix<Scalar>> next(static_cast<std::size_t>(w.right_dim),
                                     Matrix<Scalar>::Zero(rest, prefix * d));
    for (const auto& b : w.blocks) {
      const auto& in = t[static_cast<std::size_t>(b.left)];
      auto& out = next[static_cast<std::size_t>(b.right)];
      for (Index o = 0; o < d; ++o) {
        Eigen::Map<Matrix<Scalar>, 0, Eigen::OuterStride<>> cols(
            out.data() + o * rest, rest, prefix, Eigen::OuterStride<>(rest * d));
        for (Index i = 0; i < d; ++i) {
          const Scalar c = b.op(o, i);
          if (c == Scalar(0)) continue;
          cols.noalias() += c * in.middleRows(i * rest, rest);
        }
      }
    }
    t = std::move(next);
    prefix *= d;
  }
  return t[0].row(0).transpose();
}

template <typename Scalar>
Mpo<Scalar> compress_mpo(const Mpo<Scalar>& mpo, double rel_cutoff) {
  // View each site as an MPS tensor with physical index p = o + d * i.
  const std::size_t n = mpo.num_sites();
  std::vector<std::vector<Matrix<Scalar>>> sites;
  for (std::size_t s = 0; s < n; ++s) {
    const auto& w = mpo.site(s);
    const Index d = w.phys_dim;
    std::vector<Matrix<Scalar>> site(static_cast<std::size_t>(d * d),
                                     Matrix<Scalar>::Zero(w.left_dim, w.right_dim));
    for (const auto& b : w.blocks)
      for (Index i = 0; i < d; ++i)
        for (Index o = 0; o < d; ++o) site[static_cast<std::size_t>(o + d * i)](b.left, b.right) += b.op(o, i);
    sites.push_back(std::move(site));
  }
  Mps<Scalar> work(std::move(sites));
  right_canonicalize(work);
  Truncation trunc;
  trunc.rel_cutoff = rel_cutoff;
  for (std::size_t s = 0; s + 1 < n; ++s) {
    auto& site = work.site_unchecked(s);
    const Index dl = site[0].rows();
    Matrix<Scalar> m(dl * static_cast<Index>(site.size()), site[0].cols());
    for (std::size_t k = 0; k < site.size(); ++k) m.middleRows(static_cast<Index>(k) * dl, dl) = site[k];
    SvdSplit<Scalar> split = truncated_svd<Scalar>(m, trunc);
    for (std::size_t k = 0; k < site.size(); ++k) site[k] = split.u.middleRows(static_cast<Index>(k) * dl, dl);
    const Matrix<Scalar> sv = split.s.template cast<Scalar>().asDiagonal() * split.vh;
    for (auto& a : work.site_unchecked(s + 1)) a = sv * a;
  }
  std::vector<MpoSite<Scalar>> out;
  for (std::size_t s = 0; s < n; ++s) {
    const auto& site = work.site(s);
    const Index d = mpo.site(s).phys_dim;
    MpoSite<Scalar> ws;
    ws.left_dim = site[0].rows();
    ws.right_dim = site[0].cols();
    ws.phys_dim = d;
    double scale = 0.0;
    for (const auto& a : site) scale = std::max(scale, a.cwiseAbs().maxCoeff());
    const double zero = 1e-14 * scale;
    for (Index l = 0; l < ws.left_dim; ++l)
      for (Index r = 0; r < ws.right_dim; ++r) {
        Matrix<Scalar> op(d, d);
        double biggest = 0.0;
        for (Index i = 0; i < d; ++i)
          for (Index o = 0; o < d; ++o) {
            Scalar c = site[static_cast<std::size_t>(o + d * i)](l, r);
            if (std::abs(c) <= zero) c = Scalar(0);
            op(o, i) = c;
            biggest = std::max(biggest, std::abs(c));
          }
        if (biggest > 0.0) ws.blocks.push_back({l, r, std::move(op)});
      }
    out.push_back(std::move(ws));
  }
  return Mpo<Scalar>(std::move(out), mpo.hermitian());
}

#define CLOCKMPS_MPO_INSTANTIATE(S)                                   \
  template class MatrixProductOperator<S>;                            \
  template S expectation<S>(const Mps<S>&, const Mpo<S>&);            \
  template Matrix<S> to_dense<S>(const Mpo<S>&, std::uint64_t);       \
  template Vector<S> apply<S>(const Mpo<S>&, const Vector<S>&);       \
  template Mpo<S> compress_mpo<S>(const Mpo<S>&, double);

CLOCKMPS_MPO_INSTANTIATE(double)
CLOCKMPS_MPO_INSTANTIATE(Complex)
#undef CLOCKMPS_MPO_INSTANTIATE

}  // namespace clockmps
