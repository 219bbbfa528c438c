#include "clockmps/mps.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <type_traits>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "clockmps/errors.hpp"

namespace clockmps {

std::string canonical_form_name(CanonicalForm form) {
  switch (form.kind) {
    case CanonicalKind::None: return "none";
    case CanonicalKind::Left: return "left";
    case CanonicalKind::Right: return "right";
    case CanonicalKind::Mixed: return "mixed(" + std::to_string(form.center) + ")";
  }
  return "none";
}

std::uint64_t checked_dimension(std::span<const Index> dims, std::uint64_t max_dim) {
  std::uint64_t total = 1;
  for (Index d : dims) {
    if (d < 1) throw std::invalid_argument("site dimension must be positive");
    const auto du = static_cast<std::uint64_t>(d);
    if (total > max_dim / du) throw BudgetError("dense dimension", max_dim + 1, max_dim);
    total *= du;
  }
  if (total > max_dim) throw BudgetError("dense dimension", total, max_dim);
  return total;
}

namespace {

template <typename Scalar>
using Site = std::vector<Matrix<Scalar>>;

// Rows ordered (a + Dl * s): the site matrices stacked vertically.
template <typename Scalar>
Matrix<Scalar> left_matrix(const Site<Scalar>& site) {
  const Index dl = site[0].rows(), dr = site[0].cols();
  Matrix<Scalar> m(dl * static_cast<Index>(site.size()), dr);
  for (std::size_t s = 0; s < site.size(); ++s) m.middleRows(static_cast<Index>(s) * dl, dl) = site[s];
  return m;
}

template <typename Scalar>
Site<Scalar> from_left_matrix(const Matrix<Scalar>& m, Index d) {
  const Index dl = m.rows() / d;
  Site<Scalar> site(static_cast<std::size_t>(d));
  for (Index s = 0; s < d; ++s) site[static_cast<std::size_t>(s)] = m.middleRows(s * dl, dl);
  return site;
}

// Columns ordered (s * Dr + b): the site matrices side by side.
template <typename Scalar>
Matrix<Scalar> right_matrix(const Site<Scalar>& site) {
  const Index dl = site[0].rows(), dr = site[0].cols();
  Matrix<Scalar> m(dl, dr * static_cast<Index>(site.size()));
  for (std::size_t s = 0; s < site.size(); ++s) m.middleCols(static_cast<Index>(s) * dr, dr) = site[s];
  return m;
}

template <typename Scalar>
Site<Scalar> from_right_matrix(const Matrix<Scalar>& m, Index d) {
  const Index dr = m.cols() / d;
  Site<Scalar> site(static_cast<std::size_t>(d));
  for (Index s = 0; s < d; ++s) site[static_cast<std::size_t>(s)] = m.middleCols(s * dr, dr);
  return site;
}

// Thin QR: m = q * r with q having min(rows, cols) orthonormal columns.
template <typename Scalar>
void thin_qr(const Matrix<Scalar>& m, Matrix<Scalar>& q, Matrix<Scalar>& r) {
  const Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<Matrix<Scalar>> qr(m);
  q = qr.householderQ() * Matrix<Scalar>::Identity(m.rows(), k);
  r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
}

template <typename Scalar>
void left_orthonormalize(Mps<Scalar>& mps, std::size_t s) {
  auto& site = mps.site_unchecked(s);
  const Index d = static_cast<Index>(site.size());
  Matrix<Scalar> q, r;
  thin_qr(left_matrix(site), q, r);
  site = from_left_matrix(q, d);
  for (auto& a : mps.site_unchecked(s + 1)) a = r * a;
}

template <typename Scalar>
void right_orthonormalize(Mps<Scalar>& mps, std::size_t s) {
  auto& site = mps.site_unchecked(s);
  const Index d = static_cast<Index>(site.size());
  Matrix<Scalar> q, r;
  thin_qr<Scalar>(right_matrix(site).adjoint(), q, r);
  site = from_right_matrix<Scalar>(q.adjoint(), d);
  const Matrix<Scalar> rh = r.adjoint();
  for (auto& a : mps.site_unchecked(s - 1)) a = a * rh;
}

template <typename Scalar>
Scalar random_scalar(std::normal_distribution<double>& nd, std::mt19937_64& rng) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return nd(rng);
  } else {
    const double re = nd(rng);
    return Scalar(re, nd(rng));
  }
}

// Left-to-right SVD sweep over a right-canonical state.
template <typename Scalar>
std::vector<double> svd_sweep(Mps<Scalar>& mps, const Truncation& trunc) {
  std::vector<double> discarded;
  for (std::size_t s = 0; s + 1 < mps.num_sites(); ++s) {
    auto& site = mps.site_unchecked(s);
    const Index d = static_cast<Index>(site.size());
    SvdSplit<Scalar> split = truncated_svd<Scalar>(left_matrix(site), trunc);
    site = from_left_matrix<Scalar>(split.u, d);
    const Matrix<Scalar> sv = split.s.template cast<Scalar>().asDiagonal() * split.vh;
    for (auto& a : mps.site_unchecked(s + 1)) a = sv * a;
    discarded.push_back(split.discarded_weight);
  }
  mps.set_canonical_form({CanonicalKind::Left, 0});
  return discarded;
}

}  // namespace

template <typename Scalar>
SvdSplit<Scalar> truncated_svd(const Matrix<Scalar>& m, const Truncation& trunc) {
  Eigen::BDCSVD<Matrix<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const Index n = s.size();
  SvdSplit<Scalar> out;
  if (n == 0) throw std::invalid_argument("truncated_svd: empty matrix");
  const double total = s.squaredNorm();
  Index keep = n;
  while (keep > 1 && s[keep - 1] <= trunc.rel_cutoff * s[0]) --keep;
  double dropped = 0.0;
  for (Index i = keep; i < n; ++i) dropped += s[i] * s[i];
  while (keep > 1 && total > 0.0 &&
         (dropped + s[keep - 1] * s[keep - 1]) / total <= trunc.max_discarded_weight) {
    dropped += s[keep - 1] * s[keep - 1];
    --keep;
  }
  while (trunc.max_bond > 0 && keep > trunc.max_bond) {
    dropped += s[keep - 1] * s[keep - 1];
    --keep;
  }
  out.u = svd.matrixU().leftCols(keep);
  out.s = s.head(keep);
  out.vh = svd.matrixV().leftCols(keep).adjoint();
  out.discarded_weight = total > 0.0 ? dropped / total : 0.0;
  return out;
}

template <typename Scalar>
MatrixProductState<Scalar>::MatrixProductState(std::vector<SiteTensor> sites, CanonicalForm form)
    : sites_(std::move(sites)), form_(form) {
  validate();
}

template <typename Scalar>
void MatrixProductState<Scalar>::validate() const {
  if (sites_.empty()) throw std::invalid_argument("MPS needs at least one site");
  for (std::size_t s = 0; s < sites_.size(); ++s) {
    const auto& site = sites_[s];
    if (site.empty()) throw std::invalid_argument("MPS site with zero physical dimension");
    for (const auto& a : site)
      if (a.rows() != site[0].rows() || a.cols() != site[0].cols() || a.size() == 0)
        throw std::invalid_argument("MPS site " + std::to_string(s) + ": ragged tensor");
    if (s + 1 < sites_.size() && site[0].cols() != sites_[s + 1][0].rows())
      throw std::invalid_argument("MPS bond " + std::to_string(s + 1) + " mismatch");
  }
  if (sites_.front()[0].rows() != 1 || sites_.back()[0].cols() != 1)
    throw std::invalid_argument("MPS boundary bonds must be 1");
}

template <typename Scalar>
std::vector<Index> MatrixProductState<Scalar>::phys_dims() const {
  std::vector<Index> d;
  for (const auto& site : sites_) d.push_back(static_cast<Index>(site.size()));
  return d;
}

template <typename Scalar>
std::vector<Index> MatrixProductState<Scalar>::bond_dims() const {
  std::vector<Index> b{sites_.empty() ? 1 : sites_.front()[0].rows()};
  for (const auto& site : sites_) b.push_back(site[0].cols());
  return b;
}

template <typename Scalar>
std::vector<Index> MatrixProductState<Scalar>::internal_bond_dims() const {
  std::vector<Index> b = bond_dims();
  return {b.begin() + 1, b.end() - 1};
}

template <typename Scalar>
Index MatrixProductState<Scalar>::max_bond() const {
  const auto b = bond_dims();
  return *std::max_element(b.begin(), b.end());
}

template <typename Scalar>
void MatrixProductState<Scalar>::set_site(std::size_t s, SiteTensor tensor) {
  sites_.at(s) = std::move(tensor);
  form_ = {};
}

template <typename Scalar>
Mps<Scalar> mps_from_dense(const Vector<Scalar>& v, std::span<const Index> dims,
                           const Truncation& trunc) {
  if (dims.empty()) throw std::invalid_argument("mps_from_dense: no sites");
  std::uint64_t total = 1;
  for (Index d : dims) {
    if (d < 1) throw std::invalid_argument("mps_from_dense: bad site dimension");
    total *= static_cast<std::uint64_t>(d);
  }
  if (total != static_cast<std::uint64_t>(v.size()))
    throw std::invalid_argument("mps_from_dense: vector length " + std::to_string(v.size()) +
                                " != product of site dimensions " + std::to_string(total));
  std::vector<Site<Scalar>> sites;
  // rem: Dl x (rest), column index = s * rest' + r.
  Matrix<Scalar> rem = v.transpose();
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const Index d = dims[k];
    const Index dl = rem.rows();
    const Index rest = rem.cols() / d;
    if (k + 1 == dims.size()) {
      Site<Scalar> site(static_cast<std::size_t>(d));
      for (Index s = 0; s < d; ++s) site[static_cast<std::size_t>(s)] = rem.col(s);
      sites.push_back(std::move(site));
      break;
    }
    Matrix<Scalar> m(dl * d, rest);
    for (Index s = 0; s < d; ++s) m.middleRows(s * dl, dl) = rem.middleCols(s * rest, rest);
    SvdSplit<Scalar> split = truncated_svd<Scalar>(m, trunc);
    sites.push_back(from_left_matrix<Scalar>(split.u, d));
    rem = split.s.template cast<Scalar>().asDiagonal() * split.vh;
  }
  return Mps<Scalar>(std::move(sites), {CanonicalKind::Left, 0});
}

template <typename Scalar>
Mps<Scalar> product_state(std::span<const Index> dims, std::span<const Index> config) {
  if (dims.size() != config.size())
    throw std::invalid_argument("product_state: config length mismatch");
  std::vector<Site<Scalar>> sites;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (config[k] < 0 || config[k] >= dims[k])
      throw std::invalid_argument("product_state: value out of range at site " + std::to_string(k));
    Site<Scalar> site(static_cast<std::size_t>(dims[k]), Matrix<Scalar>::Zero(1, 1));
    site[static_cast<std::size_t>(config[k])](0, 0) = Scalar(1);
    sites.push_back(std::move(site));
  }
  return Mps<Scalar>(std::move(sites), {CanonicalKind::Right, 0});
}

template <typename Scalar>
Mps<Scalar> random_mps(std::span<const Index> dims, Index max_bond, std::uint64_t seed) {
  if (dims.empty()) throw std::invalid_argument("random_mps: no sites");
  if (max_bond < 1) throw std::invalid_argument("random_mps: max_bond must be >= 1");
  const std::size_t n = dims.size();
  std::vector<Index> bonds(n + 1, 1);
  auto capped_product = [max_bond](Index a, Index b) { return std::min<Index>(max_bond, a * b); };
  {
    std::vector<Index> left(n + 1, 1), right(n + 1, 1);
    for (std::size_t k = 0; k < n; ++k) left[k + 1] = capped_product(left[k], dims[k]);
    for (std::size_t k = n; k-- > 0;) right[k] = capped_product(right[k + 1], dims[k]);
    for (std::size_t k = 1; k < n; ++k) bonds[k] = std::min(left[k], right[k]);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<Site<Scalar>> sites;
  for (std::size_t k = 0; k < n; ++k) {
    Site<Scalar> site(static_cast<std::size_t>(dims[k]));
    for (auto& a : site) {
      a.resize(bonds[k], bonds[k + 1]);
      for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) a(i, j) = random_scalar<Scalar>(nd, rng);
    }
    sites.push_back(std::move(site));
  }
  Mps<Scalar> mps(std::move(sites));
  right_canonicalize(mps);
  const double nrm = norm(mps);
  for (auto& a : mps.site_unchecked(0)) a /= nrm;
  return mps;
}

template <typename Scalar>
void left_canonicalize(Mps<Scalar>& mps) {
  for (std::size_t s = 0; s + 1 < mps.num_sites(); ++s) left_orthonormalize(mps, s);
  mps.set_canonical_form({CanonicalKind::Left, 0});
}

template <typename Scalar>
void right_canonicalize(Mps<Scalar>& mps) {
  for (std::size_t s = mps.num_sites(); s-- > 1;) right_orthonormalize(mps, s);
  mps.set_canonical_form({CanonicalKind::Right, 0});
}

template <typename Scalar>
void mixed_canonicalize(Mps<Scalar>& mps, std::size_t center) {
  if (center >= mps.num_sites()) throw std::out_of_range("mixed_canonicalize: center");
  for (std::size_t s = 0; s < center; ++s) left_orthonormalize(mps, s);
  for (std::size_t s = mps.num_sites(); s-- > center + 1;) right_orthonormalize(mps, s);
  mps.set_canonical_form({CanonicalKind::Mixed, center});
}

template <typename Scalar>
double isometry_defect(const Mps<Scalar>& mps, std::size_t site, bool left) {
  const auto& a = mps.site(site);
  const Index dim = left ? a[0].cols() : a[0].rows();
  Matrix<Scalar> acc = Matrix<Scalar>::Zero(dim, dim);
  for (const auto& m : a) acc += left ? Matrix<Scalar>(m.adjoint() * m) : Matrix<Scalar>(m * m.adjoint());
  acc -= Matrix<Scalar>::Identity(dim, dim);
  return acc.cwiseAbs().maxCoeff();
}

template <typename Scalar>
double canonical_defect(const Mps<Scalar>& mps) {
  const CanonicalForm f = mps.canonical_form();
  const std::size_t n = mps.num_sites();
  double worst = 0.0;
  std::size_t left_end = 0, right_begin = n;
  switch (f.kind) {
    case CanonicalKind::None: return 0.0;
    case CanonicalKind::Left: left_end = n - 1; break;
    case CanonicalKind::Right: right_begin = 1; break;
    case CanonicalKind::Mixed: left_end = f.center; right_begin = f.center + 1; break;
  }
  for (std::size_t s = 0; s < left_end; ++s) worst = std::max(worst, isometry_defect(mps, s, true));
  for (std::size_t s = right_begin; s < n; ++s) worst = std::max(worst, isometry_defect(mps, s, false));
  return worst;
}

template <typename Scalar>
CompressResult<Scalar> compress(const Mps<Scalar>& mps, const Truncation& trunc) {
  CompressResult<Scalar> out;
  out.mps = mps;
  right_canonicalize(out.mps);
  const double before = norm(out.mps);
  out.discarded_weights = svd_sweep(out.mps, trunc);
  const double after = norm(out.mps);
  if (after > 0.0)
    for (auto& a : out.mps.site_unchecked(out.mps.num_sites() - 1)) a *= before / after;
  out.fidelity = fidelity(mps, out.mps);
  return out;
}

template <typename Scalar>
Scalar overlap(const Mps<Scalar>& a, const Mps<Scalar>& b) {
  if (a.phys_dims() != b.phys_dims()) throw std::invalid_argument("overlap: site dimensions differ");
  Matrix<Scalar> env = Matrix<Scalar>::Ones(1, 1);
  for (std::size_t s = 0; s < a.num_sites(); ++s) {
    const auto& as = a.site(s);
    const auto& bs = b.site(s);
    Matrix<Scalar> next = Matrix<Scalar>::Zero(as[0].cols(), bs[0].cols());
    for (std::size_t k = 0; k < as.size(); ++k) next.noalias() += as[k].adjoint() * (env * bs[k]);
    env = std::move(next);
  }
  return env(0, 0);
}

template <typename Scalar>
double norm(const Mps<Scalar>& mps) {
  return std::sqrt(std::max(0.0, std::real(overlap(mps, mps))));
}

template <typename Scalar>
double fidelity(const Mps<Scalar>& a, const Mps<Scalar>& b) {
  const double na = std::real(overlap(a, a));
  const double nb = std::real(overlap(b, b));
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return std::norm(overlap(a, b)) / (na * nb);
}

template <typename Scalar>
Vector<Scalar> to_dense(const Mps<Scalar>& mps, std::uint64_t max_dim) {
  const auto dims = mps.phys_dims();
  checked_dimension(dims, max_dim);
  // block: (prefix states) x D, prefix index = old * d + s.
  Matrix<Scalar> block = Matrix<Scalar>::Ones(1, 1);
  for (std::size_t k = 0; k < mps.num_sites(); ++k) {
    const auto& site = mps.site(k);
    const Index d = static_cast<Index>(site.size());
    Matrix<Scalar> next(block.rows() * d, site[0].cols());
    for (Index s = 0; s < d; ++s) {
      const Matrix<Scalar> part = block * site[static_cast<std::size_t>(s)];
      for (Index r = 0; r < block.rows(); ++r) next.row(r * d + s) = part.row(r);
    }
    block = std::move(next);
  }
  return block.col(0);
}

template <typename Scalar>
std::vector<Eigen::VectorXd> schmidt_values(const Mps<Scalar>& mps) {
  Mps<Scalar> work = mps;
  left_canonicalize(work);
  std::vector<Eigen::VectorXd> out(work.num_sites() > 0 ? work.num_sites() - 1 : 0);
  Truncation keep_all;
  keep_all.rel_cutoff = 0.0;
  for (std::size_t s = work.num_sites(); s-- > 1;) {
    auto& site = work.site_unchecked(s);
    const Index d = static_cast<Index>(site.size());
    SvdSplit<Scalar> split = truncated_svd<Scalar>(right_matrix(site), keep_all);
    site = from_right_matrix<Scalar>(split.vh, d);
    const Matrix<Scalar> us = split.u * split.s.template cast<Scalar>().asDiagonal();
    for (auto& a : work.site_unchecked(s - 1)) a = a * us;
    const double nrm = split.s.norm();
    out[s - 1] = nrm > 0.0 ? Eigen::VectorXd(split.s / nrm) : split.s;
  }
  return out;
}

template <typename Scalar>
std::vector<double> entanglement_entropies(const Mps<Scalar>& mps) {
  std::vector<double> out;
  for (const auto& sv : schmidt_values(mps)) {
    double h = 0.0;
    for (Index i = 0; i < sv.size(); ++i) {
      const double p = sv[i] * sv[i];
      if (p > 0.0) h -= p * std::log2(p);
    }
    out.push_back(h);
  }
  return out;
}

namespace {

// sum over configurations with fixed[s] >= 0 pinned of |psi|^2.
template <typename Scalar>
double pinned_weight(const Mps<Scalar>& mps, const std::vector<Index>& fixed) {
  Matrix<Scalar> env = Matrix<Scalar>::Ones(1, 1);
  for (std::size_t s = 0; s < mps.num_sites(); ++s) {
    const auto& site = mps.site(s);
    Matrix<Scalar> next = Matrix<Scalar>::Zero(site[0].cols(), site[0].cols());
    for (std::size_t k = 0; k < site.size(); ++k) {
      if (fixed[s] >= 0 && static_cast<std::size_t>(fixed[s]) != k) continue;
      next.noalias() += site[k].adjoint() * (env * site[k]);
    }
    env = std::move(next);
  }
  return std::real(env(0, 0));
}

}  // namespace

template <typename Scalar>
Readout read_assignment(const Mps<Scalar>& mps, std::span<const std::size_t> sites,
                        std::size_t condition_site, Index condition_value) {
  const std::size_t n = mps.num_sites();
  if (condition_site >= n || condition_value < 0 || condition_value >= mps.phys_dim(condition_site))
    throw std::invalid_argument("read_assignment: bad conditioning site/value");
  for (std::size_t s : sites) {
    if (s >= n || s == condition_site)
      throw std::invalid_argument("read_assignment: bad readout site " + std::to_string(s));
    if (mps.phys_dim(s) != 2)
      throw std::invalid_argument("read_assignment: readout sites must be qubits");
  }
  Readout out;
  out.bits = BitString(sites.size());
  std::vector<Index> fixed(n, -1);
  const double total = pinned_weight(mps, fixed);
  fixed[condition_site] = condition_value;
  double current = pinned_weight(mps, fixed);
  out.condition_weight = total > 0.0 ? current / total : 0.0;
  if (current <= 0.0) return out;
  const double base = current;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    fixed[sites[i]] = 0;
    const double w0 = pinned_weight(mps, fixed);
    fixed[sites[i]] = 1;
    const double w1 = pinned_weight(mps, fixed);
    const bool one = w1 > w0;
    fixed[sites[i]] = one ? 1 : 0;
    out.bits.set(i, one);
    current = one ? w1 : w0;
  }
  out.probability = std::clamp(current / base, 0.0, 1.0);
  out.ambiguous = out.probability < kReadoutThreshold;
  return out;
}

#define CLOCKMPS_MPS_INSTANTIATE(S)                                                      \
  template SvdSplit<S> truncated_svd<S>(const Matrix<S>&, const Truncation&);            \
  template class MatrixProductState<S>;                                                  \
  template Mps<S> mps_from_dense<S>(const Vector<S>&, std::span<const Index>,            \
                                    const Truncation&);                                  \
  template Mps<S> product_state<S>(std::span<const Index>, std::span<const Index>);      \
  template Mps<S> random_mps<S>(std::span<const Index>, Index, std::uint64_t);           \
  template void left_canonicalize<S>(Mps<S>&);                                           \
  template void right_canonicalize<S>(Mps<S>&);                                          \
  template void mixed_canonicalize<S>(Mps<S>&, std::size_t);                             \
  template double isometry_defect<S>(const Mps<S>&, std::size_t, bool);                  \
  template double canonical_defect<S>(const Mps<S>&);                                    \
  template CompressResult<S> compress<S>(const Mps<S>&, const Truncation&);              \
  template S overlap<S>(const Mps<S>&, const Mps<S>&);                                   \
  template double norm<S>(const Mps<S>&);                                                \
  template double fidelity<S>(const Mps<S>&, const Mps<S>&);                             \
  template Vector<S> to_dense<S>(const Mps<S>&, std::uint64_t);                          \
  template std::vector<Eigen::VectorXd> schmidt_values<S>(const Mps<S>&);                \
  template std::vector<double> entanglement_entropies<S>(const Mps<S>&);                 \
  template Readout read_assignment<S>(const Mps<S>&, std::span<const std::size_t>,       \
                                      std::size_t, Index);

CLOCKMPS_MPS_INSTANTIATE(double)
CLOCKMPS_MPS_INSTANTIATE(Complex)
#undef CLOCKMPS_MPS_INSTANTIATE

}  // namespace clockmps
