#pragma once

// Open-boundary matrix product states and operators.
//
// An MPS site tensor is a list of d matrices A[s] of shape D_left x D_right.
// An MPO site is a sparse list of blocks {left, right, op} where op is the
// d x d operator on that site (op(out, in)). Bond dimensions at both ends
// are 1.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "clockmps/circuit.hpp"
#include "clockmps/sparse.hpp"

namespace clockmps {

using Index = Eigen::Index;

enum class CanonicalKind { None, Left, Right, Mixed };

struct CanonicalForm {
  CanonicalKind kind = CanonicalKind::None;
  std::size_t center = 0;  // meaningful for Mixed

  bool operator==(const CanonicalForm&) const = default;
};

std::string canonical_form_name(CanonicalForm form);

/// Singular-value truncation rule. Values with s_i <= rel_cutoff * s_0 are
/// always dropped; beyond that, the smallest are dropped while the discarded
/// squared weight (relative to the total) stays <= max_discarded_weight and
/// the kept count stays <= max_bond. At least one value is kept.
struct Truncation {
  Index max_bond = 0;  // 0: unlimited
  double max_discarded_weight = 0.0;
  double rel_cutoff = 1e-12;
};

template <typename Scalar>
struct SvdSplit {
  Matrix<Scalar> u;                   // m x k, orthonormal columns
  Eigen::VectorXd s;                  // k, descending
  Matrix<Scalar> vh;                  // k x n, orthonormal rows
  double discarded_weight = 0.0;      // sum of dropped s_i^2 / sum of all s_i^2
};

template <typename Scalar>
SvdSplit<Scalar> truncated_svd(const Matrix<Scalar>& m, const Truncation& trunc);

template <typename Scalar>
class MatrixProductState {
 public:
  using Mat = Matrix<Scalar>;
  using SiteTensor = std::vector<Mat>;

  MatrixProductState() = default;
  /// Throws std::invalid_argument on inconsistent shapes.
  explicit MatrixProductState(std::vector<SiteTensor> sites, CanonicalForm form = {});

  std::size_t num_sites() const { return sites_.size(); }
  Index phys_dim(std::size_t s) const { return static_cast<Index>(sites_[s].size()); }
  std::vector<Index> phys_dims() const;
  /// D_0 .. D_N; D_0 = D_N = 1.
  std::vector<Index> bond_dims() const;
  /// The N-1 internal bonds.
  std::vector<Index> internal_bond_dims() const;
  Index max_bond() const;

  const SiteTensor& site(std::size_t s) const { return sites_[s]; }
  /// Replaces a site; the canonical form is reset to None.
  void set_site(std::size_t s, SiteTensor tensor);
  /// Direct access; the caller is responsible for the canonical form.
  SiteTensor& site_unchecked(std::size_t s) { return sites_[s]; }

  CanonicalForm canonical_form() const { return form_; }
  void set_canonical_form(CanonicalForm form) { form_ = form; }

  void validate() const;

 private:
  std::vector<SiteTensor> sites_;
  CanonicalForm form_;
};

template <typename Scalar>
struct MpoBlock {
  Index left = 0;
  Index right = 0;
  Matrix<Scalar> op;  // d x d
};

template <typename Scalar>
struct MpoSite {
  Index left_dim = 1;
  Index right_dim = 1;
  Index phys_dim = 1;
  std::vector<MpoBlock<Scalar>> blocks;
};

template <typename Scalar>
class MatrixProductOperator {
 public:
  MatrixProductOperator() = default;
  /// Throws std::invalid_argument on inconsistent shapes.
  MatrixProductOperator(std::vector<MpoSite<Scalar>> sites, bool hermitian);

  std::size_t num_sites() const { return sites_.size(); }
  const MpoSite<Scalar>& site(std::size_t s) const { return sites_[s]; }
  std::vector<Index> phys_dims() const;
  std::vector<Index> bond_dims() const;
  Index max_bond() const;
  bool hermitian() const { return hermitian_; }

  void validate() const;

 private:
  std::vector<MpoSite<Scalar>> sites_;
  bool hermitian_ = false;
};

template <typename Scalar>
using Mps = MatrixProductState<Scalar>;
template <typename Scalar>
using Mpo = MatrixProductOperator<Scalar>;

/// Product of the site dimensions, or BudgetError when above `max_dim`.
std::uint64_t checked_dimension(std::span<const Index> dims, std::uint64_t max_dim);

constexpr std::uint64_t kMaxDenseStateDim = std::uint64_t{1} << 26;

// --- construction --------------------------------------------------------

/// Successive-SVD tensor train of a dense vector whose first site is the
/// slowest-varying index. Left-canonical, with the norm on the last site.
template <typename Scalar>
Mps<Scalar> mps_from_dense(const Vector<Scalar>& v, std::span<const Index> dims,
                           const Truncation& trunc = {});

template <typename Scalar>
Mps<Scalar> product_state(std::span<const Index> dims, std::span<const Index> config);

/// Gaussian random tensors with bonds min(max_bond, left size, right size);
/// right-canonical and normalized.
template <typename Scalar>
Mps<Scalar> random_mps(std::span<const Index> dims, Index max_bond, std::uint64_t seed);

// --- canonical forms -----------------------------------------------------

template <typename Scalar>
void left_canonicalize(Mps<Scalar>& mps);
template <typename Scalar>
void right_canonicalize(Mps<Scalar>& mps);
/// Sites left of `center` left-orthonormal, right of it right-orthonormal.
template <typename Scalar>
void mixed_canonicalize(Mps<Scalar>& mps, std::size_t center);

/// max |sum_s A_s^H A_s - I| (left) or |sum_s A_s A_s^H - I| (right).
template <typename Scalar>
double isometry_defect(const Mps<Scalar>& mps, std::size_t site, bool left);

/// Largest isometry defect over the sites the claimed form covers.
template <typename Scalar>
double canonical_defect(const Mps<Scalar>& mps);

template <typename Scalar>
struct CompressResult {
  Mps<Scalar> mps;
  double fidelity = 1.0;                 // |<in|out>|^2 / (<in|in><out|out>)
  std::vector<double> discarded_weights; // per internal bond
};

/// SVD compression; the result is left-canonical with the input's norm.
template <typename Scalar>
CompressResult<Scalar> compress(const Mps<Scalar>& mps, const Truncation& trunc);

// --- contractions --------------------------------------------------------

/// <a|b>.
template <typename Scalar>
Scalar overlap(const Mps<Scalar>& a, const Mps<Scalar>& b);

template <typename Scalar>
double norm(const Mps<Scalar>& mps);

/// Fidelity |<a|b>|^2 / (<a|a><b|b>).
template <typename Scalar>
double fidelity(const Mps<Scalar>& a, const Mps<Scalar>& b);

/// <psi|H|psi> (not normalized).
template <typename Scalar>
Scalar expectation(const Mps<Scalar>& mps, const Mpo<Scalar>& mpo);

/// Dense amplitudes, first site slowest.
template <typename Scalar>
Vector<Scalar> to_dense(const Mps<Scalar>& mps, std::uint64_t max_dim = kMaxDenseStateDim);

template <typename Scalar>
Matrix<Scalar> to_dense(const Mpo<Scalar>& mpo, std::uint64_t max_dim = 1u << 13);

/// H |v> through the MPO without forming the dense operator.
template <typename Scalar>
Vector<Scalar> apply(const Mpo<Scalar>& mpo, const Vector<Scalar>& v);

/// Normalized Schmidt values at each internal bond.
template <typename Scalar>
std::vector<Eigen::VectorXd> schmidt_values(const Mps<Scalar>& mps);

/// Base-2 entanglement entropy at each internal bond.
template <typename Scalar>
std::vector<double> entanglement_entropies(const Mps<Scalar>& mps);

// --- readout ---------------------------------------------------------------

struct Readout {
  BitString bits;             // one bit per requested site
  double probability = 0.0;   // P(bits | conditioning site = value)
  double condition_weight = 0.0;  // P(conditioning site = value)
  bool ambiguous = true;      // probability < kReadoutThreshold
};

constexpr double kReadoutThreshold = 0.9;

/// Most probable configuration of the qubit `sites` given that
/// `condition_site` takes `condition_value`, chosen one site at a time by
/// the conditional marginals.
template <typename Scalar>
Readout read_assignment(const Mps<Scalar>& mps, std::span<const std::size_t> sites,
                        std::size_t condition_site = 0, Index condition_value = 0);

// --- MPO utilities -------------------------------------------------------

/// SVD compression of the MPO bonds (Frobenius inner product).
template <typename Scalar>
Mpo<Scalar> compress_mpo(const Mpo<Scalar>& mpo, double rel_cutoff = 1e-13);

#define CLOCKMPS_MPS_EXTERN(S)                                                          \
  extern template SvdSplit<S> truncated_svd<S>(const Matrix<S>&, const Truncation&);    \
  extern template class MatrixProductState<S>;                                          \
  extern template class MatrixProductOperator<S>;                                       \
  extern template Mps<S> mps_from_dense<S>(const Vector<S>&, std::span<const Index>,    \
                                           const Truncation&);                          \
  extern template Mps<S> product_state<S>(std::span<const Index>,                       \
                                          std::span<const Index>);                      \
  extern template Mps<S> random_mps<S>(std::span<const Index>, Index, std::uint64_t);   \
  extern template void left_canonicalize<S>(Mps<S>&);                                   \
  extern template void right_canonicalize<S>(Mps<S>&);                                  \
  extern template void mixed_canonicalize<S>(Mps<S>&, std::size_t);                     \
  extern template double isometry_defect<S>(const Mps<S>&, std::size_t, bool);          \
  extern template double canonical_defect<S>(const Mps<S>&);                            \
  extern template CompressResult<S> compress<S>(const Mps<S>&, const Truncation&);      \
  extern template S overlap<S>(const Mps<S>&, const Mps<S>&);                           \
  extern template double norm<S>(const Mps<S>&);                                        \
  extern template double fidelity<S>(const Mps<S>&, const Mps<S>&);                     \
  extern template S expectation<S>(const Mps<S>&, const Mpo<S>&);                       \
  extern template Vector<S> to_dense<S>(const Mps<S>&, std::uint64_t);                  \
  extern template Matrix<S> to_dense<S>(const Mpo<S>&, std::uint64_t);                  \
  extern template Vector<S> apply<S>(const Mpo<S>&, const Vector<S>&);                  \
  extern template std::vector<Eigen::VectorXd> schmidt_values<S>(const Mps<S>&);        \
  extern template std::vector<double> entanglement_entropies<S>(const Mps<S>&);         \
  extern template Readout read_assignment<S>(const Mps<S>&, std::span<const std::size_t>, \
                                             std::size_t, Index);                       \
  extern template Mpo<S> compress_mpo<S>(const Mpo<S>&, double);

CLOCKMPS_MPS_EXTERN(double)
CLOCKMPS_MPS_EXTERN(Complex)
#undef CLOCKMPS_MPS_EXTERN

}  // namespace clockmps
