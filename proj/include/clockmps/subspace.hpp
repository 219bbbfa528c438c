#pragma once

// The (T+1)x(T+1) restriction of the clock Hamiltonian to one classical
// history span{|chi_0>, ..., |chi_T>}: a path Laplacian (1,2,...,2,1 on the
// diagonal, -1 off it) plus nonnegative diagonal penalties.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "clockmps/tridiagonal.hpp"

namespace clockmps {

struct PenaltyProfile {
  std::size_t T = 1;
  std::vector<double> diag_penalties;  // length T+1, all >= 0
  int final_penalty = 0;               // B in {0, 1}

  /// d = (init_weight * A, 0, ..., 0); init_weight defaults to T.
  static PenaltyProfile canonical(std::size_t T, int A, int B, double init_weight = -1.0);

  /// Throws std::invalid_argument when T < 1, d has the wrong length, any
  /// d_t < 0, or B is not 0/1.
  void validate() const;
};

class SubspaceHamiltonian {
 public:
  explicit SubspaceHamiltonian(PenaltyProfile profile);

  const PenaltyProfile& profile() const { return profile_; }
  const SymTridiagonal& matrix() const { return matrix_; }
  std::size_t size() const { return matrix_.size(); }
  Eigen::MatrixXd dense() const { return matrix_.to_dense(); }

 private:
  PenaltyProfile profile_;
  SymTridiagonal matrix_;
};

inline SubspaceHamiltonian build_subspace_hamiltonian(const PenaltyProfile& profile) {
  return SubspaceHamiltonian(profile);
}

/// The two closed-form cases: no penalties, or only the final penalty.
enum class SpectrumCase { A0B0, A0B1 };

/// Eigenpairs lambda_n = 2(1 - cos w_n) with eigenvector components
/// C_n cos(w_n (t + 1/2)), where w_n = n pi / (T+1) for A0B0 and
/// (n + 1/2) pi / (T + 3/2) for A0B1.
class AnalyticSpectrum {
 public:
  AnalyticSpectrum(std::size_t T, SpectrumCase which);

  std::size_t T() const { return T_; }
  SpectrumCase which() const { return case_; }
  std::size_t size() const { return T_ + 1; }

  double frequency(std::size_t n) const { return frequencies_[n]; }
  double eigenvalue(std::size_t n) const { return eigenvalues_[n]; }
  /// C_n with C_n^2 = 1 / sum_t cos^2(w_n (t + 1/2)).
  double normalization(std::size_t n) const { return normalizations_[n]; }
  double coefficient(std::size_t n, std::size_t t) const;
  Eigen::VectorXd eigenvector(std::size_t n) const;

  const std::vector<double>& frequencies() const { return frequencies_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

 private:
  std::size_t T_;
  SpectrumCase case_;
  std::vector<double> frequencies_;
  std::vector<double> eigenvalues_;
  std::vector<double> normalizations_;
};

inline AnalyticSpectrum analytic_spectrum(std::size_t T, SpectrumCase which) {
  return AnalyticSpectrum(T, which);
}

struct NumericSpectrum {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;     // columns; empty if not requested
};

NumericSpectrum numeric_spectrum(const SubspaceHamiltonian& h, bool with_vectors = true);

/// Ascending eigenvalues with indices [first, first + count).
std::vector<double> numeric_eigenvalues(const SubspaceHamiltonian& h, std::size_t first,
                                        std::size_t count);

struct GapLemmaResult {
  double delta_p = 0.0;  // smallest nonzero eigenvalue of P
  double delta_q = 0.0;
  double theta = 0.0;    // smallest principal angle between the null spaces
  double bound = 0.0;    // min(delta_p, delta_q) * (1 - cos theta)
  Eigen::Index null_dim_p = 0;
  Eigen::Index null_dim_q = 0;
};

/// Lower bound on the smallest eigenvalue of P + Q for PSD P, Q with
/// nontrivial null spaces. Eigenvalues at most `null_tol * max(1, ||O||)`
/// count as zero. Throws std::invalid_argument if a null space is trivial
/// or a matrix is not PSD / symmetric.
GapLemmaResult gap_lemma_bound(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q,
                               double null_tol = 1e-10);

/// Splits H_a into (path Laplacian, diagonal penalties).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> clock_split(const PenaltyProfile& profile);

/// T (1 - cos(pi/(T+1))) (1 - sqrt(T/(T+1))): the stated lower bound on
/// the ground energy of the A=1, B=0 block.
double a1_gap_bound(std::size_t T);

/// Per-profile summary for the canonical (A, B) block.
struct SubspaceReport {
  std::size_t T = 1;
  int A = 0;
  int B = 0;
  std::vector<double> analytic;  // empty when A > 0 (no closed form)
  std::vector<double> numeric;
  std::optional<double> max_abs_err;
  double gap = 0.0;                // numeric lambda_1 - lambda_0
  std::optional<double> bound;     // gap lemma on the Laplacian/penalty split
};

SubspaceReport subspace_report(std::size_t T, int A, int B, double init_weight = -1.0);

}  // namespace clockmps
