#include "clockmps/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace clockmps {

PenaltyProfile PenaltyProfile::canonical(std::size_t T, int A, int B, double init_weight) {
  if (A < 0) throw std::invalid_argument("penalty profile: A must be >= 0");
  PenaltyProfile p;
  p.T = T;
  p.diag_penalties.assign(T + 1, 0.0);
  const double w = init_weight < 0.0 ? static_cast<double>(T) : init_weight;
  p.diag_penalties[0] = w * A;
  p.final_penalty = B;
  p.validate();
  return p;
}

void PenaltyProfile::validate() const {
  if (T < 1) throw std::invalid_argument("penalty profile: T must be >= 1");
  if (diag_penalties.size() != T + 1)
    throw std::invalid_argument("penalty profile: need T+1 diagonal penalties");
  for (double d : diag_penalties)
    if (!(d >= 0.0)) throw std::invalid_argument("penalty profile: negative penalty");
  if (final_penalty != 0 && final_penalty != 1)
    throw std::invalid_argument("penalty profile: B must be 0 or 1");
}

SubspaceHamiltonian::SubspaceHamiltonian(PenaltyProfile profile) : profile_(std::move(profile)) {
  profile_.validate();
  const std::size_t n = profile_.T + 1;
  matrix_.diag.assign(n, 2.0);
  matrix_.diag.front() = 1.0;
  matrix_.diag.back() = 1.0;
  for (std::size_t t = 0; t < n; ++t) matrix_.diag[t] += profile_.diag_penalties[t];
  matrix_.diag.back() += profile_.final_penalty;
  matrix_.offdiag.assign(n - 1, -1.0);
}

AnalyticSpectrum::AnalyticSpectrum(std::size_t T, SpectrumCase which) : T_(T), case_(which) {
  if (T < 1) throw std::invalid_argument("analytic spectrum: T must be >= 1");
  const double pi = std::numbers::pi;
  const std::size_t n_levels = T + 1;
  frequencies_.resize(n_levels);
  eigenvalues_.resize(n_levels);
  normalizations_.resize(n_levels);
  for (std::size_t n = 0; n < n_levels; ++n) {
    const double w = which == SpectrumCase::A0B0
                         ? static_cast<double>(n) * pi / static_cast<double>(T + 1)
                         : (static_cast<double>(n) + 0.5) * pi / (static_cast<double>(T) + 1.5);
    frequencies_[n] = w;
    // 2(1 - cos w) = 4 sin^2(w/2), without cancellation for small w.
    const double s = std::sin(0.5 * w);
    eigenvalues_[n] = 4.0 * s * s;
    double sum = 0.0;
    for (std::size_t t = 0; t <= T; ++t) {
      const double c = std::cos(w * (static_cast<double>(t) + 0.5));
      sum += c * c;
    }
    normalizations_[n] = 1.0 / std::sqrt(sum);
  }
}

double AnalyticSpectrum::coefficient(std::size_t n, std::size_t t) const {
  return normalizations_[n] * std::cos(frequencies_[n] * (static_cast<double>(t) + 0.5));
}

Eigen::VectorXd AnalyticSpectrum::eigenvector(std::size_t n) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(T_ + 1));
  for (std::size_t t = 0; t <= T_; ++t) v[static_cast<Eigen::Index>(t)] = coefficient(n, t);
  return v;
}

NumericSpectrum numeric_spectrum(const SubspaceHamiltonian& h, bool with_vectors) {
  NumericSpectrum out;
  out.eigenvalues = tridiagonal_eigenvalues(h.matrix());
  if (with_vectors) out.eigenvectors = tridiagonal_eigenvectors(h.matrix(), out.eigenvalues);
  return out;
}

std::vector<double> numeric_eigenvalues(const SubspaceHamiltonian& h, std::size_t first,
                                        std::size_t count) {
  return tridiagonal_eigenvalues(h.matrix(), first, count);
}

namespace {

struct NullSplit {
  Eigen::MatrixXd null_basis;
  double smallest_nonzero = 0.0;
};

NullSplit split_spectrum(const Eigen::MatrixXd& m, double null_tol, const char* name) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument(std::string("gap lemma: ") + name + " must be square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw std::invalid_argument(std::string("gap lemma: ") + name + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  const double zero = null_tol * scale;
  if (ev[0] < -zero)
    throw std::invalid_argument(std::string("gap lemma: ") + name + " is not PSD");
  Eigen::Index k = 0;
  while (k < ev.size() && ev[k] <= zero) ++k;
  if (k == 0)
    throw std::invalid_argument(std::string("gap lemma: null space of ") + name + " is trivial");
  if (k == ev.size())
    throw std::invalid_argument(std::string("gap lemma: ") + name +
                                " has no nonzero eigenvalue");
  return {es.eigenvectors().leftCols(k), ev[k]};
}

}  // namespace

GapLemmaResult gap_lemma_bound(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q,
                               double null_tol) {
  if (P.rows() != Q.rows() || P.cols() != Q.cols())
    throw std::invalid_argument("gap lemma: P and Q differ in shape");
  const NullSplit sp = split_spectrum(P, null_tol, "P");
  const NullSplit sq = split_spectrum(Q, null_tol, "Q");
  // cos of the smallest principal angle = largest singular value of Np^T Nq.
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sp.null_basis.transpose() * sq.null_basis);
  const double cos_theta = std::clamp(svd.singularValues()[0], 0.0, 1.0);
  GapLemmaResult r;
  r.delta_p = sp.smallest_nonzero;
  r.delta_q = sq.smallest_nonzero;
  r.theta = std::acos(cos_theta);
  r.bound = std::min(r.delta_p, r.delta_q) * (1.0 - cos_theta);
  r.null_dim_p = sp.null_basis.cols();
  r.null_dim_q = sq.null_basis.cols();
  return r;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> clock_split(const PenaltyProfile& profile) {
  PenaltyProfile bare = profile;
  std::fill(bare.diag_penalties.begin(), bare.diag_penalties.end(), 0.0);
  bare.final_penalty = 0;
  const Eigen::MatrixXd laplacian = SubspaceHamiltonian(bare).dense();
  const Eigen::MatrixXd full = SubspaceHamiltonian(profile).dense();
  return {laplacian, full - laplacian};
}

double a1_gap_bound(std::size_t T) {
  if (T < 1) throw std::invalid_argument("a1_gap_bound: T must be >= 1");
  const double t = static_cast<double>(T);
  const double s = std::sin(0.5 * std::numbers::pi / (t + 1.0));
  return t * (2.0 * s * s) * (1.0 - std::sqrt(t / (t + 1.0)));
}

SubspaceReport subspace_report(std::size_t T, int A, int B, double init_weight) {
  const PenaltyProfile profile = PenaltyProfile::canonical(T, A, B, init_weight);
  const SubspaceHamiltonian h(profile);
  SubspaceReport r;
  r.T = T;
  r.A = A;
  r.B = B;
  r.numeric = numeric_spectrum(h, false).eigenvalues;
  r.gap = r.numeric[1] - r.numeric[0];
  if (A == 0) {
    r.analytic = AnalyticSpectrum(T, B == 0 ? SpectrumCase::A0B0 : SpectrumCase::A0B1).eigenvalues();
    double err = 0.0;
    for (std::size_t n = 0; n < r.numeric.size(); ++n)
      err = std::max(err, std::abs(r.analytic[n] - r.numeric[n]));
    r.max_abs_err = err;
  }
  if (A > 0 || B > 0) {
    const auto [laplacian, penalties] = clock_split(profile);
    try {
      r.bound = gap_lemma_bound(laplacian, penalties).bound;
    } catch (const std::invalid_argument&) {
    }
  }
  return r;
}

}  // namespace clockmps
