#include "clockmps/dmrg.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include <Eigen/QR>

#include "clockmps/lanczos.hpp"

namespace clockmps {

template <typename Scalar>
void DmrgConfig<Scalar>::validate() const {
  if (max_bond < 1) throw std::invalid_argument("dmrg: max_bond must be >= 1");
  if (num_sweeps < 1) throw std::invalid_argument("dmrg: num_sweeps must be >= 1");
  if (!(energy_tol > 0.0) || !(local_tol > 0.0) || !(svd_cutoff >= 0.0))
    throw std::invalid_argument("dmrg: tolerances must be positive");
  if (local_max_iter < 2) throw std::invalid_argument("dmrg: local_max_iter must be >= 2");
  if (init == DmrgInit::Given && !initial) throw std::invalid_argument("dmrg: GIVEN needs a state");
}

namespace {

template <typename Scalar>
using Mat = Matrix<Scalar>;
template <typename Scalar>
using Env = std::vector<Mat<Scalar>>;

template <typename Scalar>
struct SparseOp {
  Index left, right;
  std::vector<std::tuple<Index, Index, Scalar>> entries;  // (out, in, value)
};

template <typename Scalar>
std::vector<std::vector<SparseOp<Scalar>>> sparse_blocks(const Mpo<Scalar>& mpo) {
  std::vector<std::vector<SparseOp<Scalar>>> out(mpo.num_sites());
  for (std::size_t s = 0; s < mpo.num_sites(); ++s)
    for (const auto& b : mpo.site(s).blocks) {
      SparseOp<Scalar> op{b.left, b.right, {}};
      for (Index i = 0; i < b.op.cols(); ++i)
        for (Index o = 0; o < b.op.rows(); ++o)
          if (b.op(o, i) != Scalar(0)) op.entries.emplace_back(o, i, b.op(o, i));
      if (!op.entries.empty()) out[s].push_back(std::move(op));
    }
  return out;
}

// Environment of sites < s+1 from that of sites < s.
template <typename Scalar>
Env<Scalar> grow_left(const Env<Scalar>& left, const std::vector<Mat<Scalar>>& a,
                      const std::vector<SparseOp<Scalar>>& ops, Index right_dim) {
  const Index dr = a[0].cols();
  Env<Scalar> next(static_cast<std::size_t>(right_dim), Mat<Scalar>::Zero(dr, dr));
  std::vector<std::vector<Mat<Scalar>>> cache(left.size());
  for (const auto& op : ops) {
    auto& row = cache[static_cast<std::size_t>(op.left)];
    if (row.empty()) {
      row.resize(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) row[i] = left[static_cast<std::size_t>(op.left)] * a[i];
    }
    for (const auto& [o, i, c] : op.entries)
      next[static_cast<std::size_t>(op.right)].noalias() +=
          c * (a[static_cast<std::size_t>(o)].adjoint() * row[static_cast<std::size_t>(i)]);
  }
  return next;
}

// Environment of sites >= s from that of sites >= s+1.
template <typename Scalar>
Env<Scalar> grow_right(const Env<Scalar>& right, const std::vector<Mat<Scalar>>& a,
                       const std::vector<SparseOp<Scalar>>& ops, Index left_dim) {
  const Index dl = a[0].rows();
  Env<Scalar> next(static_cast<std::size_t>(left_dim), Mat<Scalar>::Zero(dl, dl));
  std::vector<std::vector<Mat<Scalar>>> cache(right.size());
  for (const auto& op : ops) {
    auto& row = cache[static_cast<std::size_t>(op.right)];
    if (row.empty()) {
      row.resize(a.size());
      for (std::size_t i = 0; i < a.size(); ++i)
        row[i] = right[static_cast<std::size_t>(op.right)] * a[i].transpose();
    }
    for (const auto& [o, i, c] : op.entries)
      next[static_cast<std::size_t>(op.left)].noalias() +=
          c * (a[static_cast<std::size_t>(o)].conjugate() * row[static_cast<std::size_t>(i)]);
  }
  return next;
}

// Local tensor: d matrices Dl x Dr flattened one after another.
template <typename Scalar>
void unflatten(std::span<const Scalar> in, Index count, Index rows, Index cols,
               std::vector<Mat<Scalar>>& out) {
  out.resize(static_cast<std::size_t>(count));
  for (Index p = 0; p < count; ++p)
    out[static_cast<std::size_t>(p)] = Eigen::Map<const Mat<Scalar>>(in.data() + p * rows * cols, rows, cols);
}

template <typename Scalar>
Vector<Scalar> flatten(const std::vector<Mat<Scalar>>& parts) {
  const Index n = parts[0].size();
  Vector<Scalar> v(n * static_cast<Index>(parts.size()));
  for (std::size_t p = 0; p < parts.size(); ++p)
    v.segment(static_cast<Index>(p) * n, n) = Eigen::Map<const Vector<Scalar>>(parts[p].data(), n);
  return v;
}

template <typename Scalar>
class Sweeper {
 public:
  Sweeper(const Mpo<Scalar>& mpo, const DmrgConfig<Scalar>& cfg, Mps<Scalar> psi)
      : mpo_(mpo), cfg_(cfg), ops_(sparse_blocks(mpo)), psi_(std::move(psi)) {
    const std::size_t n = psi_.num_sites();
    left_.resize(n + 1);
    right_.resize(n + 1);
    left_[0] = {Mat<Scalar>::Ones(1, 1)};
    right_[n] = {Mat<Scalar>::Ones(1, 1)};
    for (std::size_t s = n; s-- > 1;) update_right(s);
  }

  Mps<Scalar>& state() { return psi_; }

  double optimize_pair(std::size_t s, bool moving_right) {
    const auto& a1 = psi_.site(s);
    const auto& a2 = psi_.site(s + 1);
    const Index d1 = static_cast<Index>(a1.size()), d2 = static_cast<Index>(a2.size());
    const Index dl = a1[0].rows(), dr = a2[0].cols();
    std::vector<Mat<Scalar>> theta(static_cast<std::size_t>(d1 * d2));
    for (Index s2 = 0; s2 < d2; ++s2)
      for (Index s1 = 0; s1 < d1; ++s1)
        theta[static_cast<std::size_t>(s1 + d1 * s2)] = a1[static_cast<std::size_t>(s1)] * a2[static_cast<std::size_t>(s2)];
    const Vector<Scalar> start = flatten(theta);

    const auto& L = left_[s];
    const auto& R = right_[s + 2];
    std::vector<Mat<Scalar>> rt(R.size());
    for (std::size_t w = 0; w < R.size(); ++w) rt[w] = R[w].transpose();
    const Index wm = mpo_.site(s).right_dim;
    std::vector<std::vector<std::size_t>> by_right(R.size());
    for (std::size_t k = 0; k < ops_[s + 1].size(); ++k)
      by_right[static_cast<std::size_t>(ops_[s + 1][k].right)].push_back(k);

    LinearOperator<Scalar> op = [&](std::span<const Scalar> in, std::span<Scalar> out) {
      std::vector<Mat<Scalar>> th;
      unflatten(in, d1 * d2, dl, dr, th);
      // t2[wm][(o1, i2)] = sum c1 L[wl] th[(i1, i2)]
      std::vector<std::vector<Mat<Scalar>>> t2(static_cast<std::size_t>(wm));
      std::vector<std::vector<Mat<Scalar>>> lth(L.size());
      for (const auto& b : ops_[s]) {
        auto& cache = lth[static_cast<std::size_t>(b.left)];
        if (cache.empty()) {
          cache.resize(th.size());
          for (std::size_t p = 0; p < th.size(); ++p) cache[p] = L[static_cast<std::size_t>(b.left)] * th[p];
        }
        auto& dst = t2[static_cast<std::size_t>(b.right)];
        if (dst.empty()) dst.assign(th.size(), Mat<Scalar>::Zero(dl, dr));
        for (const auto& [o1, i1, c1] : b.entries)
          for (Index s2 = 0; s2 < d2; ++s2)
            dst[static_cast<std::size_t>(o1 + d1 * s2)] += c1 * cache[static_cast<std::size_t>(i1 + d1 * s2)];
      }
      std::vector<Mat<Scalar>> result(th.size(), Mat<Scalar>::Zero(dl, dr));
      std::vector<Mat<Scalar>> u(th.size());
      for (std::size_t wr = 0; wr < by_right.size(); ++wr) {
        if (by_right[wr].empty()) continue;
        bool any = false;
        for (auto& m : u) m.setZero(dl, dr);
        for (std::size_t k : by_right[wr]) {
          const auto& b = ops_[s + 1][k];
          const auto& src = t2[static_cast<std::size_t>(b.left)];
          if (src.empty()) continue;
          any = true;
          for (const auto& [o2, i2, c2] : b.entries)
            for (Index s1 = 0; s1 < d1; ++s1)
              u[static_cast<std::size_t>(s1 + d1 * o2)] += c2 * src[static_cast<std::size_t>(s1 + d1 * i2)];
        }
        if (!any) continue;
        for (std::size_t p = 0; p < u.size(); ++p) result[p].noalias() += u[p] * rt[wr];
      }
      const Vector<Scalar> flat = flatten(result);
      std::copy(flat.data(), flat.data() + flat.size(), out.data());
    };

    const double energy = solve_local(op, start);
    unflatten<Scalar>({solution_.data(), static_cast<std::size_t>(solution_.size())}, d1 * d2, dl, dr, theta);

    Mat<Scalar> m(dl * d1, d2 * dr);
    for (Index s2 = 0; s2 < d2; ++s2)
      for (Index s1 = 0; s1 < d1; ++s1)
        m.block(s1 * dl, s2 * dr, dl, dr) = theta[static_cast<std::size_t>(s1 + d1 * s2)];
    Truncation trunc;
    trunc.max_bond = cfg_.max_bond;
    trunc.rel_cutoff = cfg_.svd_cutoff;
    SvdSplit<Scalar> split = truncated_svd<Scalar>(m, trunc);
    split.s /= split.s.norm();
    const Index k = split.s.size();
    Mat<Scalar> left = split.u, right = split.vh;
    if (moving_right) right = split.s.template cast<Scalar>().asDiagonal() * right;
    else left = left * split.s.template cast<Scalar>().asDiagonal();
    std::vector<Mat<Scalar>> n1(static_cast<std::size_t>(d1)), n2(static_cast<std::size_t>(d2));
    for (Index s1 = 0; s1 < d1; ++s1) n1[static_cast<std::size_t>(s1)] = left.middleRows(s1 * dl, dl);
    for (Index s2 = 0; s2 < d2; ++s2) n2[static_cast<std::size_t>(s2)] = right.middleCols(s2 * dr, dr);
    (void)k;
    psi_.site_unchecked(s) = std::move(n1);
    psi_.site_unchecked(s + 1) = std::move(n2);
    if (moving_right) {
      update_left(s);
      psi_.set_canonical_form({CanonicalKind::Mixed, s + 1});
    } else {
      update_right(s + 1);
      psi_.set_canonical_form({CanonicalKind::Mixed, s});
    }
    return energy;
  }

  double optimize_site(std::size_t s, bool moving_right) {
    const auto& a = psi_.site(s);
    const Index d = static_cast<Index>(a.size());
    const Index dl = a[0].rows(), dr = a[0].cols();
    const Vector<Scalar> start = flatten(a);
    const auto& L = left_[s];
    const auto& R = right_[s + 1];
    std::vector<Mat<Scalar>> rt(R.size());
    for (std::size_t w = 0; w < R.size(); ++w) rt[w] = R[w].transpose();

    LinearOperator<Scalar> op = [&](std::span<const Scalar> in, std::span<Scalar> out) {
      std::vector<Mat<Scalar>> th;
      unflatten(in, d, dl, dr, th);
      std::vector<Mat<Scalar>> result(th.size(), Mat<Scalar>::Zero(dl, dr));
      for (const auto& b : ops_[s]) {
        for (const auto& [o, i, c] : b.entries)
          result[static_cast<std::size_t>(o)].noalias() +=
              c * (L[static_cast<std::size_t>(b.left)] * th[static_cast<std::size_t>(i)] * rt[static_cast<std::size_t>(b.right)]);
      }
      const Vector<Scalar> flat = flatten(result);
      std::copy(flat.data(), flat.data() + flat.size(), out.data());
    };
    const double energy = solve_local(op, start);
    std::vector<Mat<Scalar>> theta;
    unflatten<Scalar>({solution_.data(), static_cast<std::size_t>(solution_.size())}, d, dl, dr, theta);
    psi_.site_unchecked(s) = theta;
    const std::size_t n = psi_.num_sites();
    if (moving_right && s + 1 < n) {
      Mat<Scalar> m(dl * d, dr);
      for (Index k = 0; k < d; ++k) m.middleRows(k * dl, dl) = theta[static_cast<std::size_t>(k)];
      Eigen::HouseholderQR<Mat<Scalar>> qr(m);
      const Index kk = std::min(m.rows(), m.cols());
      const Mat<Scalar> q = qr.householderQ() * Mat<Scalar>::Identity(m.rows(), kk);
      const Mat<Scalar> r = qr.matrixQR().topRows(kk).template triangularView<Eigen::Upper>();
      for (Index k = 0; k < d; ++k) psi_.site_unchecked(s)[static_cast<std::size_t>(k)] = q.middleRows(k * dl, dl);
      for (auto& x : psi_.site_unchecked(s + 1)) x = r * x;
      update_left(s);
      psi_.set_canonical_form({CanonicalKind::Mixed, s + 1});
    } else if (!moving_right && s > 0) {
      Mat<Scalar> m(dl, d * dr);
      for (Index k = 0; k < d; ++k) m.middleCols(k * dr, dr) = theta[static_cast<std::size_t>(k)];
      const Mat<Scalar> mh = m.adjoint();
      Eigen::HouseholderQR<Mat<Scalar>> qr(mh);
      const Index kk = std::min(mh.rows(), mh.cols());
      const Mat<Scalar> q = qr.householderQ() * Mat<Scalar>::Identity(mh.rows(), kk);
      const Mat<Scalar> r = qr.matrixQR().topRows(kk).template triangularView<Eigen::Upper>();
      const Mat<Scalar> qh = q.adjoint();
      for (Index k = 0; k < d; ++k) psi_.site_unchecked(s)[static_cast<std::size_t>(k)] = qh.middleCols(k * dr, dr);
      const Mat<Scalar> rh = r.adjoint();
      for (auto& x : psi_.site_unchecked(s - 1)) x = x * rh;
      update_right(s);
      psi_.set_canonical_form({CanonicalKind::Mixed, s - 1});
    }
    return energy;
  }

 private:
  double solve_local(const LinearOperator<Scalar>& op, const Vector<Scalar>& start) {
    LanczosOptions opts;
    opts.max_krylov = cfg_.local_max_iter;
    opts.max_restarts = 4;
    opts.tol = cfg_.local_tol;
    opts.seed = cfg_.seed ^ (0x9e3779b97f4a7c15ULL * ++updates_);
    const Vector<Scalar> x0 = start / start.norm();
    LanczosResult<Scalar> res = lanczos_lowest<Scalar>(op, start.size(), 1, opts, &x0);
    solution_ = res.pairs[0].vector;
    return res.pairs[0].value;
  }

  void update_left(std::size_t s) {
    left_[s + 1] = grow_left(left_[s], psi_.site(s), ops_[s], mpo_.site(s).right_dim);
  }
  void update_right(std::size_t s) {
    right_[s] = grow_right(right_[s + 1], psi_.site(s), ops_[s], mpo_.site(s).left_dim);
  }

  const Mpo<Scalar>& mpo_;
  const DmrgConfig<Scalar>& cfg_;
  std::vector<std::vector<SparseOp<Scalar>>> ops_;
  Mps<Scalar> psi_;
  std::vector<Env<Scalar>> left_, right_;
  Vector<Scalar> solution_;
  std::uint64_t updates_ = 0;
};

}  // namespace

template <typename Scalar>
DmrgTrace<Scalar> dmrg_ground_state(const Mpo<Scalar>& mpo, const DmrgConfig<Scalar>& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Index> dims = mpo.phys_dims();
  const std::size_t n = dims.size();
  if (config.two_site && n < 2) throw std::invalid_argument("dmrg: two-site sweeps need >= 2 sites");
  Mps<Scalar> psi;
  switch (config.init) {
    case DmrgInit::Random: psi = random_mps<Scalar>(dims, config.max_bond, config.seed); break;
    case DmrgInit::Product: psi = product_state<Scalar>(dims, config.product_config); break;
    case DmrgInit::Given:
      psi = *config.initial;
      if (psi.phys_dims() != dims) throw std::invalid_argument("dmrg: initial state does not match the MPO");
      right_canonicalize(psi);
      {
        const double nrm = norm(psi);
        if (!(nrm > 0.0)) throw std::invalid_argument("dmrg: initial state has zero norm");
        for (auto& a : psi.site_unchecked(0)) a /= nrm;
      }
      break;
  }

  DmrgTrace<Scalar> trace;
  Sweeper<Scalar> sweeper(mpo, config, std::move(psi));
  double previous = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < config.num_sweeps; ++sweep) {
    double e = 0.0;
    if (config.two_site) {
      for (std::size_t s = 0; s + 1 < n; ++s) trace.update_energies.push_back(e = sweeper.optimize_pair(s, true));
      for (std::size_t s = n - 1; s-- > 0;) trace.update_energies.push_back(e = sweeper.optimize_pair(s, false));
    } else {
      for (std::size_t s = 0; s < n; ++s) trace.update_energies.push_back(e = sweeper.optimize_site(s, true));
      for (std::size_t s = n; s-- > 0;) trace.update_energies.push_back(e = sweeper.optimize_site(s, false));
    }
    trace.sweep_energies.push_back(e);
    trace.sweeps_run = sweep + 1;
    if (std::abs(e - previous) < config.energy_tol) {
      trace.converged = true;
      break;
    }
    previous = e;
  }
  trace.final_state = std::move(sweeper.state());
  const double nn = std::real(overlap(trace.final_state, trace.final_state));
  trace.final_energy = std::real(expectation(trace.final_state, mpo)) / nn;
  trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

template struct DmrgConfig<double>;
template struct DmrgConfig<Complex>;
template DmrgTrace<double> dmrg_ground_state<double>(const Mpo<double>&, const DmrgConfig<double>&);
template DmrgTrace<Complex> dmrg_ground_state<Complex>(const Mpo<Complex>&, const DmrgConfig<Complex>&);

std::vector<ConvergenceRun> convergence_experiment(const std::vector<ConvergenceInstance>& instances,
                                                   const ConvergenceGrid& grid) {
  struct Job {
    std::size_t instance;
    std::uint64_t seed;
    Index bond;
    int sweeps;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (std::uint64_t seed : grid.seeds)
      for (Index d : grid.bonds)
        for (int sw : grid.sweeps) jobs.push_back({i, seed, d, sw});
  std::vector<ConvergenceRun> rows(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      try {
        const Job& job = jobs[j];
        const ConvergenceInstance& inst = instances[job.instance];
        DmrgConfig<double> cfg;
        cfg.max_bond = job.bond;
        cfg.num_sweeps = job.sweeps;
        cfg.seed = job.seed;
        const DmrgTrace<double> tr = dmrg_ground_state(inst.mpo, cfg);
        ConvergenceRun row;
        row.instance = inst.name;
        row.seed = job.seed;
        row.max_bond = job.bond;
        row.sweeps = tr.sweeps_run;
        row.final_energy = tr.final_energy;
        row.exact_energy = inst.ground_energy;
        row.error = tr.final_energy - inst.ground_energy;
        row.success = row.error < 0.5 * inst.gap;
        row.wall_seconds = tr.wall_seconds;
        rows[j] = row;
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(grid.threads, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

}  // namespace clockmps
