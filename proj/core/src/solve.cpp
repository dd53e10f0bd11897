#include "helmopt/solve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "helmopt/krylov.hpp"

namespace helmopt {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::VectorXcd flat(const Eigen::MatrixXcd& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

}  // namespace

void validate(const SolveOptions& opts) {
  if (!(opts.tolerance > 0.0 && opts.tolerance < 1.0)) {
    throw std::invalid_argument("SolveOptions: tolerance must lie in (0, 1)");
  }
  if (opts.max_iterations < 1) {
    throw std::invalid_argument("SolveOptions: max_iterations must be >= 1");
  }
  if (opts.restart < 1) {
    throw std::invalid_argument("SolveOptions: restart must be >= 1");
  }
}

ModalKktSolver::ModalKktSolver(const DiscreteSystem& sys)
    : blocks_(sys.blocks),
      m_rho_(sys.grid.m_rho),
      m_theta_(sys.grid.m_theta),
      k_(sys.k),
      n_mean_(sys.medium.n.rowwise().mean()),
      n2_mean_(sys.medium.n_squared.rowwise().mean()),
      w_radial_(sys.functional.weights().col(0)) {
  const int half = (m_theta_ - 1) / 2;
  u_.resize(m_theta_, m_theta_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m_theta_));
  for (int a = 0; a < m_theta_; ++a) {
    const int m = a - half;
    for (int i = 0; i < m_theta_; ++i) {
      // m * theta_i = 2 pi m (i+1) / M, reduced exactly before the trig call.
      long long r = (static_cast<long long>(m) * (i + 1)) % m_theta_;
      if (r < 0) r += m_theta_;
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(r) / m_theta_;
      u_(i, a) = std::polar(scale, ang);
    }
    p_.push_back(fold_shift_eigenvalue(m_theta_, m, blocks_->fold));
  }

  const SpectralBlocks& b = *blocks_;
  std::map<Key, int> seen;
  factor_of_mode_.resize(m_theta_);
  for (int a = 0; a < m_theta_; ++a) {
    const int m = a - half;
    const Complex p = p_[a];
    const Key key{{p.real(), p.imag()}, m * m};
    auto it = seen.find(key);
    if (it != seen.end()) {
      factor_of_mode_[a] = it->second;
      continue;
    }
    const Eigen::MatrixXcd d1 = b.d1.direct.cast<Complex>() + p * b.d1.folded.cast<Complex>();
    Eigen::MatrixXcd s = b.d2.direct.cast<Complex>() + p * b.d2.folded.cast<Complex>();
    s += b.inv_rho.asDiagonal() * d1;
    s.diagonal() += (k_ * k_) * n2_mean_.cast<Complex>() -
                    static_cast<double>(m * m) * b.inv_rho2.cast<Complex>();
    // Row 0 becomes the impedance closure u_rho - i k n u at rho = R.
    s.row(0) = d1.row(0);
    s(0, 0) -= kI * k_ * n_mean_(0);

    Factor f;
    f.lu.compute(s);
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(m_rho_);
    e0(0) = 1.0;
    f.z = f.lu.solve(e0);
    f.hz = mode_hessian(f.z, p, m);
    f.zhz = f.z.dot(f.hz).real();
    factors_.push_back(std::move(f));
    const int idx = static_cast<int>(factors_.size()) - 1;
    seen.emplace(key, idx);
    factor_of_mode_[a] = idx;
  }
}

Eigen::VectorXcd ModalKktSolver::radial_derivative(const Eigen::VectorXcd& v, Complex p) const {
  const SpectralBlocks& b = *blocks_;
  Eigen::VectorXcd out = b.d1.direct.cast<Complex>() * v;
  out += p * (b.d1.folded.cast<Complex>() * v);
  return out;
}

Eigen::VectorXcd ModalKktSolver::radial_derivative_adjoint(const Eigen::VectorXcd& y,
                                                           Complex p) const {
  const SpectralBlocks& b = *blocks_;
  Eigen::VectorXcd out = b.d1.direct.transpose().cast<Complex>() * y;
  out += std::conj(p) * (b.d1.folded.transpose().cast<Complex>() * y);
  return out;
}

Eigen::VectorXcd ModalKktSolver::mode_hessian(const Eigen::VectorXcd& v, Complex p, int m) const {
  const SpectralBlocks& b = *blocks_;
  const Eigen::VectorXcd ikn = (kI * k_) * n_mean_.cast<Complex>();
  Eigen::VectorXcd y1 = radial_derivative(v, p) - ikn.cwiseProduct(v);
  y1 = y1.cwiseProduct(w_radial_.cast<Complex>());
  const Eigen::VectorXd m_over_rho = static_cast<double>(m) * b.inv_rho;
  // angular row: (i m / rho) v; its weighted adjoint contributes (m/rho)^2 w v.
  Eigen::VectorXcd out = radial_derivative_adjoint(y1, p) + ikn.cwiseProduct(y1);
  out += (m_over_rho.cwiseAbs2().cwiseProduct(w_radial_)).cast<Complex>().cwiseProduct(v);
  return out;
}

const ModalKktSolver::Factor& ModalKktSolver::factor_for(int mode_index) const {
  return factors_[factor_of_mode_[mode_index]];
}

Eigen::VectorXcd ModalKktSolver::solve(const Eigen::VectorXcd& rhs) const {
  const Eigen::Index nl = Eigen::Index{m_rho_ - 1} * m_theta_;
  const Eigen::Index nv = Eigen::Index{m_rho_} * m_theta_;
  if (rhs.size() != nl + nv) {
    throw std::invalid_argument("ModalKktSolver::solve: wrong vector length");
  }
  const Eigen::Map<const Eigen::MatrixXcd> g(rhs.data(), m_rho_ - 1, m_theta_);
  const Eigen::Map<const Eigen::MatrixXcd> h(rhs.data() + nl, m_rho_, m_theta_);
  const Eigen::MatrixXcd ubar = u_.conjugate();
  const Eigen::MatrixXcd gh = g * ubar;
  const Eigen::MatrixXcd hh = h * ubar;
  Eigen::MatrixXcd vh(m_rho_, m_theta_);
  Eigen::MatrixXcd lh(m_rho_ - 1, m_theta_);
  const int half = (m_theta_ - 1) / 2;
  Eigen::VectorXcd tmp(m_rho_);
  for (int a = 0; a < m_theta_; ++a) {
    const Factor& f = factor_for(a);
    tmp(0) = 0.0;
    tmp.tail(m_rho_ - 1) = gh.col(a);
    const Eigen::VectorXcd vg = f.lu.solve(tmp);
    const Complex beta = (f.z.dot(hh.col(a)) - f.hz.dot(vg)) / f.zhz;
    const Eigen::VectorXcd v = vg + beta * f.z;
    const Eigen::VectorXcd r = hh.col(a) - mode_hessian(v, p_[a], a - half);
    const Eigen::VectorXcd y = f.lu.adjoint().solve(r);
    vh.col(a) = v;
    lh.col(a) = y.tail(m_rho_ - 1);
  }
  const Eigen::MatrixXcd ut = u_.transpose();
  Eigen::VectorXcd out(nl + nv);
  Eigen::Map<Eigen::MatrixXcd>(out.data(), m_rho_, m_theta_) = vh * ut;
  Eigen::Map<Eigen::MatrixXcd>(out.data() + nv, m_rho_ - 1, m_theta_) = lh * ut;
  return out;
}

Eigen::MatrixXcd ModalKktSolver::solve_closed(const Eigen::MatrixXcd& r) const {
  if (r.rows() != m_rho_ || r.cols() != m_theta_) {
    throw std::invalid_argument("ModalKktSolver::solve_closed: wrong shape");
  }
  const Eigen::MatrixXcd rh = r * u_.conjugate();
  Eigen::MatrixXcd dh(m_rho_, m_theta_);
  for (int a = 0; a < m_theta_; ++a) {
    dh.col(a) = factor_for(a).lu.solve(rh.col(a));
  }
  return dh * u_.transpose();
}

Eigen::VectorXcd ModalKktSolver::mode_null_vector(int m) const {
  const int half = (m_theta_ - 1) / 2;
  if (m < -half || m > half) {
    throw std::out_of_range("ModalKktSolver::mode_null_vector: mode out of range");
  }
  return factor_for(m + half).z;
}

double constraint_norm_estimate(const ConstraintOperator& a, int iterations) {
  const Eigen::Index mr = a.blocks().inv_rho.size();
  const Eigen::Index mt = a.blocks().dtheta.rows();
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd x(mr, mt);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = Complex(nd(rng), nd(rng));
  x /= x.norm();
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::MatrixXcd y = a.adjoint(a.apply(x));
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    sigma = std::sqrt(ny);
    x = y / ny;
  }
  return sigma;
}

SolutionField evaluate_solution(const KktSystem& kkt, Eigen::MatrixXcd v,
                                Eigen::MatrixXcd lambda) {
  const DiscreteSystem& sys = kkt.system();
  SolutionField s;
  s.v = std::move(v);
  s.lambda = std::move(lambda);
  const Eigen::MatrixXcd& phi = sys.source.phi;
  const double nphi = phi.norm();
  const Eigen::MatrixXcd cres = sys.constraint.apply(s.v) - phi;
  s.residual_constraint = nphi > 0.0 ? cres.norm() / nphi : cres.norm();
  const Eigen::MatrixXcd hv = sys.functional.hessian(s.v);
  const Eigen::MatrixXcd stat = hv + sys.constraint.adjoint(s.lambda);
  const double nhv = hv.norm();
  s.residual_stationarity = nhv > 0.0 ? stat.norm() / nhv : stat.norm();
  const double nb = kkt.rhs().norm();
  const double block = std::sqrt(cres.squaredNorm() + stat.squaredNorm());
  s.block_residual = nb > 0.0 ? block / nb : block;
  const double denom = constraint_norm_estimate(sys.constraint) * s.v.norm() + nphi;
  s.constraint_backward_error = denom > 0.0 ? cres.norm() / denom : 0.0;
  s.functional_value = sys.functional.value(s.v);
  return s;
}

namespace {

SolutionField solve_dense(const KktSystem& kkt) {
  const Eigen::MatrixXcd k = kkt.dense();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(k);
  const Eigen::VectorXcd b = kkt.rhs();
  Eigen::VectorXcd x = lu.solve(b);
  x += lu.solve(b - k * x);
  const Eigen::VectorXcd xb = lu.solve(b);
  SolutionField s = evaluate_solution(kkt, kkt.field_part(x), kkt.multiplier_part(x));
  const double ref = xb.norm();
  s.preconditioned_residual = ref > 0.0 ? lu.solve(b - k * x).norm() / ref : 0.0;
  s.iterations = 1;
  return s;
}

}  // namespace

SolutionField solve_kkt(const KktSystem& kkt, const SolveOptions& opts) {
  validate(opts);
  const DiscreteSystem& sys = kkt.system();
  if (sys.source.phi.norm() == 0.0) {
    SolutionField s = evaluate_solution(
        kkt, Eigen::MatrixXcd::Zero(sys.grid.m_rho, sys.grid.m_theta),
        Eigen::MatrixXcd::Zero(sys.grid.m_rho - 1, sys.grid.m_theta));
    s.converged = true;
    return s;
  }
  if (opts.method == SolveMethod::kDense) {
    SolutionField s = solve_dense(kkt);
    s.converged = s.preconditioned_residual <= opts.tolerance;
    if (!s.converged) {
      throw NonConvergence("dense solve did not reach the requested tolerance", std::move(s));
    }
    return s;
  }

  const ModalKktSolver pre(sys);
  const Eigen::VectorXcd b = kkt.rhs();
  GmresOptions go;
  go.tolerance = opts.tolerance;
  go.max_iterations = opts.max_iterations;
  go.restart = opts.restart;
  go.report_every = opts.report_every;
  int used = 0;
  if (opts.progress) {
    go.progress = [&](int it, double res) { opts.progress(used + it, res); };
  }
  const LinearMap a = [&kkt](const Eigen::VectorXcd& x) { return kkt.apply(x); };
  const LinearMap m = [&pre](const Eigen::VectorXcd& x) { return pre.solve(x); };
  const double bnorm = b.norm();

  // GMRES stops on the preconditioned residual. If the unpreconditioned block
  // residual is still above the tolerance, the preconditioned target is
  // tightened and GMRES restarted from the iterate, as long as that helps.
  GmresResult r = gmres(a, m, b, pre.solve(b), go);
  double block = (b - kkt.apply(r.x)).norm() / bnorm;
  used = r.iterations;
  for (int round = 0; round < 3 && r.status == GmresStatus::kConverged && block > opts.tolerance &&
                      used < opts.max_iterations;
       ++round) {
    go.tolerance = std::max(go.tolerance * 0.5 * opts.tolerance / block, 1e-15);
    go.max_iterations = opts.max_iterations - used;
    GmresResult next = gmres(a, m, b, r.x, go);
    used += next.iterations;
    const double next_block = (b - kkt.apply(next.x)).norm() / bnorm;
    if (next.status != GmresStatus::kConverged || next_block >= 0.9 * block) break;
    r = std::move(next);
    block = next_block;
  }
  r.iterations = used;

  SolutionField s = evaluate_solution(kkt, kkt.field_part(r.x), kkt.multiplier_part(r.x));
  s.preconditioned_residual = r.residual;
  s.iterations = r.iterations;
  s.converged = r.status == GmresStatus::kConverged;
  if (r.status == GmresStatus::kMaxIterations) {
    throw NonConvergence("GMRES hit max_iterations=" + std::to_string(opts.max_iterations) +
                             " at relative residual " + std::to_string(r.residual),
                         std::move(s));
  }
  if (r.status == GmresStatus::kStagnated) {
    throw BreakdownDetected("GMRES stagnated at relative residual " + std::to_string(r.residual),
                            std::move(s));
  }
  return s;
}

Eigen::MatrixXcd random_null_direction(const DiscreteSystem& sys, std::uint64_t seed,
                                       double tolerance) {
  const int mr = sys.grid.m_rho;
  const int mt = sys.grid.m_theta;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(mr, mt);
  for (int i = 0; i < mt; ++i) rhs(0, i) = Complex(nd(rng), nd(rng));

  const ModalKktSolver pre(sys);
  const SpectralBlocks& b = *sys.blocks;
  const Eigen::MatrixXcd ikn0 = (kI * sys.k) * sys.medium.n.row(0).cast<Complex>();
  auto closed = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
    const Eigen::Map<const Eigen::MatrixXcd> d(x.data(), mr, mt);
    Eigen::MatrixXcd out(mr, mt);
    out.bottomRows(mr - 1) = sys.constraint.apply(d);
    const Eigen::MatrixXcd ds = d * b.shift.transpose().cast<Complex>();
    out.row(0) = b.d1.direct.row(0).cast<Complex>() * d + b.d1.folded.row(0).cast<Complex>() * ds;
    out.row(0).array() -= ikn0.array() * d.row(0).array();
    return flat(out);
  };
  auto precond = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
    return flat(pre.solve_closed(Eigen::Map<const Eigen::MatrixXcd>(x.data(), mr, mt)));
  };
  GmresOptions go;
  go.tolerance = tolerance;
  go.max_iterations = 300;
  go.restart = 100;
  const Eigen::VectorXcd r0 = flat(rhs);
  const GmresResult res = gmres(closed, precond, r0, precond(r0), go);
  Eigen::MatrixXcd d = Eigen::Map<const Eigen::MatrixXcd>(res.x.data(), mr, mt);
  return d / d.norm();
}

}  // namespace helmopt
