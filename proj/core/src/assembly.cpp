#include "helmopt/assembly.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace helmopt {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::MatrixXcd times_real_right(const Eigen::MatrixXcd& a, const Eigen::MatrixXd& b) {
  return a * b.cast<Complex>();
}

Eigen::MatrixXcd pad_boundary_row(const Eigen::MatrixXcd& interior) {
  Eigen::MatrixXcd out(interior.rows() + 1, interior.cols());
  out.row(0).setZero();
  out.bottomRows(interior.rows()) = interior;
  return out;
}

void require_shape(const Eigen::MatrixXcd& m, Eigen::Index rows, Eigen::Index cols,
                   const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
  }
}

}  // namespace

Eigen::MatrixXcd real_times(const Eigen::MatrixXd& a, const Eigen::MatrixXcd& b) {
  const Eigen::Index c = b.cols();
  Eigen::MatrixXd stacked(b.rows(), 2 * c);
  stacked.leftCols(c) = b.real();
  stacked.rightCols(c) = b.imag();
  const Eigen::MatrixXd prod = a * stacked;
  Eigen::MatrixXcd out(a.rows(), c);
  out.real() = prod.leftCols(c);
  out.imag() = prod.rightCols(c);
  return out;
}

std::shared_ptr<const SpectralBlocks> make_spectral_blocks(const DiskGrid& grid, FoldShift fold) {
  auto b = std::make_shared<SpectralBlocks>();
  const DiffMatrix d1 = diff_rho(grid);
  const DiffMatrix d2{DiffKind::kRhoSecond, d1.values * d1.values};
  b->d1 = split_fold_blocks(d1);
  b->d2 = split_fold_blocks(d2);
  b->dtheta = diff_theta(grid.m_theta).values;
  b->dtheta2 = diff_theta2(grid.m_theta).values;
  b->shift = fold_shift_matrix(grid.m_theta, fold);
  b->inv_rho = grid.rho_pos.cwiseInverse();
  b->inv_rho2 = b->inv_rho.cwiseAbs2();
  b->cos_theta = grid.theta.array().cos().transpose();
  b->sin_theta = grid.theta.array().sin().transpose();
  b->fold = fold;
  return b;
}

MediumField sample_medium(const DiskGrid& grid,
                          const std::function<double(double, double)>& n_squared,
                          std::string label) {
  MediumField m;
  m.label = std::move(label);
  m.n_squared.resize(grid.m_rho, grid.m_theta);
  for (int i = 0; i < grid.m_theta; ++i) {
    const double c = std::cos(grid.theta(i));
    const double s = std::sin(grid.theta(i));
    for (int j = 0; j < grid.m_rho; ++j) {
      const double v = n_squared(grid.rho_pos(j) * c, grid.rho_pos(j) * s);
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("sample_medium: n^2 must be positive and finite at every node");
      }
      m.n_squared(j, i) = v;
    }
  }
  m.n = m.n_squared.array().sqrt();
  return m;
}

SourceVector assemble_source(const DiskGrid& grid,
                             const std::function<Complex(double, double)>& f) {
  SourceVector s;
  s.phi.resize(grid.m_rho - 1, grid.m_theta);
  for (int i = 0; i < grid.m_theta; ++i) {
    const double c = std::cos(grid.theta(i));
    const double sn = std::sin(grid.theta(i));
    for (int j = 1; j < grid.m_rho; ++j) {
      s.phi(j - 1, i) = f(grid.rho_pos(j) * c, grid.rho_pos(j) * sn);
    }
  }
  return s;
}

ConstraintOperator::ConstraintOperator(std::shared_ptr<const SpectralBlocks> blocks,
                                       Eigen::MatrixXd n_squared, double k)
    : blocks_(std::move(blocks)),
      n_squared_(std::move(n_squared)),
      k_(k),
      m_rho_(blocks_->inv_rho.size()),
      m_theta_(blocks_->dtheta.rows()) {
  if (n_squared_.rows() != m_rho_ || n_squared_.cols() != m_theta_) {
    throw std::invalid_argument("ConstraintOperator: medium does not match the grid");
  }
}

Eigen::MatrixXcd ConstraintOperator::apply(const Eigen::MatrixXcd& v) const {
  require_shape(v, m_rho_, m_theta_, "ConstraintOperator::apply");
  const SpectralBlocks& b = *blocks_;
  const Eigen::MatrixXcd vs = times_real_right(v, b.shift.transpose());
  const Eigen::MatrixXcd r2 = real_times(b.d2.direct, v) + real_times(b.d2.folded, vs);
  const Eigen::MatrixXcd r1 = real_times(b.d1.direct, v) + real_times(b.d1.folded, vs);
  Eigen::MatrixXcd full = r2 + b.inv_rho.asDiagonal() * r1;
  full.noalias() += b.inv_rho2.asDiagonal() * times_real_right(v, b.dtheta2.transpose());
  full.array() += (k_ * k_) * n_squared_.array() * v.array();
  return full.bottomRows(m_rho_ - 1);
}

Eigen::MatrixXcd ConstraintOperator::adjoint(const Eigen::MatrixXcd& lambda) const {
  require_shape(lambda, m_rho_ - 1, m_theta_, "ConstraintOperator::adjoint");
  const SpectralBlocks& b = *blocks_;
  const Eigen::MatrixXcd l = pad_boundary_row(lambda);
  const Eigen::MatrixXcd lr = b.inv_rho.asDiagonal() * l;
  Eigen::MatrixXcd direct = real_times(b.d2.direct.transpose(), l) +
                            real_times(b.d1.direct.transpose(), lr);
  const Eigen::MatrixXcd folded = real_times(b.d2.folded.transpose(), l) +
                                  real_times(b.d1.folded.transpose(), lr);
  direct += times_real_right(folded, b.shift);
  direct += b.inv_rho2.asDiagonal() * times_real_right(l, b.dtheta2);
  direct.array() += (k_ * k_) * n_squared_.array() * l.array();
  return direct;
}

Eigen::MatrixXcd ConstraintOperator::dense() const {
  Eigen::MatrixXcd out(rows(), cols());
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(m_rho_, m_theta_);
  for (Eigen::Index c = 0; c < cols(); ++c) {
    e(c % m_rho_, c / m_rho_) = 1.0;
    const Eigen::MatrixXcd col = apply(e);
    out.col(c) = Eigen::Map<const Eigen::VectorXcd>(col.data(), col.size());
    e(c % m_rho_, c / m_rho_) = 0.0;
  }
  return out;
}

FunctionalOperator::FunctionalOperator(std::shared_ptr<const SpectralBlocks> blocks,
                                       Eigen::MatrixXd n, Eigen::MatrixXd weights, double k,
                                       FunctionalForm form)
    : blocks_(std::move(blocks)),
      n_(std::move(n)),
      weights_(std::move(weights)),
      k_(k),
      form_(form) {
  const Eigen::Index mr = blocks_->inv_rho.size();
  const Eigen::Index mt = blocks_->dtheta.rows();
  if (n_.rows() != mr || n_.cols() != mt || weights_.rows() != mr || weights_.cols() != mt) {
    throw std::invalid_argument("FunctionalOperator: medium or weights do not match the grid");
  }
}

FunctionalComponents FunctionalOperator::apply_h(const Eigen::MatrixXcd& v) const {
  const SpectralBlocks& b = *blocks_;
  require_shape(v, n_.rows(), n_.cols(), "FunctionalOperator::apply_h");
  const Eigen::MatrixXcd vs = times_real_right(v, b.shift.transpose());
  FunctionalComponents y;
  y.radial = real_times(b.d1.direct, v) + real_times(b.d1.folded, vs);
  y.angular = b.inv_rho.asDiagonal() * times_real_right(v, b.dtheta.transpose());
  const Eigen::ArrayXXcd ikn = (kI * k_) * n_.array().cast<Complex>();
  if (form_ == FunctionalForm::kPolar) {
    y.radial.array() -= ikn * v.array();
  } else {
    const Eigen::ArrayXXd c = Eigen::VectorXd::Ones(n_.rows()) * b.cos_theta;
    const Eigen::ArrayXXd s = Eigen::VectorXd::Ones(n_.rows()) * b.sin_theta;
    y.radial.array() -= ikn * c.cast<Complex>() * v.array();
    y.angular.array() -= ikn * s.cast<Complex>() * v.array();
  }
  return y;
}

Eigen::MatrixXcd FunctionalOperator::adjoint_h(const FunctionalComponents& y) const {
  const SpectralBlocks& b = *blocks_;
  require_shape(y.radial, n_.rows(), n_.cols(), "FunctionalOperator::adjoint_h");
  require_shape(y.angular, n_.rows(), n_.cols(), "FunctionalOperator::adjoint_h");
  Eigen::MatrixXcd out = real_times(b.d1.direct.transpose(), y.radial);
  out += times_real_right(real_times(b.d1.folded.transpose(), y.radial), b.shift);
  out += times_real_right(b.inv_rho.asDiagonal() * y.angular, b.dtheta);
  const Eigen::ArrayXXcd ikn = (kI * k_) * n_.array().cast<Complex>();
  if (form_ == FunctionalForm::kPolar) {
    out.array() += ikn * y.radial.array();
  } else {
    const Eigen::ArrayXXd c = Eigen::VectorXd::Ones(n_.rows()) * b.cos_theta;
    const Eigen::ArrayXXd s = Eigen::VectorXd::Ones(n_.rows()) * b.sin_theta;
    out.array() += ikn * (c.cast<Complex>() * y.radial.array() + s.cast<Complex>() * y.angular.array());
  }
  return out;
}

Eigen::MatrixXcd FunctionalOperator::hessian(const Eigen::MatrixXcd& v) const {
  FunctionalComponents y = apply_h(v);
  y.radial.array() *= weights_.array().cast<Complex>();
  y.angular.array() *= weights_.array().cast<Complex>();
  return adjoint_h(y);
}

double FunctionalOperator::value(const Eigen::MatrixXcd& v) const {
  const FunctionalComponents y = apply_h(v);
  return 0.5 * (weights_.array() * (y.radial.array().abs2() + y.angular.array().abs2())).sum();
}

Eigen::MatrixXcd FunctionalOperator::dense_h() const {
  const Eigen::Index mr = n_.rows();
  const Eigen::Index mt = n_.cols();
  const Eigen::Index nn = mr * mt;
  Eigen::MatrixXcd out(2 * nn, nn);
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(mr, mt);
  for (Eigen::Index c = 0; c < nn; ++c) {
    e(c % mr, c / mr) = 1.0;
    const FunctionalComponents y = apply_h(e);
    out.col(c).head(nn) = Eigen::Map<const Eigen::VectorXcd>(y.radial.data(), nn);
    out.col(c).tail(nn) = Eigen::Map<const Eigen::VectorXcd>(y.angular.data(), nn);
    e(c % mr, c / mr) = 0.0;
  }
  return out;
}

Eigen::MatrixXcd FunctionalOperator::dense_hessian() const {
  const Eigen::MatrixXcd h = dense_h();
  const Eigen::Index nn = weights_.size();
  Eigen::VectorXd w(2 * nn);
  w << Eigen::Map<const Eigen::VectorXd>(weights_.data(), nn),
      Eigen::Map<const Eigen::VectorXd>(weights_.data(), nn);
  return h.adjoint() * w.asDiagonal() * h;
}

ConstraintOperator assemble_constraint(const DiskGrid& grid, const MediumField& medium, double k,
                                       const AssemblyOptions& opts) {
  return ConstraintOperator(make_spectral_blocks(grid, opts.fold), medium.n_squared, k);
}

FunctionalOperator assemble_functional(const DiskGrid& grid, const MediumField& medium, double k,
                                       const AssemblyOptions& opts) {
  return FunctionalOperator(make_spectral_blocks(grid, opts.fold), medium.n,
                            quadrature_weights(grid), k, opts.form);
}

DiscreteSystem make_discrete_system(const DiskGrid& grid, MediumField medium, double k,
                                    SourceVector source, const AssemblyOptions& opts) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("make_discrete_system: k must be positive");
  }
  require_shape(source.phi, grid.m_rho - 1, grid.m_theta, "make_discrete_system: source");
  auto blocks = make_spectral_blocks(grid, opts.fold);
  ConstraintOperator a(blocks, medium.n_squared, k);
  FunctionalOperator h(blocks, medium.n, quadrature_weights(grid), k, opts.form);
  return DiscreteSystem{grid,         std::move(medium), k, opts, blocks, std::move(a),
                        std::move(h), std::move(source)};
}

KktSystem::KktSystem(DiscreteSystem sys) : sys_(std::move(sys)) {}

Eigen::MatrixXcd KktSystem::field_part(const Eigen::VectorXcd& x) const {
  return Eigen::Map<const Eigen::MatrixXcd>(x.data(), sys_.grid.m_rho, sys_.grid.m_theta);
}

Eigen::MatrixXcd KktSystem::multiplier_part(const Eigen::VectorXcd& x) const {
  return Eigen::Map<const Eigen::MatrixXcd>(x.data() + num_v(), sys_.grid.m_rho - 1,
                                            sys_.grid.m_theta);
}

Eigen::VectorXcd KktSystem::join(const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& lambda) const {
  Eigen::VectorXcd x(size());
  x.head(num_v()) = Eigen::Map<const Eigen::VectorXcd>(v.data(), v.size());
  x.tail(num_lambda()) = Eigen::Map<const Eigen::VectorXcd>(lambda.data(), lambda.size());
  return x;
}

Eigen::VectorXcd KktSystem::apply(const Eigen::VectorXcd& x) const {
  if (x.size() != size()) {
    throw std::invalid_argument("KktSystem::apply: wrong vector length");
  }
  const Eigen::MatrixXcd v = field_part(x);
  const Eigen::MatrixXcd lambda = multiplier_part(x);
  const Eigen::MatrixXcd top = sys_.constraint.apply(v);
  const Eigen::MatrixXcd bottom = sys_.functional.hessian(v) + sys_.constraint.adjoint(lambda);
  Eigen::VectorXcd y(size());
  y.head(num_lambda()) = Eigen::Map<const Eigen::VectorXcd>(top.data(), top.size());
  y.tail(num_v()) = Eigen::Map<const Eigen::VectorXcd>(bottom.data(), bottom.size());
  return y;
}

Eigen::VectorXcd KktSystem::rhs() const {
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(size());
  b.head(num_lambda()) = Eigen::Map<const Eigen::VectorXcd>(sys_.source.phi.data(), num_lambda());
  return b;
}

Eigen::MatrixXcd KktSystem::dense() const {
  const Eigen::Index nv = num_v();
  const Eigen::Index nl = num_lambda();
  const Eigen::MatrixXcd a = sys_.constraint.dense();
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(size(), size());
  k.topLeftCorner(nl, nv) = a;
  k.bottomLeftCorner(nv, nv) = sys_.functional.dense_hessian();
  k.bottomRightCorner(nv, nl) = a.adjoint();
  return k;
}

KktSystem assemble_kkt(DiscreteSystem sys) { return KktSystem(std::move(sys)); }

}  // namespace helmopt
