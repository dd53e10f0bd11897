#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "helmopt/grid.hpp"

namespace helmopt {

using Complex = std::complex<double>;

/// Which discretisation of the radiation functional to assemble.
enum class FunctionalForm {
  /// Polar components (u_rho - i k n u, u_theta / rho). Equal pointwise to the
  /// Cartesian integrand |grad u - i k n u x/|x||^2.
  kPolar,
  /// Block form with -ik n cos(theta) u and -ik n sin(theta) u attached to the
  /// radial and angular rows, without the rotation that mixes them.
  kLiteral,
};

struct AssemblyOptions {
  FoldShift fold = FoldShift::kSpectral;
  FunctionalForm form = FunctionalForm::kPolar;
};

/// Dense building blocks shared by every operator on one grid.
struct SpectralBlocks {
  FoldedBlocks d1;
  FoldedBlocks d2;
  Eigen::MatrixXd dtheta;
  Eigen::MatrixXd dtheta2;
  Eigen::MatrixXd shift;  // fold_shift_matrix
  Eigen::VectorXd inv_rho;
  Eigen::VectorXd inv_rho2;
  Eigen::RowVectorXd cos_theta;
  Eigen::RowVectorXd sin_theta;
  FoldShift fold = FoldShift::kSpectral;
};

std::shared_ptr<const SpectralBlocks> make_spectral_blocks(const DiskGrid& grid, FoldShift fold);

/// Refraction index sampled at the positive-radius nodes (M_rho x M_theta).
struct MediumField {
  Eigen::MatrixXd n;
  Eigen::MatrixXd n_squared;
  std::string label;
};

/// Samples n^2(x, y) at the nodes. Throws std::invalid_argument if n^2 <= 0 anywhere.
MediumField sample_medium(const DiskGrid& grid, const std::function<double(double, double)>& n_squared,
                          std::string label = {});

/// Right-hand side at interior nodes, (M_rho - 1) x M_theta; row r is rho_{r+1}.
struct SourceVector {
  Eigen::MatrixXcd phi;
};

SourceVector assemble_source(const DiskGrid& grid,
                             const std::function<Complex(double, double)>& f);

/// Discrete Helmholtz operator restricted to interior rows,
/// V (M_rho x M_theta) -> (M_rho - 1) x M_theta.
class ConstraintOperator {
 public:
  ConstraintOperator(std::shared_ptr<const SpectralBlocks> blocks, Eigen::MatrixXd n_squared,
                     double k);

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& v) const;
  Eigen::MatrixXcd adjoint(const Eigen::MatrixXcd& lambda) const;
  /// Explicit matrix in flat node ordering. Intended for small grids.
  Eigen::MatrixXcd dense() const;

  Eigen::Index rows() const { return (m_rho_ - 1) * m_theta_; }
  Eigen::Index cols() const { return m_rho_ * m_theta_; }
  double k() const { return k_; }
  const SpectralBlocks& blocks() const { return *blocks_; }
  const Eigen::MatrixXd& n_squared() const { return n_squared_; }

 private:
  std::shared_ptr<const SpectralBlocks> blocks_;
  Eigen::MatrixXd n_squared_;
  double k_;
  Eigen::Index m_rho_;
  Eigen::Index m_theta_;
};

/// The two rows of H applied to a field.
struct FunctionalComponents {
  Eigen::MatrixXcd radial;
  Eigen::MatrixXcd angular;
};

/// Quadratic radiation functional J[v] = 1/2 v^H H^H W H v.
class FunctionalOperator {
 public:
  FunctionalOperator(std::shared_ptr<const SpectralBlocks> blocks, Eigen::MatrixXd n,
                     Eigen::MatrixXd weights, double k, FunctionalForm form);

  FunctionalComponents apply_h(const Eigen::MatrixXcd& v) const;
  Eigen::MatrixXcd adjoint_h(const FunctionalComponents& y) const;
  /// H^H W H v without forming the matrix.
  Eigen::MatrixXcd hessian(const Eigen::MatrixXcd& v) const;
  double value(const Eigen::MatrixXcd& v) const;

  /// Explicit H (2N x N) in flat ordering, radial block first. Small grids only.
  Eigen::MatrixXcd dense_h() const;
  Eigen::MatrixXcd dense_hessian() const;

  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::MatrixXd& n() const { return n_; }
  FunctionalForm form() const { return form_; }
  double k() const { return k_; }

 private:
  std::shared_ptr<const SpectralBlocks> blocks_;
  Eigen::MatrixXd n_;
  Eigen::MatrixXd weights_;
  double k_;
  FunctionalForm form_;
};

ConstraintOperator assemble_constraint(const DiskGrid& grid, const MediumField& medium, double k,
                                       const AssemblyOptions& opts = {});
FunctionalOperator assemble_functional(const DiskGrid& grid, const MediumField& medium, double k,
                                       const AssemblyOptions& opts = {});

struct DiscreteSystem {
  DiskGrid grid;
  MediumField medium;
  double k = 0.0;
  AssemblyOptions options;
  std::shared_ptr<const SpectralBlocks> blocks;
  ConstraintOperator constraint;
  FunctionalOperator functional;
  SourceVector source;
};

/// Throws std::invalid_argument on k <= 0 or on shape mismatches.
DiscreteSystem make_discrete_system(const DiskGrid& grid, MediumField medium, double k,
                                    SourceVector source, const AssemblyOptions& opts = {});

/// Saddle-point system [[A, 0], [H^H W H, A^H]] [v; lambda] = [phi; 0].
/// Flat vectors hold vec(V) (column-major) followed by vec(Lambda).
class KktSystem {
 public:
  explicit KktSystem(DiscreteSystem sys);

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::VectorXcd rhs() const;
  Eigen::MatrixXcd dense() const;

  Eigen::Index size() const { return num_v() + num_lambda(); }
  Eigen::Index num_v() const { return sys_.grid.num_nodes(); }
  Eigen::Index num_lambda() const { return sys_.grid.num_interior(); }

  Eigen::MatrixXcd field_part(const Eigen::VectorXcd& x) const;
  Eigen::MatrixXcd multiplier_part(const Eigen::VectorXcd& x) const;
  Eigen::VectorXcd join(const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& lambda) const;

  const DiscreteSystem& system() const { return sys_; }

 private:
  DiscreteSystem sys_;
};

KktSystem assemble_kkt(DiscreteSystem sys);

/// Product of a real matrix with a complex one via a single real GEMM.
Eigen::MatrixXcd real_times(const Eigen::MatrixXd& a, const Eigen::MatrixXcd& b);

}  // namespace helmopt
