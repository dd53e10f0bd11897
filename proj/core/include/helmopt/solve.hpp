#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "helmopt/assembly.hpp"

namespace helmopt {

enum class SolveMethod {
  /// Preconditioned GMRES on the block operator; the preconditioner is the
  /// exact Fourier-mode solve for the angularly averaged medium.
  kIterative,
  /// Dense LU of the assembled block matrix. Small systems only.
  kDense,
};

struct SolveOptions {
  double tolerance = 1e-10;
  int max_iterations = 400;
  int restart = 100;
  int report_every = 0;
  std::function<void(int, double)> progress;
  SolveMethod method = SolveMethod::kIterative;
};

/// Throws std::invalid_argument unless 0 < tolerance < 1 and max_iterations >= 1.
void validate(const SolveOptions& opts);

struct SolutionField {
  Eigen::MatrixXcd v;       // M_rho x M_theta
  Eigen::MatrixXcd lambda;  // (M_rho - 1) x M_theta
  /// ||A v - phi|| / ||phi||
  double residual_constraint = 0.0;
  /// ||H v + A^H lambda|| / ||H v||
  double residual_stationarity = 0.0;
  /// Convergence measure: ||M^{-1}(b - K x)|| / ||M^{-1} b||.
  double preconditioned_residual = 0.0;
  /// ||b - K x|| / ||b||
  double block_residual = 0.0;
  /// ||A v - phi|| / (||A||_2 ||v|| + ||phi||)
  double constraint_backward_error = 0.0;
  int iterations = 0;
  double functional_value = 0.0;
  bool converged = false;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, SolutionField best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const SolutionField& best() const { return best_; }

 private:
  SolutionField best_;
};

class BreakdownDetected : public std::runtime_error {
 public:
  BreakdownDetected(const std::string& what, SolutionField best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const SolutionField& best() const { return best_; }

 private:
  SolutionField best_;
};

/// Exact solver for the block system of an angularly uniform medium.
///
/// For n = n(rho) every operator commutes with the discrete Fourier transform
/// in theta, so the system splits into M_theta radial problems. Each radial
/// problem is solved by a null-space method: an impedance row closes the
/// radial constraint into a square matrix S whose LU is cached per distinct
/// (fold eigenvalue, m^2) pair. For a general medium the angular means of n
/// and n^2 are used, which makes the solver a preconditioner.
class ModalKktSolver {
 public:
  explicit ModalKktSolver(const DiscreteSystem& sys);

  /// Solves [[A, 0], [H, A^H]] [v; lambda] = [g; h] for the averaged medium.
  /// Input layout matches KktSystem::apply output, output layout matches its input.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;

  /// Solves the closed square system [B; A] d = r for the averaged medium,
  /// where B d = (d_rho d - i k n d) at rho = R. `r` is M_rho x M_theta with
  /// row 0 holding the boundary data.
  Eigen::MatrixXcd solve_closed(const Eigen::MatrixXcd& r) const;

  /// Unit boundary-flux null vector of the radial constraint for mode m.
  Eigen::VectorXcd mode_null_vector(int m) const;

  int num_factorizations() const { return static_cast<int>(factors_.size()); }

 private:
  struct Factor {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
    Eigen::VectorXcd z;
    Eigen::VectorXcd hz;
    double zhz = 0.0;
  };
  using Key = std::pair<std::pair<double, double>, int>;

  Eigen::VectorXcd radial_derivative(const Eigen::VectorXcd& v, Complex p) const;
  Eigen::VectorXcd radial_derivative_adjoint(const Eigen::VectorXcd& y, Complex p) const;
  Eigen::VectorXcd mode_hessian(const Eigen::VectorXcd& v, Complex p, int m) const;
  const Factor& factor_for(int mode_index) const;

  std::shared_ptr<const SpectralBlocks> blocks_;
  int m_rho_;
  int m_theta_;
  double k_;
  Eigen::VectorXd n_mean_;
  Eigen::VectorXd n2_mean_;
  Eigen::VectorXd w_radial_;
  Eigen::MatrixXcd u_;  // U(i, a) = e^{i m theta_i} / sqrt(M), m = a - (M-1)/2
  std::vector<Complex> p_;
  std::vector<int> factor_of_mode_;
  std::vector<Factor> factors_;
};

SolutionField solve_kkt(const KktSystem& kkt, const SolveOptions& opts = {});

/// Residual diagnostics for a candidate (v, lambda).
SolutionField evaluate_solution(const KktSystem& kkt, Eigen::MatrixXcd v, Eigen::MatrixXcd lambda);

/// Power-iteration estimate of ||A||_2 for the constraint operator.
double constraint_norm_estimate(const ConstraintOperator& a, int iterations = 30);

/// A random direction d with A d = 0 (||d|| = 1), found by solving the
/// impedance-closed square system with random boundary data. Deterministic in `seed`.
Eigen::MatrixXcd random_null_direction(const DiscreteSystem& sys, std::uint64_t seed,
                                       double tolerance = 1e-12);

}  // namespace helmopt
