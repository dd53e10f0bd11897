#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace helmopt {

/// Collocation mesh on the disk B_R.
///
/// Angles are theta_i = 2*pi*(i+1)/M_theta for i = 0..M_theta-1 (so the last
/// angle is 2*pi). Radial nodes are the Gauss-Lobatto points of [-R, R],
/// rho_j = R cos(j*pi/(2*M_rho-1)); only the positive half j < M_rho carries
/// unknowns, the negative half is reached through the fold symmetry
/// u(rho, theta) = u(-rho, theta + pi).
///
/// Nodal fields are stored as M_rho x M_theta column-major matrices, so the
/// flat index of node (j, i) is j + M_rho * i.
struct DiskGrid {
  double radius = 0.0;
  int m_theta = 0;
  int m_rho = 0;
  Eigen::VectorXd theta;
  Eigen::VectorXd rho_full;
  Eigen::VectorXd rho_pos;

  /// Polynomial degree of the full radial grid, 2*M_rho - 1.
  int cheb_degree() const { return 2 * m_rho - 1; }
  Eigen::Index num_nodes() const { return Eigen::Index{m_rho} * m_theta; }
  Eigen::Index num_interior() const { return Eigen::Index{m_rho - 1} * m_theta; }
};

/// Throws std::invalid_argument for even or small M_theta, M_rho < 4, or R <= 0.
DiskGrid build_disk_grid(double radius, int m_theta, int m_rho);

enum class DiffKind { kRhoFirst, kRhoSecond, kThetaFirst, kThetaSecond };

struct DiffMatrix {
  DiffKind kind;
  Eigen::MatrixXd values;
};

DiffMatrix diff_theta(int m_theta);
DiffMatrix diff_theta2(int m_theta);
/// Full (2 M_rho) x (2 M_rho) Chebyshev differentiation matrices on rho_full.
DiffMatrix diff_rho(const DiskGrid& grid);
DiffMatrix diff_rho2(const DiskGrid& grid);

/// Restriction of a full radial matrix to the rows of the positive half.
/// `direct` couples rho_j to rho_l (both positive); `folded` couples rho_j to
/// -rho_l, with column l ordered like rho_pos, and is meant to act on the
/// half-period-shifted field.
struct FoldedBlocks {
  Eigen::MatrixXd direct;
  Eigen::MatrixXd folded;
};

FoldedBlocks split_fold_blocks(const DiffMatrix& d);

/// How the angle theta + pi is realised on the discrete angular grid.
enum class FoldShift {
  /// Trigonometric interpolation: exact half-period shift of the band-limited
  /// field. Eigenvalue (-1)^m on e^{i m theta}.
  kSpectral,
  /// Index rotation by (M_theta - 1)/2, i.e. a shift by pi - pi/M_theta.
  kIndexSwap,
};

/// Matrix P with (P v)_i = v(theta_i + pi) for angular samples v. Real.
Eigen::MatrixXd fold_shift_matrix(int m_theta, FoldShift kind);

/// Eigenvalue of fold_shift_matrix on the Fourier mode e^{i m theta}.
std::complex<double> fold_shift_eigenvalue(int m_theta, int m, FoldShift kind);

/// Weights for int_0^R g(rho) omega(rho) d rho on the positive radial nodes,
/// exact for even polynomials g of degree < 2*M_rho. `omega` is evaluated on
/// [0, R] and treated as an even function.
Eigen::VectorXd radial_product_weights(const DiskGrid& grid,
                                       const std::function<double(double)>& omega);

/// Nodal weights (M_rho x M_theta) for int_0^{2pi} int_0^R g rho/(1+rho) d rho d theta.
Eigen::MatrixXd quadrature_weights(const DiskGrid& grid);

/// Nodal weights (M_rho x M_theta) for the area integral int_{B_R} g dx.
Eigen::MatrixXd area_weights(const DiskGrid& grid);

}  // namespace helmopt
