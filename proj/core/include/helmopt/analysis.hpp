#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "helmopt/grid.hpp"
#include "helmopt/problems.hpp"

namespace helmopt {

/// Value and Cartesian gradient of a complex field at a point.
struct FieldSample {
  std::complex<double> value;
  std::complex<double> dx;
  std::complex<double> dy;
};

/// Fourier-Chebyshev expansion u(rho, theta) = sum_m sum_h a(h, m) e^{i m theta} T_h(rho/R)
/// on rho in [-R, R]. Column a of `modes` holds m = a - (M_theta - 1)/2.
struct SpectralCoefficients {
  double radius = 0.0;
  int m_theta = 0;
  Eigen::MatrixXcd modes;        // (2 M_rho) x M_theta
  Eigen::MatrixXcd derivative;   // Chebyshev coefficients of d/d rho

  int mode_of_column(int a) const { return a - (m_theta - 1) / 2; }
};

/// Transforms nodal values on the positive half-grid. The negative half is
/// filled in with the exact half-period shift.
SpectralCoefficients to_spectral(const Eigen::MatrixXcd& v, const DiskGrid& grid);

/// Throws std::domain_error for points outside the closed disk.
std::complex<double> evaluate_at(const SpectralCoefficients& c, double rho, double theta);
FieldSample evaluate_sample(const SpectralCoefficients& c, Point x);
std::vector<std::complex<double>> evaluate_at(const SpectralCoefficients& c,
                                              const std::vector<std::pair<double, double>>& points);

class UnsupportedMedium : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Outgoing solution of Laplace(u) + k^2 n^2 u = f in the plane for constant n
/// and a Gaussian-sum source, u = -(i/4) int H0(k n |x - y|) f(y) dy.
///
/// Each Gaussian is radial about its centre, so u is a sum of shifted radial
/// profiles U(r) = -(i pi/2) [H0(kr) int_0^r J0(ks) g(s) s ds + J0(kr) int_r^inf H0(ks) g(s) s ds].
class ExactSolution {
 public:
  /// Throws UnsupportedMedium unless `n` is a ConstantIndex.
  ExactSolution(GaussianSum source, double k, const RefractionKind& n = ConstantIndex{});

  FieldSample at(Point x) const;
  /// Batch evaluation; radial integrals are accumulated over sorted radii.
  std::vector<FieldSample> evaluate(const std::vector<Point>& points) const;

  /// Radial profile for a unit Gaussian: (U(r), U'(r)).
  std::pair<std::complex<double>, std::complex<double>> radial(double r) const;

 private:
  std::vector<std::pair<std::complex<double>, std::complex<double>>> radial_batch(
      std::vector<double> radii) const;

  GaussianSum source_;
  double k_;
  double support_;
};

/// Convenience wrapper; throws UnsupportedMedium for non-constant media and
/// std::invalid_argument for non-Gaussian sources.
std::vector<FieldSample> exact_solution_constant_n(const ProblemSpec& p,
                                                   const std::vector<Point>& points);

/// Independent route: 2-D convolution in polar coordinates centred at x, with
/// the logarithmic singularity isolated in the disk |y - x| <= min(0.1, 0.5/k).
FieldSample hankel_convolution_2d(const GaussianSum& f, double k, Point x, double tolerance = 1e-10);

struct ErrorReport {
  double l2_abs = 0.0;
  double l2_rel = 0.0;
  double h1_abs = 0.0;
  double h1_rel = 0.0;
  double linf_abs = 0.0;
  /// False when the reference vanishes; the relative norms are NaN then.
  bool relative_defined = true;
  double comparison_radius = 0.0;
  int comparison_m_theta = 0;
  int comparison_m_rho = 0;
};

using ReferenceField = std::function<std::vector<FieldSample>(const std::vector<Point>&)>;

/// Error of the expansion against a reference on B_rho, integrated with the
/// area rule of a (m_theta, m_rho) disk grid of radius rho. L_inf is the nodal
/// maximum over that grid. Throws std::invalid_argument unless 0 < rho <= R.
ErrorReport error_norms(const SpectralCoefficients& v, const ReferenceField& reference, double rho,
                        int m_theta = 21, int m_rho = 100);

/// Reference given by another expansion (self-convergence).
ReferenceField as_reference(const SpectralCoefficients& c);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;  // log(error) = intercept + slope * log(param)
  double rms_residual = 0.0;
  double r_squared = 1.0;
};

/// Least-squares line through (log param, log error). Needs >= 3 samples;
/// throws std::invalid_argument for nonpositive values.
RateFit fit_rate(const std::vector<std::pair<double, double>>& samples);

/// Values of an expansion on the circle of radius rho at M equispaced angles 2 pi i / M, i = 1..M.
Eigen::VectorXcd boundary_trace(const SpectralCoefficients& c, double rho, int m_theta);

}  // namespace helmopt
