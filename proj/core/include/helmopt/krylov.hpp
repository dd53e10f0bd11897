#pragma once

#include <functional>

#include <Eigen/Dense>

namespace helmopt {

using LinearMap = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

struct GmresOptions {
  double tolerance = 1e-10;
  int max_iterations = 500;
  int restart = 100;
  int report_every = 0;
  std::function<void(int, double)> progress;
};

enum class GmresStatus { kConverged, kMaxIterations, kStagnated };

struct GmresResult {
  Eigen::VectorXcd x;
  int iterations = 0;
  /// ||M^{-1}(b - A x)|| / ||M^{-1} b||, recomputed from the returned x.
  double residual = 0.0;
  GmresStatus status = GmresStatus::kConverged;
};

/// Left-preconditioned restarted GMRES with modified Gram-Schmidt (one
/// reorthogonalisation pass) and Givens rotations. Minimises the
/// preconditioned residual over each Krylov space. Deterministic.
GmresResult gmres(const LinearMap& a, const LinearMap& precond, const Eigen::VectorXcd& b,
                  const Eigen::VectorXcd& x0, const GmresOptions& opts);

}  // namespace helmopt
