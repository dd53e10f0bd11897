#include "helmopt/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

namespace helmopt {

namespace {

constexpr double kPi = std::numbers::pi;

// cos(pi * num / den) with exact integer range reduction.
double cos_pi_ratio(long long num, long long den) {
  long long r = num % (2 * den);
  if (r < 0) r += 2 * den;
  // cos(pi r/den) = sin(pi (den - 2r) / (2 den)) keeps full relative accuracy near zeros.
  return std::sin(kPi * static_cast<double>(den - 2 * r) / static_cast<double>(2 * den));
}

}  // namespace

DiskGrid build_disk_grid(double radius, int m_theta, int m_rho) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("build_disk_grid: radius must be positive and finite");
  }
  if (m_theta < 3 || m_theta % 2 == 0) {
    throw std::invalid_argument("build_disk_grid: M_theta must be odd and >= 3, got " +
                                std::to_string(m_theta));
  }
  if (m_rho < 4) {
    throw std::invalid_argument("build_disk_grid: M_rho must be >= 4, got " +
                                std::to_string(m_rho));
  }
  DiskGrid g;
  g.radius = radius;
  g.m_theta = m_theta;
  g.m_rho = m_rho;
  g.theta.resize(m_theta);
  for (int i = 0; i < m_theta; ++i) {
    g.theta(i) = 2.0 * kPi * static_cast<double>(i + 1) / m_theta;
  }
  const int n = g.cheb_degree();
  g.rho_full.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    g.rho_full(j) = radius * cos_pi_ratio(j, n);
  }
  g.rho_pos = g.rho_full.head(m_rho);
  return g;
}

DiffMatrix diff_theta(int m_theta) {
  if (m_theta < 3 || m_theta % 2 == 0) {
    throw std::invalid_argument("diff_theta: M_theta must be odd and >= 3");
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m_theta, m_theta);
  for (int p = 0; p < m_theta; ++p) {
    for (int q = 0; q < m_theta; ++q) {
      if (p == q) continue;
      const double half = kPi * static_cast<double>(p - q) / m_theta;
      const double sign = ((p + q) % 2 == 0) ? 1.0 : -1.0;
      d(p, q) = sign / (2.0 * std::sin(half));
    }
  }
  return {DiffKind::kThetaFirst, std::move(d)};
}

DiffMatrix diff_theta2(int m_theta) {
  if (m_theta < 3 || m_theta % 2 == 0) {
    throw std::invalid_argument("diff_theta2: M_theta must be odd and >= 3");
  }
  Eigen::MatrixXd d(m_theta, m_theta);
  const double diag = -(static_cast<double>(m_theta) * m_theta - 1.0) / 12.0;
  for (int p = 0; p < m_theta; ++p) {
    for (int q = 0; q < m_theta; ++q) {
      if (p == q) {
        d(p, q) = diag;
        continue;
      }
      const double half = kPi * static_cast<double>(p - q) / m_theta;
      const double sign = ((p + q) % 2 == 0) ? -1.0 : 1.0;
      const double s = std::sin(half);
      d(p, q) = sign * std::cos(half) / (2.0 * s * s);
    }
  }
  return {DiffKind::kThetaSecond, std::move(d)};
}

DiffMatrix diff_rho(const DiskGrid& grid) {
  const int n = grid.cheb_degree();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int l = 0; l <= n; ++l) {
    const double cl = (l == 0 || l == n) ? 2.0 : 1.0;
    for (int m = 0; m <= n; ++m) {
      if (l == m) continue;
      const double cm = (m == 0 || m == n) ? 2.0 : 1.0;
      const double sign = ((l + m) % 2 == 0) ? 1.0 : -1.0;
      // rho_l - rho_m = 2R sin((l+m) pi/2N) sin((m-l) pi/2N), free of cancellation.
      const double diff = 2.0 * grid.radius * std::sin(kPi * (l + m) / (2.0 * n)) *
                          std::sin(kPi * (m - l) / (2.0 * n));
      d(l, m) = cl * sign / (cm * diff);
    }
    double s = 0.0;
    for (int m = 0; m <= n; ++m) {
      if (m != l) s += d(l, m);
    }
    d(l, l) = -s;
  }
  return {DiffKind::kRhoFirst, std::move(d)};
}

DiffMatrix diff_rho2(const DiskGrid& grid) {
  const DiffMatrix d = diff_rho(grid);
  return {DiffKind::kRhoSecond, d.values * d.values};
}

FoldedBlocks split_fold_blocks(const DiffMatrix& d) {
  const Eigen::Index rows = d.values.rows();
  if (rows != d.values.cols() || rows % 2 != 0 || rows == 0) {
    throw std::invalid_argument("split_fold_blocks: expected a square matrix of even order");
  }
  if (d.kind != DiffKind::kRhoFirst && d.kind != DiffKind::kRhoSecond) {
    throw std::invalid_argument("split_fold_blocks: expected a radial matrix");
  }
  const Eigen::Index m = rows / 2;
  FoldedBlocks b;
  b.direct = d.values.topLeftCorner(m, m);
  b.folded = d.values.topRightCorner(m, m).rowwise().reverse();
  return b;
}

Eigen::MatrixXd fold_shift_matrix(int m_theta, FoldShift kind) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m_theta, m_theta);
  const int half = (m_theta - 1) / 2;
  if (kind == FoldShift::kIndexSwap) {
    for (int i = 0; i < m_theta; ++i) {
      p(i, (i + half) % m_theta) = 1.0;
    }
    return p;
  }
  // (1/M) sum_{|m|<=half} (-1)^m e^{i m (theta_i - theta_q)}, evaluated as a cosine sum.
  for (int i = 0; i < m_theta; ++i) {
    for (int q = 0; q < m_theta; ++q) {
      double s = 1.0;
      for (int m = 1; m <= half; ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        s += 2.0 * sign * cos_pi_ratio(2LL * m * (i - q), m_theta);
      }
      p(i, q) = s / m_theta;
    }
  }
  return p;
}

std::complex<double> fold_shift_eigenvalue(int m_theta, int m, FoldShift kind) {
  if (kind == FoldShift::kSpectral) {
    return (m % 2 == 0) ? 1.0 : -1.0;
  }
  const long long shift = (m_theta - 1) / 2;
  const long long num = 2LL * m * shift;
  return {cos_pi_ratio(num, m_theta), cos_pi_ratio(2 * num - m_theta, 2LL * m_theta)};
}

Eigen::VectorXd radial_product_weights(const DiskGrid& grid,
                                       const std::function<double(double)>& omega) {
  const int n = grid.cheb_degree();
  const double r = grid.radius;
  using Gauss = boost::math::quadrature::gauss<double, 20>;
  const auto& absc = Gauss::abscissa();
  const auto& gw = Gauss::weights();

  // Moments mu_k = int_{-1}^{1} T_k(x) omega(R|x|) R dx, with x = cos t; odd
  // moments vanish by symmetry. Composite Gauss panels on t in [0, pi/2].
  const int panels = n / 2 + 16;
  const double h = 0.5 * kPi / panels;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(n + 1);
  auto accumulate = [&](double t, double w) {
    const double c = std::cos(t);
    const double f = 2.0 * w * omega(r * c) * r * std::sin(t);
    double tkm1 = 1.0;
    double tk = c;
    mu(0) += f;
    for (int k = 1; k <= n; ++k) {
      if (k % 2 == 0) mu(k) += f * tk;
      const double next = 2.0 * c * tk - tkm1;
      tkm1 = tk;
      tk = next;
    }
  };
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (std::size_t q = 0; q < absc.size(); ++q) {
      const double w = 0.5 * h * gw[q];
      if (absc[q] == 0.0) {
        accumulate(mid, w);
      } else {
        accumulate(mid + 0.5 * h * absc[q], w);
        accumulate(mid - 0.5 * h * absc[q], w);
      }
    }
  }

  Eigen::VectorXd w(grid.m_rho);
  for (int j = 0; j < grid.m_rho; ++j) {
    const double cj = (j == 0 || j == n) ? 2.0 : 1.0;
    double s = 0.0;
    for (int k = 0; k <= n; k += 2) {
      const double ck = (k == 0 || k == n) ? 2.0 : 1.0;
      s += mu(k) * cos_pi_ratio(static_cast<long long>(k) * j, n) / ck;
    }
    w(j) = 2.0 * s / (n * cj);
  }
  return w;
}

Eigen::MatrixXd quadrature_weights(const DiskGrid& grid) {
  const Eigen::VectorXd w =
      radial_product_weights(grid, [](double rho) { return rho / (1.0 + rho); });
  return w * Eigen::RowVectorXd::Constant(grid.m_theta, 2.0 * kPi / grid.m_theta);
}

Eigen::MatrixXd area_weights(const DiskGrid& grid) {
  const Eigen::VectorXd w = radial_product_weights(grid, [](double rho) { return rho; });
  return w * Eigen::RowVectorXd::Constant(grid.m_theta, 2.0 * kPi / grid.m_theta);
}

}  // namespace helmopt
