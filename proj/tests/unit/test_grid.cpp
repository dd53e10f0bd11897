#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "helmopt/grid.hpp"
#include "oracles.hpp"

using namespace helmopt;
using oracle::kPi;

namespace {

Eigen::VectorXd sample(const Eigen::VectorXd& x, double (*f)(double)) {
  return x.unaryExpr([f](double t) { return f(t); });
}

}  // namespace

TEST(Grid, RejectsBadParameters) {
  EXPECT_THROW(build_disk_grid(4.0, 20, 100), std::invalid_argument);
  EXPECT_THROW(build_disk_grid(4.0, 1, 100), std::invalid_argument);
  EXPECT_THROW(build_disk_grid(0.0, 21, 100), std::invalid_argument);
  EXPECT_THROW(build_disk_grid(-1.0, 21, 100), std::invalid_argument);
  EXPECT_THROW(build_disk_grid(4.0, 21, 3), std::invalid_argument);
}

TEST(Grid, NodeSets) {
  const DiskGrid g = build_disk_grid(4.0, 21, 100);
  EXPECT_EQ(g.rho_pos(0), 4.0);
  EXPECT_NEAR(g.theta(20), 2.0 * kPi, 1e-15);
  EXPECT_EQ(g.rho_full(199), -4.0);
  EXPECT_EQ(g.num_nodes(), 2100);
  EXPECT_EQ(g.num_interior(), 99 * 21);
  for (int j = 1; j < g.m_rho; ++j) {
    EXPECT_LT(g.rho_pos(j), g.rho_pos(j - 1));
    EXPECT_GT(g.rho_pos(j), 0.0);
  }

  const DiskGrid s = build_disk_grid(1.0, 5, 4);
  ASSERT_EQ(s.rho_full.size(), 8);
  for (int j = 0; j < 8; ++j) {
    EXPECT_NEAR(s.rho_full(j), std::cos(j * kPi / 7.0), 1e-15);
    EXPECT_NE(s.rho_full(j), 0.0);
  }
}

TEST(Grid, FourierMatricesMatchInterpolationOracle) {
  for (int m : {3, 11, 21}) {
    EXPECT_LT((diff_theta(m).values - oracle::fourier(m, 1)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((diff_theta2(m).values - oracle::fourier(m, 2)).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(Grid, FourierDifferentiation) {
  const int m = 21;
  const DiskGrid g = build_disk_grid(1.0, m, 4);
  const DiffMatrix d = diff_theta(m);
  const DiffMatrix d2 = diff_theta2(m);
  EXPECT_EQ(d.kind, DiffKind::kThetaFirst);
  EXPECT_EQ(d2.kind, DiffKind::kThetaSecond);
  EXPECT_LT((d.values * Eigen::VectorXd::Ones(m)).norm(), 1e-13);
  EXPECT_LT((d.values * sample(g.theta, std::sin) - sample(g.theta, std::cos)).cwiseAbs().maxCoeff(),
            1e-11);
  const Eigen::VectorXd c3 = (3.0 * g.theta.array()).cos();
  EXPECT_LT((d2.values * c3 + 9.0 * c3).cwiseAbs().maxCoeff(), 1e-10);

  for (int i = 0; i < m; ++i) {
    EXPECT_EQ(d.values(i, i), 0.0);
    for (int l = 0; l < m; ++l) EXPECT_NEAR(d.values(i, l), -d.values(l, i), 1e-14);
  }
}

TEST(Grid, FourierExactOnResolvedModes) {
  for (int m : {5, 21, 41}) {
    const DiskGrid g = build_disk_grid(1.0, m, 4);
    const Eigen::MatrixXcd d = diff_theta(m).values.cast<std::complex<double>>();
    for (int q = -(m - 1) / 2; q <= (m - 1) / 2; ++q) {
      Eigen::VectorXcd e(m);
      for (int i = 0; i < m; ++i) e(i) = std::exp(std::complex<double>(0.0, q * g.theta(i)));
      const Eigen::VectorXcd expected = std::complex<double>(0.0, q) * e;
      EXPECT_LE((d * e - expected).cwiseAbs().maxCoeff(), 1e-10 * m) << m << " " << q;
    }
  }
}

TEST(Grid, ChebyshevMatrixMatchesOracle) {
  for (int mr : {4, 30, 100}) {
    const DiskGrid g = build_disk_grid(2.5, 5, mr);
    const Eigen::MatrixXd d = diff_rho(g).values;
    const Eigen::MatrixXd ref = oracle::cheb(2 * mr - 1, 2.5);
    EXPECT_LT((d - ref).norm() / ref.norm(), 1e-13) << mr;
    for (int i = 0; i < d.rows(); ++i) {
      EXPECT_LE(std::abs(d.row(i).sum()), 1e-13 * d.row(i).cwiseAbs().maxCoeff());
    }
    EXPECT_LT((diff_rho2(g).values - d * d).norm() / (d * d).norm(), 1e-14);
  }
}

TEST(Grid, ChebyshevDifferentiatesPolynomials) {
  const DiskGrid g1 = build_disk_grid(4.0, 5, 20);
  const Eigen::VectorXd ones = diff_rho(g1).values * g1.rho_full;
  EXPECT_LT((ones.array() - 1.0).abs().maxCoeff(), 1e-12);

  const DiskGrid g = build_disk_grid(2.0, 5, 20);
  const Eigen::VectorXd r = g.rho_full;
  const Eigen::VectorXd d3 = diff_rho(g).values * r.array().cube().matrix();
  EXPECT_LT((d3.array() - 3.0 * r.array().square()).abs().maxCoeff(), 1e-9);
  const Eigen::VectorXd dd2 = diff_rho2(g).values * r.array().square().matrix();
  EXPECT_LT((dd2.array() - 2.0).abs().maxCoeff(), 1e-8);
}

TEST(Grid, ChebyshevExactUpToHighDegree) {
  for (int mr : {10, 100, 400}) {
    const DiskGrid g = build_disk_grid(1.0, 5, mr);
    const Eigen::MatrixXd d = diff_rho(g).values;
    const int deg = 2 * mr - 2;
    // Chebyshev polynomial T_deg and its derivative deg * U_{deg-1}.
    Eigen::VectorXd t(g.rho_full.size()), dt(g.rho_full.size());
    for (int j = 0; j < t.size(); ++j) {
      const double th = std::acos(std::clamp(g.rho_full(j), -1.0, 1.0));
      t(j) = std::cos(deg * th);
      const double s = std::sin(th);
      dt(j) = std::abs(s) < 1e-12 ? deg * deg * std::pow(g.rho_full(j) > 0 ? 1.0 : -1.0, deg - 1)
                                  : deg * std::sin(deg * th) / s;
    }
    const double rel = (d * t - dt).cwiseAbs().maxCoeff() / dt.cwiseAbs().maxCoeff();
    EXPECT_LE(rel, 1e-7) << mr;
  }
}

TEST(Grid, SplitFoldBlocksZero) {
  const DiskGrid g = build_disk_grid(1.0, 5, 6);
  DiffMatrix z{DiffKind::kRhoFirst, Eigen::MatrixXd::Zero(12, 12)};
  const FoldedBlocks b = split_fold_blocks(z);
  EXPECT_EQ(b.direct.rows(), 6);
  EXPECT_EQ(b.folded.cols(), 6);
  EXPECT_EQ(b.direct.norm(), 0.0);
  EXPECT_EQ(b.folded.norm(), 0.0);
  DiffMatrix odd{DiffKind::kRhoFirst, Eigen::MatrixXd::Zero(5, 5)};
  EXPECT_THROW(split_fold_blocks(odd), std::invalid_argument);
}

TEST(Grid, FoldedOperatorsMatchFullOperators) {
  const DiskGrid g = build_disk_grid(1.5, 11, 24);
  // Degree 5 in (x, y), so every angular mode is resolved by M_theta = 11.
  auto field = [](double x, double y) { return (1.0 + 0.4 * x) * (1.0 + 0.4 * x) * (0.5 - 0.3 * x) * y * y + x * y + 3.0; };
  const int nf = 2 * g.m_rho;
  Eigen::MatrixXd full(nf, g.m_theta), pos(g.m_rho, g.m_theta);
  for (int i = 0; i < g.m_theta; ++i) {
    for (int j = 0; j < nf; ++j) {
      full(j, i) = field(g.rho_full(j) * std::cos(g.theta(i)), g.rho_full(j) * std::sin(g.theta(i)));
    }
    pos.col(i) = full.col(i).head(g.m_rho);
  }
  const Eigen::MatrixXd shift = fold_shift_matrix(g.m_theta, FoldShift::kSpectral);
  for (const DiffMatrix& d : {diff_rho(g), diff_rho2(g)}) {
    const FoldedBlocks b = split_fold_blocks(d);
    const Eigen::MatrixXd folded = b.direct * pos + b.folded * (pos * shift.transpose());
    const Eigen::MatrixXd ref = (d.values * full).topRows(g.m_rho);
    EXPECT_LT((folded - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff(), 1e-10);
  }

  // Arbitrary nodal data extended by the discrete fold rule.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd any(g.m_rho, g.m_theta);
  for (Eigen::Index q = 0; q < any.size(); ++q) any.data()[q] = nd(rng);
  const Eigen::MatrixXd turned = any * shift.transpose();
  Eigen::MatrixXd ext(nf, g.m_theta);
  for (int j = 0; j < g.m_rho; ++j) {
    ext.row(j) = any.row(j);
    ext.row(nf - 1 - j) = turned.row(j);
  }
  for (const DiffMatrix& d : {diff_rho(g), diff_rho2(g)}) {
    const FoldedBlocks b = split_fold_blocks(d);
    const Eigen::MatrixXd folded = b.direct * any + b.folded * turned;
    const Eigen::MatrixXd ref = (d.values * ext).topRows(g.m_rho);
    EXPECT_LT((folded - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff(), 1e-10);
  }

  // Theta-independent, even in rho: f = rho^2.
  Eigen::MatrixXd sq = g.rho_pos.array().square().matrix().replicate(1, g.m_theta);
  const FoldedBlocks b = split_fold_blocks(diff_rho(g));
  const Eigen::MatrixXd dsq = b.direct * sq + b.folded * (sq * shift.transpose());
  for (int i = 0; i < g.m_theta; ++i) {
    EXPECT_LT((dsq.col(i) - 2.0 * g.rho_pos).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Grid, FoldShiftMatrices) {
  for (int m : {5, 21}) {
    const DiskGrid g = build_disk_grid(1.0, m, 4);
    const Eigen::MatrixXd p = fold_shift_matrix(m, FoldShift::kSpectral);
    EXPECT_LT((p - oracle::half_turn(m)).cwiseAbs().maxCoeff(), 1e-13);
    const Eigen::MatrixXd q = fold_shift_matrix(m, FoldShift::kIndexSwap);
    EXPECT_LT((q * q.transpose() - Eigen::MatrixXd::Identity(m, m)).norm(), 1e-15);
    for (int mode = -(m - 1) / 2; mode <= (m - 1) / 2; ++mode) {
      Eigen::VectorXcd e(m);
      for (int i = 0; i < m; ++i) e(i) = std::exp(std::complex<double>(0.0, mode * g.theta(i)));
      for (FoldShift kind : {FoldShift::kSpectral, FoldShift::kIndexSwap}) {
        const Eigen::VectorXcd pe = fold_shift_matrix(m, kind).cast<std::complex<double>>() * e;
        const auto lam = fold_shift_eigenvalue(m, mode, kind);
        EXPECT_LT((pe - lam * e).norm(), 1e-12) << m << " " << mode;
      }
      EXPECT_NEAR(fold_shift_eigenvalue(m, mode, FoldShift::kSpectral).real(), mode % 2 ? -1.0 : 1.0,
                  1e-15);
    }
  }
}

TEST(Grid, QuadratureClosedForms) {
  const DiskGrid g = build_disk_grid(4.0, 21, 100);
  const Eigen::MatrixXd w = quadrature_weights(g);
  EXPECT_EQ(w.rows(), 100);
  EXPECT_EQ(w.cols(), 21);
  EXPECT_GT(w.minCoeff(), 0.0);
  EXPECT_NEAR(w.sum(), 2.0 * kPi * (4.0 - std::log(5.0)), 1e-10);
  EXPECT_EQ((w.array() * 0.0).sum(), 0.0);

  const DiskGrid g1 = build_disk_grid(1.0, 9, 30);
  const Eigen::MatrixXd w1 = quadrature_weights(g1);
  const double sum = (w1.array().colwise() * g1.rho_pos.array().square()).sum();
  EXPECT_NEAR(sum, 2.0 * kPi * (1.0 / 3.0 - 0.5 + 1.0 - std::log(2.0)), 1e-12);
}

TEST(Grid, QuadratureEvenPolynomialsMatchAdaptiveOracle) {
  for (int mr : {8, 20}) {
    const DiskGrid g = build_disk_grid(3.0, 5, mr);
    const Eigen::VectorXd w = radial_product_weights(g, [](double r) { return r / (1.0 + r); });
    EXPECT_GT(w.minCoeff(), 0.0);
    for (int d = 0; d <= 2 * mr - 3; d += 2) {
      const Eigen::VectorXd p = (g.rho_pos / 3.0).array().pow(d);
      const double ref = oracle::integrate(
          [d](double r) { return std::pow(r / 3.0, d) * r / (1.0 + r); }, 0.0, 3.0);
      EXPECT_NEAR(w.dot(p), ref, 1e-8 * std::abs(ref)) << mr << " " << d;
    }
  }
}

TEST(Grid, AreaWeights) {
  const DiskGrid g = build_disk_grid(2.0, 11, 40);
  const Eigen::MatrixXd a = area_weights(g);
  EXPECT_NEAR(a.sum(), kPi * 4.0, 1e-12);
  const double m2 = (a.array().colwise() * g.rho_pos.array().square()).sum();
  EXPECT_NEAR(m2, kPi * 16.0 / 2.0, 1e-11);
}
