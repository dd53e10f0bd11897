#include "helmopt/krylov.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace helmopt {

namespace {

using Complex = std::complex<double>;

// Givens rotation zeroing b in (a, b).
void make_rotation(Complex a, Complex b, double& c, Complex& s) {
  const double na = std::abs(a);
  const double nb = std::abs(b);
  if (nb == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (na == 0.0) {
    c = 0.0;
    s = std::conj(b) / nb;
    return;
  }
  const double norm = std::hypot(na, nb);
  c = na / norm;
  s = (a / na) * std::conj(b) / norm;
}

}  // namespace

GmresResult gmres(const LinearMap& a, const LinearMap& precond, const Eigen::VectorXcd& b,
                  const Eigen::VectorXcd& x0, const GmresOptions& opts) {
  GmresResult out;
  out.x = x0;
  const Eigen::VectorXcd pb = precond(b);
  const double ref = pb.norm();
  if (ref == 0.0) {
    out.x.setZero();
    out.residual = 0.0;
    out.status = GmresStatus::kConverged;
    return out;
  }
  Eigen::VectorXcd r = precond(b - a(out.x));
  double rel = r.norm() / ref;
  out.residual = rel;
  if (rel <= opts.tolerance) {
    return out;
  }

  const int m = std::max(1, opts.restart);
  const Eigen::Index n = b.size();
  int total = 0;
  while (total < opts.max_iterations) {
    const double beta = r.norm();
    Eigen::MatrixXcd v(n, m + 1);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m);
    std::vector<double> cs(m);
    std::vector<Complex> sn(m);
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(m + 1);
    g(0) = beta;
    v.col(0) = r / beta;
    int j = 0;
    bool happy = false;
    for (; j < m && total < opts.max_iterations; ++j) {
      Eigen::VectorXcd w = precond(a(v.col(j)));
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const Complex hij = v.col(i).dot(w);
          h(i, j) += hij;
          w -= hij * v.col(i);
        }
      }
      const double hn = w.norm();
      h(j + 1, j) = hn;
      for (int i = 0; i < j; ++i) {
        const Complex t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
        h(i + 1, j) = -std::conj(sn[i]) * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = t;
      }
      make_rotation(h(j, j), h(j + 1, j), cs[j], sn[j]);
      h(j, j) = cs[j] * h(j, j) + sn[j] * h(j + 1, j);
      h(j + 1, j) = 0.0;
      g(j + 1) = -std::conj(sn[j]) * g(j);
      g(j) = cs[j] * g(j);
      ++total;
      const double est = std::abs(g(j + 1)) / ref;
      if (opts.progress && opts.report_every > 0 && total % opts.report_every == 0) {
        opts.progress(total, est);
      }
      if (hn <= 1e-14 * beta) {
        happy = true;
        ++j;
        break;
      }
      v.col(j + 1) = w / hn;
      if (est <= 0.5 * opts.tolerance) {
        ++j;
        break;
      }
    }
    // Back substitution for the j x j triangular system.
    Eigen::VectorXcd y = h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    out.x += v.leftCols(j) * y;
    r = precond(b - a(out.x));
    const double next = r.norm() / ref;
    out.iterations = total;
    if (next <= opts.tolerance) {
      out.residual = next;
      out.status = GmresStatus::kConverged;
      return out;
    }
    if (happy || next >= rel * (1.0 - 1e-10)) {
      out.residual = next;
      out.status = GmresStatus::kStagnated;
      return out;
    }
    rel = next;
    out.residual = rel;
  }
  out.status = GmresStatus::kMaxIterations;
  return out;
}

}  // namespace helmopt
