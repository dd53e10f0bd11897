#include "helmopt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "helmopt/assembly.hpp"
#include "helmopt/specfun.hpp"

namespace helmopt {

namespace {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

// Clenshaw sums of all columns at x in [-1, 1].
Eigen::RowVectorXcd clenshaw(const Eigen::MatrixXcd& a, double x) {
  const Eigen::Index n = a.rows();
  Eigen::RowVectorXcd b1 = Eigen::RowVectorXcd::Zero(a.cols());
  Eigen::RowVectorXcd b2 = Eigen::RowVectorXcd::Zero(a.cols());
  for (Eigen::Index h = n - 1; h >= 1; --h) {
    Eigen::RowVectorXcd b0 = a.row(h) + (2.0 * x) * b1 - b2;
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  return a.row(0) + x * b1 - b2;
}

Eigen::RowVectorXcd fourier_row(int m_theta, double theta) {
  const int half = (m_theta - 1) / 2;
  Eigen::RowVectorXcd e(m_theta);
  for (int a = 0; a < m_theta; ++a) e(a) = std::polar(1.0, (a - half) * theta);
  return e;
}

Eigen::RowVectorXcd mode_numbers(int m_theta) {
  const int half = (m_theta - 1) / 2;
  Eigen::RowVectorXcd m(m_theta);
  for (int a = 0; a < m_theta; ++a) m(a) = Complex(0.0, a - half);
  return m;
}

void check_in_disk(const SpectralCoefficients& c, double rho) {
  if (!(rho >= 0.0) || rho > c.radius * (1.0 + 1e-12)) {
    throw std::domain_error("evaluate_at: point at radius " + std::to_string(rho) +
                            " lies outside the disk of radius " + std::to_string(c.radius));
  }
}

// Three complex values that Boost's Gauss-Kronrod integrator can carry.
struct Triple {
  Complex a, b, c;
  Triple(double v = 0.0) : a(v), b(v), c(v) {}  // NOLINT(google-explicit-constructor)
  Triple(Complex x, Complex y, Complex z) : a(x), b(y), c(z) {}
  Triple operator+(const Triple& o) const { return {a + o.a, b + o.b, c + o.c}; }
  Triple operator-(const Triple& o) const { return {a - o.a, b - o.b, c - o.c}; }
  Triple operator-() const { return {-a, -b, -c}; }
  Triple& operator+=(const Triple& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    return *this;
  }
  Triple operator*(double s) const { return {a * s, b * s, c * s}; }
  friend Triple operator*(double s, const Triple& t) { return t * s; }
  friend double abs(const Triple& t) { return std::abs(t.a) + std::abs(t.b) + std::abs(t.c); }
};

// Adaptive Gauss-Kronrod bisection against an absolute error target.
template <class F>
auto integrate_abs(const F& f, double a, double b, double abs_tol, int depth = 30)
    -> decltype(f(a)) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0;
  double l1 = 0.0;
  auto est = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
  err *= 0.5 * (b - a);  // the non-adaptive error estimate is reported on [-1, 1]
  // Accept once the error estimate reaches the target or the rounding floor.
  const double floor = 100.0 * std::numeric_limits<double>::epsilon() * l1;
  if (err <= std::max(abs_tol, floor) || depth == 0) {
    return est;
  }
  const double mid = 0.5 * (a + b);
  return integrate_abs(f, a, mid, 0.5 * abs_tol, depth - 1) +
         integrate_abs(f, mid, b, 0.5 * abs_tol, depth - 1);
}

}  // namespace

SpectralCoefficients to_spectral(const Eigen::MatrixXcd& v, const DiskGrid& grid) {
  if (v.rows() != grid.m_rho || v.cols() != grid.m_theta) {
    throw std::invalid_argument("to_spectral: field does not match the grid");
  }
  const int n = grid.cheb_degree();
  const int mt = grid.m_theta;
  Eigen::MatrixXcd full(n + 1, mt);
  full.topRows(grid.m_rho) = v;
  const Eigen::MatrixXcd shifted =
      v * fold_shift_matrix(mt, FoldShift::kSpectral).transpose().cast<Complex>();
  for (int j = grid.m_rho; j <= n; ++j) full.row(j) = shifted.row(n - j);

  // Fourier coefficients along theta.
  const int half = (mt - 1) / 2;
  Eigen::MatrixXcd f(mt, mt);
  for (int i = 0; i < mt; ++i) {
    for (int a = 0; a < mt; ++a) {
      long long r = (static_cast<long long>(a - half) * (i + 1)) % mt;
      if (r < 0) r += mt;
      f(i, a) = std::polar(1.0 / mt, -2.0 * kPi * static_cast<double>(r) / mt);
    }
  }
  const Eigen::MatrixXcd fh = full * f;

  // Chebyshev coefficients by the type-I cosine transform.
  Eigen::MatrixXd ct(n + 1, n + 1);
  for (int h = 0; h <= n; ++h) {
    const double ch = (h == 0 || h == n) ? 2.0 : 1.0;
    for (int j = 0; j <= n; ++j) {
      const double cj = (j == 0 || j == n) ? 2.0 : 1.0;
      const long long r = (static_cast<long long>(h) * j) % (2LL * n);
      const double cosv = std::sin(kPi * static_cast<double>(n - 2 * r) / (2.0 * n));
      ct(h, j) = 2.0 * cosv / (n * ch * cj);
    }
  }
  SpectralCoefficients c;
  c.radius = grid.radius;
  c.m_theta = mt;
  c.modes = real_times(ct, fh);

  c.derivative = Eigen::MatrixXcd::Zero(n + 1, mt);
  if (n >= 1) {
    Eigen::RowVectorXcd bp1 = Eigen::RowVectorXcd::Zero(mt);  // b_{h+1}
    Eigen::RowVectorXcd bp2 = Eigen::RowVectorXcd::Zero(mt);  // b_{h+2}
    for (int h = n; h >= 1; --h) {
      // b_{h-1} = b_{h+1} + 2 h a_h
      Eigen::RowVectorXcd b = bp2 + (2.0 * h) * c.modes.row(h);
      if (h - 1 >= 0) c.derivative.row(h - 1) = b;
      bp2 = bp1;
      bp1 = b;
    }
    c.derivative.row(0) *= 0.5;
    c.derivative /= grid.radius;
  }
  return c;
}

std::complex<double> evaluate_at(const SpectralCoefficients& c, double rho, double theta) {
  check_in_disk(c, rho);
  const double x = std::min(rho / c.radius, 1.0);
  return clenshaw(c.modes, x).cwiseProduct(fourier_row(c.m_theta, theta)).sum();
}

std::vector<std::complex<double>> evaluate_at(const SpectralCoefficients& c,
                                              const std::vector<std::pair<double, double>>& points) {
  std::vector<std::complex<double>> out;
  out.reserve(points.size());
  for (const auto& [rho, theta] : points) out.push_back(evaluate_at(c, rho, theta));
  return out;
}

FieldSample evaluate_sample(const SpectralCoefficients& c, Point p) {
  const double rho = std::hypot(p.x, p.y);
  check_in_disk(c, rho);
  const double x = std::min(rho / c.radius, 1.0);
  const Eigen::RowVectorXcd s = clenshaw(c.modes, x);
  const Eigen::RowVectorXcd ds = clenshaw(c.derivative, x);
  FieldSample out;
  if (rho < 1e-14 * c.radius) {
    // grad u(0) from the radial derivative along theta = 0 and theta = pi/2.
    const Eigen::RowVectorXcd e0 = fourier_row(c.m_theta, 0.0);
    const Eigen::RowVectorXcd e1 = fourier_row(c.m_theta, 0.5 * kPi);
    out.value = s.sum();
    out.dx = ds.cwiseProduct(e0).sum();
    out.dy = ds.cwiseProduct(e1).sum();
    return out;
  }
  const double theta = std::atan2(p.y, p.x);
  const Eigen::RowVectorXcd e = fourier_row(c.m_theta, theta);
  out.value = s.cwiseProduct(e).sum();
  const Complex ur = ds.cwiseProduct(e).sum();
  const Complex ut = s.cwiseProduct(e).cwiseProduct(mode_numbers(c.m_theta)).sum();
  const double ct = p.x / rho;
  const double st = p.y / rho;
  out.dx = ct * ur - st * ut / rho;
  out.dy = st * ur + ct * ut / rho;
  return out;
}

ExactSolution::ExactSolution(GaussianSum source, double k, const RefractionKind& n)
    : source_(std::move(source)), k_(k), support_(gaussian_support_radius(source_.sigma)) {
  const auto c = constant_index(n);
  if (!c) {
    throw UnsupportedMedium("exact solution requires a constant refraction index");
  }
  if (!(k > 0.0) || !(*c > 0.0)) {
    throw std::invalid_argument("ExactSolution: k and n must be positive");
  }
  k_ = k * *c;
}

std::vector<std::pair<Complex, Complex>> ExactSolution::radial_batch(
    std::vector<double> radii) const {
  const double sigma = source_.sigma;
  const double k = k_;
  const double smax = support_;
  auto fj = [&](double s) { return specfun::bessel_j0(k * s) * std::exp(-sigma * s * s) * s; };
  auto fh = [&](double s) { return specfun::hankel_h0(k * s) * std::exp(-sigma * s * s) * s; };
  // Absolute target: a small fraction of int_0^inf g(s) s ds = 1/(2 sigma),
  // spread over the support in proportion to interval length.
  const double abs_tol = 1e-14 / (2.0 * sigma);
  auto integrate_j = [&](double a, double b) -> double {
    a = std::min(a, smax);
    b = std::min(b, smax);
    if (b <= a) return 0.0;
    return integrate_abs(fj, a, b, abs_tol * (b - a) / smax);
  };
  auto integrate_h = [&](double a, double b) -> Complex {
    a = std::min(a, smax);
    b = std::min(b, smax);
    if (b <= a) return 0.0;
    return integrate_abs(fh, a, b, abs_tol * (b - a) / smax);
  };

  const std::size_t count = radii.size();
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });

  std::vector<double> ij(count);
  std::vector<Complex> ih(count);
  double acc_j = 0.0;
  double prev = 0.0;
  for (std::size_t t = 0; t < count; ++t) {
    const double r = radii[order[t]];
    acc_j += integrate_j(prev, r);
    prev = r;
    ij[order[t]] = acc_j;
  }
  Complex acc_h = 0.0;
  double next = smax;
  for (std::size_t t = count; t-- > 0;) {
    const double r = radii[order[t]];
    acc_h += integrate_h(r, next);
    next = std::max(std::min(r, smax), 0.0);
    ih[order[t]] = acc_h;
  }

  std::vector<std::pair<Complex, Complex>> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = radii[i];
    const double kr = k * r;
    if (kr < 1e-300) {
      out[i] = {-kI * (0.5 * kPi) * ih[i], 0.0};
      continue;
    }
    const Complex h0 = specfun::hankel_h0(kr);
    const Complex h1 = specfun::hankel_h1(kr);
    const double j0 = h0.real();
    const double j1 = h1.real();
    const Complex u = -kI * (0.5 * kPi) * (h0 * ij[i] + j0 * ih[i]);
    const Complex du = kI * (0.5 * kPi * k) * (h1 * ij[i] + j1 * ih[i]);
    out[i] = {u, du};
  }
  return out;
}

std::pair<Complex, Complex> ExactSolution::radial(double r) const {
  if (!(r >= 0.0)) throw std::domain_error("ExactSolution::radial: negative radius");
  return radial_batch({r}).front();
}

std::vector<FieldSample> ExactSolution::evaluate(const std::vector<Point>& points) const {
  const std::size_t np = points.size();
  const std::size_t nt = source_.terms.size();
  std::vector<FieldSample> out(np, FieldSample{0.0, 0.0, 0.0});
  if (nt == 0 || np == 0) return out;
  std::vector<double> radii;
  radii.reserve(np * nt);
  for (const GaussianTerm& t : source_.terms) {
    for (const Point& p : points) radii.push_back(std::hypot(p.x - t.center.x, p.y - t.center.y));
  }
  const auto prof = radial_batch(radii);
  for (std::size_t c = 0; c < nt; ++c) {
    const GaussianTerm& t = source_.terms[c];
    for (std::size_t i = 0; i < np; ++i) {
      const double r = radii[c * np + i];
      const auto& [u, du] = prof[c * np + i];
      out[i].value += t.weight * u;
      if (r > 0.0) {
        out[i].dx += t.weight * du * ((points[i].x - t.center.x) / r);
        out[i].dy += t.weight * du * ((points[i].y - t.center.y) / r);
      }
    }
  }
  return out;
}

FieldSample ExactSolution::at(Point x) const { return evaluate({x}).front(); }

std::vector<FieldSample> exact_solution_constant_n(const ProblemSpec& p,
                                                   const std::vector<Point>& points) {
  const auto* g = std::get_if<GaussianSum>(&p.source);
  if (g == nullptr) {
    throw std::invalid_argument("exact solution is only available for Gaussian-sum sources");
  }
  return ExactSolution(*g, p.k, p.refraction).evaluate(points);
}

FieldSample hankel_convolution_2d(const GaussianSum& f, double k, Point x, double tolerance) {
  if (f.terms.empty()) return {0.0, 0.0, 0.0};
  if (!(k > 0.0)) throw std::invalid_argument("hankel_convolution_2d: k must be positive");
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double supp = gaussian_support_radius(f.sigma);
  double rmax = 0.0;
  for (const GaussianTerm& t : f.terms) {
    rmax = std::max(rmax, std::hypot(x.x - t.center.x, x.y - t.center.y) + supp);
  }
  // Angular averages of f and grad f on the circle |y - x| = r, by a periodic
  // trapezoid rule refined until it settles.
  auto ring = [&](double r) -> Triple {
    auto sample = [&](double phi) -> Triple {
      const double yx = x.x + r * std::cos(phi);
      const double yy = x.y + r * std::sin(phi);
      double v = 0.0, gx = 0.0, gy = 0.0;
      for (const GaussianTerm& t : f.terms) {
        const double dx = yx - t.center.x;
        const double dy = yy - t.center.y;
        const double e = t.weight * std::exp(-f.sigma * (dx * dx + dy * dy));
        v += e;
        gx += -2.0 * f.sigma * dx * e;
        gy += -2.0 * f.sigma * dy * e;
      }
      return {v, gx, gy};
    };
    int n = 16;
    Triple sum;
    for (int i = 0; i < n; ++i) sum += sample(2.0 * kPi * i / n);
    Triple prev = sum * (2.0 * kPi / n);
    for (; n < (1 << 16); n *= 2) {
      for (int i = 0; i < n; ++i) sum += sample(2.0 * kPi * (2 * i + 1) / (2.0 * n));
      const Triple cur = sum * (2.0 * kPi / (2 * n));
      if (abs(cur - prev) <= 1e-15 * (abs(cur) + 1e-300)) return cur;
      prev = cur;
    }
    return prev;
  };
  auto integrand = [&](double r) -> Triple {
    const Complex h = specfun::hankel_h0(k * r) * r;
    const Triple a = ring(r);
    return {h * a.a, h * a.b, h * a.c};
  };
  const double delta = std::min({0.1, 0.5 / k, rmax});
  Triple total = GK::integrate(integrand, 0.0, delta, 25, tolerance);
  if (rmax > delta) total += GK::integrate(integrand, delta, rmax, 25, tolerance);
  const Complex scale = -0.25 * kI;
  return {scale * total.a, scale * total.b, scale * total.c};
}

ErrorReport error_norms(const SpectralCoefficients& v, const ReferenceField& reference, double rho,
                        int m_theta, int m_rho) {
  if (!(rho > 0.0) || rho > v.radius * (1.0 + 1e-12)) {
    throw std::invalid_argument("error_norms: comparison radius must lie in (0, R]");
  }
  const DiskGrid g = build_disk_grid(rho, m_theta, m_rho);
  const Eigen::MatrixXd w = area_weights(g);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(g.num_nodes()));
  for (int i = 0; i < m_theta; ++i) {
    for (int j = 0; j < m_rho; ++j) {
      pts.push_back({g.rho_pos(j) * std::cos(g.theta(i)), g.rho_pos(j) * std::sin(g.theta(i))});
    }
  }
  const std::vector<FieldSample> ref = reference(pts);
  if (ref.size() != pts.size()) {
    throw std::invalid_argument("error_norms: reference returned the wrong number of samples");
  }
  double e0 = 0.0, e1 = 0.0, r0 = 0.0, r1 = 0.0, linf = 0.0;
  for (std::size_t q = 0; q < pts.size(); ++q) {
    const double wq = w(static_cast<Eigen::Index>(q % m_rho), static_cast<Eigen::Index>(q / m_rho));
    const FieldSample s = evaluate_sample(v, pts[q]);
    const Complex ev = s.value - ref[q].value;
    const double grad = std::norm(s.dx - ref[q].dx) + std::norm(s.dy - ref[q].dy);
    e0 += wq * std::norm(ev);
    e1 += wq * grad;
    r0 += wq * std::norm(ref[q].value);
    r1 += wq * (std::norm(ref[q].dx) + std::norm(ref[q].dy));
    linf = std::max(linf, std::abs(ev));
  }
  ErrorReport rep;
  rep.l2_abs = std::sqrt(e0);
  rep.h1_abs = std::sqrt(e0 + e1);
  rep.linf_abs = linf;
  rep.comparison_radius = rho;
  rep.comparison_m_theta = m_theta;
  rep.comparison_m_rho = m_rho;
  if (r0 > 0.0) {
    rep.l2_rel = rep.l2_abs / std::sqrt(r0);
    rep.h1_rel = rep.h1_abs / std::sqrt(r0 + r1);
  } else {
    rep.relative_defined = false;
    rep.l2_rel = std::numeric_limits<double>::quiet_NaN();
    rep.h1_rel = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

ReferenceField as_reference(const SpectralCoefficients& c) {
  return [c](const std::vector<Point>& pts) {
    std::vector<FieldSample> out;
    out.reserve(pts.size());
    for (const Point& p : pts) out.push_back(evaluate_sample(c, p));
    return out;
  };
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3) {
    throw std::invalid_argument("fit_rate: need at least 3 samples");
  }
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto [p, e] = samples[static_cast<std::size_t>(i)];
    if (!(p > 0.0) || !(e > 0.0) || !std::isfinite(p) || !std::isfinite(e)) {
      throw std::invalid_argument("fit_rate: parameters and errors must be positive");
    }
    a(i, 0) = 1.0;
    a(i, 1) = std::log(p);
    b(i) = std::log(e);
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd res = b - a * coef;
  RateFit fit;
  fit.intercept = coef(0);
  fit.slope = coef(1);
  fit.rms_residual = std::sqrt(res.squaredNorm() / static_cast<double>(n));
  const double ss_tot = (b.array() - b.mean()).square().sum();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - res.squaredNorm() / ss_tot : 1.0;
  return fit;
}

Eigen::VectorXcd boundary_trace(const SpectralCoefficients& c, double rho, int m_theta) {
  check_in_disk(c, rho);
  if (m_theta < 1) throw std::invalid_argument("boundary_trace: need at least one angle");
  const double x = std::min(rho / c.radius, 1.0);
  const Eigen::RowVectorXcd s = clenshaw(c.modes, x);
  Eigen::VectorXcd out(m_theta);
  for (int i = 0; i < m_theta; ++i) {
    const double theta = 2.0 * kPi * (i + 1) / m_theta;
    out(i) = s.cwiseProduct(fourier_row(c.m_theta, theta)).sum();
  }
  return out;
}

}  // namespace helmopt
