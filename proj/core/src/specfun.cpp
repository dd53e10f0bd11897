#include "helmopt/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace helmopt::specfun {

namespace {

using Real = long double;

constexpr Real kPi = 3.141592653589793238462643383279502884L;
constexpr Real kEulerGamma = 0.577215664901532860606512090082402431L;
constexpr Real kSeriesEps = std::numeric_limits<Real>::epsilon();

void require_nonnegative(double x, const char* name) {
  if (!(x >= 0.0)) {
    throw std::domain_error(std::string(name) + ": argument must be nonnegative, got " +
                            std::to_string(x));
  }
}

void require_positive(double x, const char* name) {
  if (!(x > 0.0)) {
    throw std::domain_error(std::string(name) + ": argument must be positive, got " +
                            std::to_string(x));
  }
}

// Ascending series for J0 and J1 plus the harmonic-number sums that enter Y0
// and Y1. All accumulation is in long double; the largest term is about
// I0(x), so at the switchover (x = 17) roughly 6.5 of the ~19 digits cancel.
struct SeriesSums {
  Real j0 = 0;
  Real j1 = 0;
  Real y0_tail = 0;  // sum_{k>=1} (-1)^{k+1} H_k q^k / (k!)^2
  Real y1_tail = 0;  // sum_{k>=0} (-1)^k (psi(k+1) + psi(k+2)) q^k / (k! (k+1)!)
};

SeriesSums ascending_series(Real x) {
  const Real q = x * x / 4;
  SeriesSums s;
  Real t0 = 1;  // (-q)^k / (k!)^2
  Real t1 = 1;  // (-q)^k / (k! (k+1)!)
  Real harmonic = 0;
  s.j0 = t0;
  s.j1 = t1;
  // psi(1) + psi(2) = -2 gamma + 1
  s.y1_tail = t1 * (1 - 2 * kEulerGamma);
  for (int k = 1; k < 400; ++k) {
    const Real kk = static_cast<Real>(k);
    t0 *= -q / (kk * kk);
    t1 *= -q / (kk * (kk + 1));
    harmonic += 1 / kk;
    s.j0 += t0;
    s.j1 += t1;
    s.y0_tail -= harmonic * t0;
    // psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma
    s.y1_tail += (2 * harmonic + 1 / (kk + 1) - 2 * kEulerGamma) * t1;
    if (kk > q && std::fabs(t0) * (1 + harmonic) < kSeriesEps * 1e-3L) {
      break;
    }
  }
  s.j1 *= x / 2;
  s.y1_tail *= x / 2;
  return s;
}

// Hankel asymptotic expansion for order nu in {0, 1}; returns (J, Y).
struct BesselPair {
  double j;
  double y;
};

BesselPair asymptotic(Real x, int nu) {
  const Real mu = 4.0L * nu * nu;
  Real p = 1;
  Real q = 0;
  Real term = 1;
  Real prev_abs = std::numeric_limits<Real>::infinity();
  for (int j = 1; j < 200; ++j) {
    const Real odd = 2.0L * j - 1;
    term *= (mu - odd * odd) / (static_cast<Real>(j) * 8 * x);
    const Real a = std::fabs(term);
    if (a > prev_abs) {
      break;  // the expansion has started to diverge
    }
    prev_abs = a;
    switch (j % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      default: p += term; break;
    }
    if (a < kSeriesEps * 1e-2L) {
      break;
    }
  }
  const Real chi = x - (0.5L * nu + 0.25L) * kPi;
  const Real c = std::cos(chi);
  const Real s = std::sin(chi);
  const Real amp = std::sqrt(2 / (kPi * x));
  return {static_cast<double>(amp * (p * c - q * s)),
          static_cast<double>(amp * (p * s + q * c))};
}

}  // namespace

double bessel_j0(double x) {
  require_nonnegative(x, "bessel_j0");
  if (x > kAsymptoticThreshold) {
    return asymptotic(x, 0).j;
  }
  return static_cast<double>(ascending_series(x).j0);
}

double bessel_j1(double x) {
  require_nonnegative(x, "bessel_j1");
  if (x > kAsymptoticThreshold) {
    return asymptotic(x, 1).j;
  }
  return static_cast<double>(ascending_series(x).j1);
}

double bessel_y0(double x) {
  require_positive(x, "bessel_y0");
  if (x > kAsymptoticThreshold) {
    return asymptotic(x, 0).y;
  }
  const Real xl = x;
  const SeriesSums s = ascending_series(xl);
  return static_cast<double>(2 / kPi * ((std::log(xl / 2) + kEulerGamma) * s.j0 + s.y0_tail));
}

double bessel_y1(double x) {
  require_positive(x, "bessel_y1");
  if (x > kAsymptoticThreshold) {
    return asymptotic(x, 1).y;
  }
  const Real xl = x;
  const SeriesSums s = ascending_series(xl);
  return static_cast<double>(-2 / (kPi * xl) + 2 / kPi * std::log(xl / 2) * s.j1 -
                             s.y1_tail / kPi);
}

std::complex<double> hankel_h0(double x) {
  require_positive(x, "hankel_h0");
  if (x > kAsymptoticThreshold) {
    const BesselPair b = asymptotic(x, 0);
    return {b.j, b.y};
  }
  const Real xl = x;
  const SeriesSums s = ascending_series(xl);
  const Real y = 2 / kPi * ((std::log(xl / 2) + kEulerGamma) * s.j0 + s.y0_tail);
  return {static_cast<double>(s.j0), static_cast<double>(y)};
}

std::complex<double> hankel_h1(double x) {
  require_positive(x, "hankel_h1");
  if (x > kAsymptoticThreshold) {
    const BesselPair b = asymptotic(x, 1);
    return {b.j, b.y};
  }
  const Real xl = x;
  const SeriesSums s = ascending_series(xl);
  const Real y = -2 / (kPi * xl) + 2 / kPi * std::log(xl / 2) * s.j1 - s.y1_tail / kPi;
  return {static_cast<double>(s.j1), static_cast<double>(y)};
}

}  // namespace helmopt::specfun
