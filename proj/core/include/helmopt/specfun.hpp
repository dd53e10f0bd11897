#pragma once

#include <complex>

namespace helmopt::specfun {

/// Arguments above this value use the Hankel asymptotic expansion; below it
/// the ascending series is summed in extended precision.
inline constexpr double kAsymptoticThreshold = 17.0;

/// Bessel function of the first kind, order 0. Defined for x >= 0.
double bessel_j0(double x);

/// Bessel function of the first kind, order 1. Defined for x >= 0.
double bessel_j1(double x);

/// Bessel function of the second kind, order 0. Defined for x > 0.
double bessel_y0(double x);

/// Bessel function of the second kind, order 1. Defined for x > 0.
double bessel_y1(double x);

/// H0^(1)(x) = J0(x) + i Y0(x), the outgoing kernel of the 2-D Helmholtz operator.
std::complex<double> hankel_h0(double x);

/// H1^(1)(x) = J1(x) + i Y1(x). Note d/dx H0^(1) = -H1^(1).
std::complex<double> hankel_h1(double x);

}  // namespace helmopt::specfun
