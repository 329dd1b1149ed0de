#pragma once

/// @file special.hpp
/// Special functions used by the concentration kernel and the Matérn family.

namespace spatspec {

double bessel_j0(double x);
double bessel_j1(double x);
/// Modified Bessel function of the second kind K_nu(x), x > 0.
double bessel_k(double nu, double x);

/// Ball-indicator kernel in d dimensions: the inverse Fourier transform of
/// 1{|k| <= b}. d = 1: sin(2 pi b r)/(pi r); d = 2: b J1(2 pi b r)/r.
double ball_kernel(double r, double b, int dim);

/// sin(x)/x with the removable singularity filled in.
double sinc(double x);

}  // namespace spatspec
