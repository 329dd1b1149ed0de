#include "spatspec/special.hpp"

#include <cmath>

#include "spatspec/geometry.hpp"

namespace spatspec {

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

double bessel_j1(double x) {
  const double v = std::cyl_bessel_j(1.0, std::abs(x));
  return x < 0 ? -v : v;
}

double bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw NumericalError("bessel_k needs x > 0");
  // Half-integer orders have a closed form; keep the common nu = 1/2, 3/2, 5/2 exact.
  if (nu == 0.5) return std::sqrt(kPi / (2.0 * x)) * std::exp(-x);
  if (nu == 1.5) return std::sqrt(kPi / (2.0 * x)) * std::exp(-x) * (1.0 + 1.0 / x);
  if (nu == 2.5) return std::sqrt(kPi / (2.0 * x)) * std::exp(-x) * (1.0 + 3.0 / x + 3.0 / (x * x));
  if (x > 700.0) return 0.0;
  return std::cyl_bessel_k(nu, x);
}

double ball_kernel(double r, double b, int dim) {
  r = std::abs(r);
  if (dim == 1) {
    if (r < 1e-12 / b) return 2.0 * b;
    return std::sin(kTwoPi * b * r) / (kPi * r);
  }
  const double x = kTwoPi * b * r;
  if (x < 1e-6) return kPi * b * b * (1.0 - x * x / 8.0);
  return b * bessel_j1(x) / r;
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace spatspec
