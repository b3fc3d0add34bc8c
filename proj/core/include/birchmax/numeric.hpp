#pragma once

#include <cmath>
#include <complex>

namespace birchmax {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// e(z) = exp(2*pi*i*z)
inline std::complex<double> unit_phase(double z) {
  double a = kTwoPi * z;
  return {std::cos(a), std::sin(a)};
}

// Compensated (Kahan) accumulator; the reference exponential-sum paths and
// quadrature reductions use it so stated 1e-10-level tolerances are honest.
struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

struct KahanComplex {
  Kahan re, im;
  void add(std::complex<double> z) {
    re.add(z.real());
    im.add(z.imag());
  }
  std::complex<double> value() const { return {re.sum, im.sum}; }
};

}  // namespace birchmax
