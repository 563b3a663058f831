#pragma once

#include <array>
#include <complex>

namespace bp {

// Weideman rational approximation of the Faddeeva function
// w(z) = exp(-z^2) erfc(-iz) on the upper half plane (Im z >= 0):
//   w(z) ~ 2 P(Z) / (L - iz)^2 + (1/sqrt(pi)) / (L - iz),
//   Z = (L + iz)/(L - iz), P a degree-(N-1) polynomial with real
//   coefficients. N = 32 is accurate to ~1e-14 uniformly on Im z >= 0 and is
//   branch-free, which keeps the SIMD lane divergence-free.
struct FaddeevaApprox {
  static constexpr int N = 32;
  double L;
  std::array<double, N> coef;  // Horner order: coef[0] Z^{N-1} + ... + coef[N-1]

  static const FaddeevaApprox& instance();
};

std::complex<double> faddeeva_w(std::complex<double> z);

}  // namespace bp
