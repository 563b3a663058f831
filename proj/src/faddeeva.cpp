#include "biphoton/faddeeva.hpp"

#include <cmath>
#include <vector>

#include "biphoton/constants.hpp"

namespace bp {

const FaddeevaApprox& FaddeevaApprox::instance() {
  static const FaddeevaApprox approx = [] {
    FaddeevaApprox fa;
    constexpr int n = FaddeevaApprox::N;
    const int m = 2 * n;
    const int m2 = 2 * m;
    fa.L = std::sqrt(n / std::sqrt(2.0));

    // Sample f(t) = exp(-t^2) (L^2 + t^2) at t = L tan(theta/2) and take the
    // real DFT; O(M^2) at startup, done once.
    std::vector<double> samples(m2, 0.0);
    for (int j = 1; j < m2; ++j) {
      const int k = j - m;  // -M+1 .. M-1
      const double theta = k * consts::pi / m;
      const double t = fa.L * std::tan(0.5 * theta);
      samples[j] = std::exp(-t * t) * (fa.L * fa.L + t * t);
    }
    // fftshift then a real forward DFT
    std::vector<double> shifted(m2);
    for (int i = 0; i < m2; ++i) shifted[i] = samples[(i + m) % m2];
    std::vector<double> a(n + 1, 0.0);
    for (int freq = 0; freq <= n; ++freq) {
      double acc = 0.0;
      for (int i = 0; i < m2; ++i)
        acc += shifted[i] * std::cos(consts::two_pi * freq * i / m2);
      a[freq] = acc / m2;
    }
    for (int j = 0; j < n; ++j) fa.coef[j] = a[n - j];
    return fa;
  }();
  return approx;
}

std::complex<double> faddeeva_w(std::complex<double> z) {
  const auto& fa = FaddeevaApprox::instance();
  const std::complex<double> iz(-z.imag(), z.real());
  const std::complex<double> lmiz = fa.L - iz;
  const std::complex<double> big_z = (fa.L + iz) / lmiz;
  std::complex<double> p(0.0, 0.0);
  for (int j = 0; j < FaddeevaApprox::N; ++j) p = p * big_z + fa.coef[j];
  const std::complex<double> inv = 1.0 / lmiz;
  return 2.0 * p * inv * inv + (1.0 / std::sqrt(consts::pi)) * inv;
}

}  // namespace bp
