#include <cmath>
#include <cstdio>

#include "biphoton/constants.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/spectrum.hpp"

namespace bp {

const char* to_string(SpectrumLabel label) {
  switch (label) {
    case SpectrumLabel::chi_as: return "chi_as";
    case SpectrumLabel::chi_s: return "chi_s";
    case SpectrumLabel::chi3: return "chi3";
    case SpectrumLabel::k_as: return "k_as";
    case SpectrumLabel::k_s: return "k_s";
    case SpectrumLabel::delta_k: return "delta_k";
    case SpectrumLabel::jsa: return "jsa";
  }
  return "?";
}

void ComplexSpectrum::validate() const {
  if (grid.size() < 2 || grid.size() != values.size())
    throw NumericError("ComplexSpectrum: grid/value size mismatch or too small");
  const double d = grid[1] - grid[0];
  if (!(d > 0)) throw NumericError("ComplexSpectrum: grid must be strictly increasing");
  for (size_t i = 1; i < grid.size(); ++i) {
    const double di = grid[i] - grid[i - 1];
    if (std::abs(di - d) > 1e-9 * std::abs(d))
      throw NumericError("ComplexSpectrum: grid not uniform");
  }
  // symmetric as a set: grid[i] == -grid[n-1-i]
  const size_t n = grid.size();
  for (size_t i = 0; i < n / 2; ++i) {
    if (std::abs(grid[i] + grid[n - 1 - i]) > 1e-6 * std::abs(d))
      throw NumericError("ComplexSpectrum: grid not symmetric about zero");
  }
  for (const auto& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericError("ComplexSpectrum: non-finite value");
  }
}

std::vector<double> make_symmetric_grid(size_t n, double step) {
  std::vector<double> g(n);
  const double mid = 0.5 * static_cast<double>(n - 1);
  for (size_t i = 0; i < n; ++i) g[i] = (static_cast<double>(i) - mid) * step;
  return g;
}

void VelocityQuadrature::validate() const {
  if (nodes.empty() || nodes.size() != weights.size())
    throw NumericError("VelocityQuadrature: empty or mismatched nodes/weights");
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (std::abs(sum - 1.0) > 1e-12)
    throw NumericError("VelocityQuadrature: weights sum to " + std::to_string(sum));
  const size_t n = nodes.size();
  for (size_t i = 0; i < n / 2; ++i) {
    if (std::abs(nodes[i] + nodes[n - 1 - i]) > 1e-9 * (std::abs(nodes[i]) + 1e-300))
      throw NumericError("VelocityQuadrature: nodes not symmetric about zero");
  }
}

VelocityQuadrature VelocityQuadrature::gauss_hermite(size_t order, double sigma_v) {
  if (order == 0) throw NumericError("gauss_hermite: order must be > 0");
  // Newton iteration on physicists' Hermite polynomials (Numerical Recipes
  // style); nodes of H_n, weights for weight function exp(-x^2).
  const size_t n = order;
  std::vector<double> x(n), w(n);
  const size_t m = (n + 1) / 2;
  double z = 0.0;
  for (size_t i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[n - 1];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[n - 2];
    } else {
      z = 2.0 * z - x[n - i + 1];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 0.7511255444649425;  // pi^{-1/4}
      double p2 = 0.0;
      for (size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    x[n - 1 - i] = z;
    x[i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;  // enforce exact central node

  VelocityQuadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  // v = sqrt(2) sigma_v x maps exp(-x^2)/sqrt(pi) onto the velocity Gaussian.
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += w[i];
  for (size_t i = 0; i < n; ++i) {
    q.nodes[i] = std::sqrt(2.0) * sigma_v * x[i];
    q.weights[i] = w[i] / sum;
  }
  q.validate();
  return q;
}

VelocityQuadrature VelocityQuadrature::gaussian_midpoint(size_t order, double sigma_v,
                                                         double span_sigmas) {
  if (order == 0) throw NumericError("gaussian_midpoint: order must be > 0");
  VelocityQuadrature q;
  q.nodes.resize(order);
  q.weights.resize(order);
  const double span = 2.0 * span_sigmas * sigma_v;
  const double h = span / static_cast<double>(order);
  const double mid = 0.5 * static_cast<double>(order - 1);
  double sum = 0.0;
  for (size_t i = 0; i < order; ++i) {
    const double v = (static_cast<double>(i) - mid) * h;
    q.nodes[i] = v;
    const double u = (sigma_v > 0) ? v / sigma_v : 0.0;
    q.weights[i] = std::exp(-0.5 * u * u);
    sum += q.weights[i];
  }
  for (auto& w : q.weights) w /= sum;  // truncation renormalized
  if (sigma_v == 0.0) {
    // degenerate measure: all mass at v = 0
    for (size_t i = 0; i < order; ++i) q.weights[i] = 0.0;
    q.weights[order / 2] = order % 2 ? 1.0 : 0.5;
    if (order % 2 == 0) q.weights[order / 2 - 1] = 0.5;
    for (size_t i = 0; i < order; ++i) q.nodes[i] = 0.0;
  }
  q.validate();
  return q;
}

void MediumParams::validate() const {
  if (!(gamma13 > 0)) throw NumericError("MediumParams.gamma13 must be > 0");
  if (gamma12 < 0) throw NumericError("MediumParams.gamma12 must be >= 0");
  if (omega_c < 0) throw NumericError("MediumParams.omega_c must be >= 0");
  if (density < 0) throw NumericError("MediumParams.density must be >= 0");
  if (!(k_p * k_c < 0))
    throw NumericError("MediumParams: pump and coupling must counter-propagate (k_p*k_c < 0)");
  if (!(k_s * k_as < 0))
    throw NumericError("MediumParams: Stokes and anti-Stokes must counter-propagate (k_s*k_as < 0)");
}

}  // namespace bp
