#pragma once

#include <complex>
#include <string>
#include <vector>

namespace bp {

using cplx = std::complex<double>;

enum class SpectrumLabel { chi_as, chi_s, chi3, k_as, k_s, delta_k, jsa };

const char* to_string(SpectrumLabel label);

// A complex-valued function sampled on a uniform detuning grid (rad/s),
// symmetric about zero as a set (half-offset grids allowed).
struct ComplexSpectrum {
  std::vector<double> grid;   // rad/s, strictly increasing, uniform
  std::vector<cplx> values;   // one per grid point
  SpectrumLabel label = SpectrumLabel::chi_as;

  size_t size() const { return grid.size(); }
  double step() const { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }

  // Throws NumericError if the grid is non-uniform/non-symmetric or any
  // value is non-finite.
  void validate() const;
};

// Uniform symmetric grid of n points with spacing `step`, centered on zero.
// Even n puts points at +-(k + 1/2) step, odd n includes zero.
std::vector<double> make_symmetric_grid(size_t n, double step);

// Nodes (m/s) and weights realizing the Maxwell-Boltzmann velocity measure of
// a given sigma_v = sqrt(kB T / m). Weights sum to 1; nodes are symmetric.
struct VelocityQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;

  size_t order() const { return nodes.size(); }
  void validate() const;

  // Gauss-Hermite rule. Exact for polynomial-times-Gaussian integrands;
  // appropriate only for kernels smooth on the velocity scale sigma_v.
  static VelocityQuadrature gauss_hermite(size_t order, double sigma_v);

  // Uniform midpoint rule on [-span_sigmas, span_sigmas] * sigma_v with
  // Gaussian weights (renormalized). Resolves the near-real poles of the
  // susceptibility kernels once the node spacing is below the pole depth
  // gamma13 / k; production default.
  static VelocityQuadrature gaussian_midpoint(size_t order, double sigma_v,
                                              double span_sigmas = 7.0);
};

// Medium parameters for the susceptibility kernels. Wavevectors are signed
// projections on the cell axis: pump and Stokes propagate one way, coupling
// and anti-Stokes the other (backward phase matching).
struct MediumParams {
  double density = 0.0;   // m^-3
  double gamma13 = 0.0;   // rad/s, excited-state coherence decay (Gamma/2)
  double gamma12 = 0.0;   // rad/s, ground-state coherence decay
  double omega_c = 0.0;   // rad/s, coupling Rabi frequency
  double delta_p = 0.0;   // rad/s, pump one-photon detuning
  double delta_c = 0.0;   // rad/s, coupling detuning (shifts two-photon resonance)
  double k_p = 0.0;       // rad/m, signed
  double k_c = 0.0;       // rad/m, signed
  double k_s = 0.0;       // rad/m, signed
  double k_as = 0.0;      // rad/m, signed
  // Collinear two-photon Doppler residual k_as - k_c (signed), and the
  // 1-sigma Gaussian spread of the two-photon detuning from velocity
  // components transverse to the axis (alignment angle) plus any configured
  // inhomogeneity; the spread is averaged analytically (Faddeeva).
  double k2 = 0.0;        // rad/m
  double sigma_2ph = 0.0; // rad/s

  // chi normalization N |d|^2 / (eps0 hbar) for the anti-Stokes (D1) and
  // Stokes (D2) legs, rad/s each, and the third-order scale
  // N d1^2 d2^2 / (eps0 hbar^3).
  double c_as = 0.0;
  double c_s = 0.0;
  double c3 = 0.0;

  void validate() const;  // throws NumericError naming the violated bound
};

}  // namespace bp
