#include "biphoton/medium.hpp"

#include <cmath>

#include "biphoton/errors.hpp"
#include "biphoton/faddeeva.hpp"
#include "biphoton/kernels.hpp"
#include "biphoton/parallel.hpp"

namespace bp {

namespace {

kern::KernelParams kernel_params(const MediumParams& p) {
  kern::KernelParams kp;
  kp.k_as = p.k_as;
  kp.k_eps = p.k2;
  kp.sigma_2ph = p.sigma_2ph;
  kp.k_s = p.k_s;
  kp.k_p = p.k_p;
  kp.gamma12 = p.gamma12;
  kp.gamma13 = p.gamma13;
  kp.delta_p = p.delta_p;
  kp.delta_c = p.delta_c;
  kp.omega_c_sq_4 = 0.25 * p.omega_c * p.omega_c;
  return kp;
}

}  // namespace

double velocity_sigma(double temperature, double mass) {
  return std::sqrt(consts::k_b * temperature / mass);
}

MediumParams medium_params_from_config(const ExperimentConfig& cfg) {
  MediumParams p;
  p.density = cfg.density_override
                  ? *cfg.density_override
                  : vapor_density(cfg.cell.temperature, cfg.species.isotopic_purity);
  p.gamma13 = 0.5 * cfg.species.natural_linewidth;
  p.gamma12 = cfg.cell.ground_decoherence_rate;
  p.omega_c = cfg.lasers.coupling_rabi_scale *
              power_to_rabi(cfg.lasers.coupling_power, cfg.lasers.coupling_diameter,
                            cfg.species.dipole_moment_d1);
  p.delta_p = cfg.lasers.pump_detuning;
  p.delta_c = cfg.lasers.coupling_detuning;

  const double omega_d1 = consts::two_pi * consts::c / cfg.species.d1_wavelength;
  const double omega_d2 = consts::two_pi * consts::c / cfg.species.d2_wavelength;
  // pump & Stokes along +z, coupling & anti-Stokes along -z
  p.k_p = (omega_d2 + cfg.lasers.pump_detuning) / consts::c;
  p.k_c = -omega_d1 / consts::c;
  p.k_s = (omega_d2 + cfg.lasers.pump_detuning) / consts::c;
  p.k_as = -omega_d1 / consts::c;

  const double d1 = cfg.species.dipole_moment_d1;
  const double d2 = cfg.species.dipole_moment_d2;
  p.c_as = p.density * d1 * d1 / (consts::eps0 * consts::hbar);
  p.c_s = p.density * d2 * d2 / (consts::eps0 * consts::hbar);
  p.c3 = p.density * d1 * d1 * d2 * d2 /
         (consts::eps0 * consts::hbar * consts::hbar * consts::hbar);

  const double sigma_v = velocity_sigma(cfg.cell.temperature, cfg.species.mass);
  p.k2 = p.k_as - p.k_c;
  const double transverse = std::abs(p.k_as) * std::sin(cfg.lasers.alignment_angle) * sigma_v;
  p.sigma_2ph = std::hypot(transverse, cfg.cell.two_photon_inhomogeneous);
  p.validate();
  return p;
}

cplx eit_denominator(double delta, double velocity, const MediumParams& p) {
  const double d1 = delta - p.k_as * velocity;
  const double d2 = delta - p.delta_c - p.k2 * velocity;
  return (cplx(d1, p.gamma13) * cplx(d2, p.gamma12)) - 0.25 * p.omega_c * p.omega_c;
}

cplx chi_eit(double delta, double velocity, const MediumParams& p) {
  const double d2 = delta - p.delta_c - p.k2 * velocity;
  return p.c_as * cplx(d2, p.gamma12) / eit_denominator(delta, velocity, p);
}

cplx chi_stokes(double delta, double velocity, const MediumParams& p) {
  return p.c_s / cplx(delta + p.delta_p - p.k_s * velocity, p.gamma13);
}

cplx chi3_sfwm(double delta, double velocity, const MediumParams& p) {
  const cplx pump_leg(p.delta_p + p.k_p * velocity, p.gamma13);
  return p.c3 / (pump_leg * eit_denominator(delta, velocity, p));
}

namespace {

// <1/D>_z and <(d2+ig12)/D>_z over the Gaussian two-photon offset z; see
// kernels_scalar.cpp for the derivation.
struct SmearedCore {
  cplx inv_d;
  cplx numerator_over_d;
};

SmearedCore smeared_core(double delta, double velocity, const MediumParams& p) {
  const double d1 = delta - p.k_as * velocity;
  const double d2 = delta - p.delta_c - p.k2 * velocity;
  const double q4 = 0.25 * p.omega_c * p.omega_c;
  if (p.sigma_2ph <= 0.0) {
    const cplx den = cplx(d1, p.gamma13) * cplx(d2, p.gamma12) - q4;
    return {1.0 / den, cplx(d2, p.gamma12) / den};
  }
  const double su = 1.0 / (std::sqrt(2.0) * p.sigma_2ph);
  const cplx invd1 = 1.0 / cplx(d1, p.gamma13);
  const cplx zstar = cplx(d2, p.gamma12) - q4 * invd1;
  const cplx jfun = cplx(0.0, std::sqrt(consts::pi) * su) * faddeeva_w(su * zstar);
  return {-jfun * invd1, invd1 - q4 * invd1 * invd1 * jfun};
}

}  // namespace

cplx chi_eit_smeared(double delta, double velocity, const MediumParams& p) {
  return p.c_as * smeared_core(delta, velocity, p).numerator_over_d;
}

cplx chi3_sfwm_smeared(double delta, double velocity, const MediumParams& p) {
  const cplx pump_leg(p.delta_p + p.k_p * velocity, p.gamma13);
  return p.c3 * smeared_core(delta, velocity, p).inv_d / pump_leg;
}

ComplexSpectrum doppler_average(const std::function<cplx(double, double)>& kernel,
                                const std::vector<double>& grid,
                                const VelocityQuadrature& quad, SpectrumLabel label) {
  quad.validate();
  ComplexSpectrum out;
  out.grid = grid;
  out.values.assign(grid.size(), cplx(0.0, 0.0));
  out.label = label;
  parallel_for(grid.size(), [&](size_t j) {
    cplx acc(0.0, 0.0);
    for (size_t i = 0; i < quad.order(); ++i) {
      const cplx k = kernel(grid[j], quad.nodes[i]);
      if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
        throw NumericError("doppler_average: non-finite kernel output");
      acc += quad.weights[i] * k;
    }
    out.values[j] = acc;
  });
  return out;
}

AveragedChi doppler_average_chi(const std::vector<double>& grid,
                                const VelocityQuadrature& quad, const MediumParams& p) {
  quad.validate();
  const size_t n = grid.size();
  const size_t m = quad.order();
  const kern::KernelParams kp = kernel_params(p);

  std::vector<double> cw3_re(m), cw3_im(m);
  kern::prepare_chi3_weights(quad.nodes.data(), quad.weights.data(), m, kp,
                             cw3_re.data(), cw3_im.data());
  kern::NodeArrays nodes{quad.nodes.data(), quad.weights.data(), cw3_re.data(),
                         cw3_im.data(), m};

  std::vector<double> as_re(n), as_im(n), c3_re(n), c3_im(n), s_re(n), s_im(n);
  const auto& impl = kern::active_impl();
  // partition the detuning grid across workers; assembly is slot-wise
  parallel_for_blocks(n, 256, [&](size_t lo, size_t hi) {
    impl.accum(grid.data() + lo, hi - lo, nodes, kp, as_re.data() + lo, as_im.data() + lo,
               c3_re.data() + lo, c3_im.data() + lo, s_re.data() + lo, s_im.data() + lo);
  });

  AveragedChi out;
  out.chi_as.grid = grid;
  out.chi_as.label = SpectrumLabel::chi_as;
  out.chi_as.values.resize(n);
  out.chi3.grid = grid;
  out.chi3.label = SpectrumLabel::chi3;
  out.chi3.values.resize(n);
  out.chi_s.grid = grid;
  out.chi_s.label = SpectrumLabel::chi_s;
  out.chi_s.values.resize(n);
  const double c3n = p.c3;
  for (size_t j = 0; j < n; ++j) {
    out.chi_as.values[j] = p.c_as * cplx(as_re[j], as_im[j]);
    out.chi3.values[j] = c3n * cplx(c3_re[j], c3_im[j]);
    out.chi_s.values[j] = p.c_s * cplx(s_re[j], s_im[j]);
  }
  out.chi_as.validate();
  out.chi3.validate();
  out.chi_s.validate();
  return out;
}

ComplexSpectrum wavevector(const ComplexSpectrum& chi, double center_frequency,
                           SpectrumLabel label) {
  ComplexSpectrum k;
  k.grid = chi.grid;
  k.label = label;
  k.values.resize(chi.size());
  for (size_t j = 0; j < chi.size(); ++j) {
    // principal branch: |chi| << 1 keeps 1 + chi away from the cut, so k is
    // continuous with Re k > 0; Im k <= 0 encodes loss in the +i*gamma pole
    // convention used throughout (causal response under e^{-i delta tau})
    const cplx root = std::sqrt(cplx(1.0, 0.0) + chi.values[j]);
    k.values[j] = ((center_frequency + chi.grid[j]) / consts::c) * root;
  }
  return k;
}

ComplexSpectrum phase_mismatch(const ComplexSpectrum& k_as, const ComplexSpectrum& k_s,
                               const MediumParams& p, double omega_as0, double omega_s0,
                               double alignment_angle) {
  if (k_as.grid.size() != k_s.grid.size() || k_as.step() != k_s.step())
    throw NumericError("phase_mismatch: wavevector spectra on different grids");
  const size_t n = k_as.size();
  // Drive momentum constant: phase matched at line center in vacuum; the
  // alignment angle reduces the projected drive momentum by (1-cos) |k_p+k_c|.
  const double transverse = (1.0 - std::cos(alignment_angle)) * std::abs(p.k_p + p.k_c);
  const double k0 = (omega_as0 + omega_s0) / consts::c - transverse;

  ComplexSpectrum dk;
  dk.grid = k_as.grid;
  dk.label = SpectrumLabel::delta_k;
  dk.values.resize(n);
  for (size_t j = 0; j < n; ++j) {
    // omega_s = omega_s0 - delta  <->  reversed index on a symmetric grid
    const double ks_rev = k_s.values[n - 1 - j].real();
    dk.values[j] = cplx(k_as.values[j].real() + ks_rev - k0, 0.0);
  }
  return dk;
}

std::vector<double> absorption_coefficient(const ComplexSpectrum& k_as) {
  std::vector<double> a(k_as.size());
  for (size_t j = 0; j < k_as.size(); ++j) a[j] = -k_as.values[j].imag();
  return a;
}

ComplexSpectrum longitudinal_profile(const ComplexSpectrum& delta_k,
                                     const std::vector<double>& absorption, double length) {
  if (absorption.size() != delta_k.size())
    throw NumericError("longitudinal_profile: absorption/delta_k size mismatch");
  ComplexSpectrum phi;
  phi.grid = delta_k.grid;
  phi.label = SpectrumLabel::jsa;
  phi.values.resize(delta_k.size());
  for (size_t j = 0; j < delta_k.size(); ++j) {
    const double x = 0.5 * delta_k.values[j].real() * length;
    const double sinc = (std::abs(x) < 1e-8) ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    const double damp = std::exp(-0.5 * absorption[j] * length);
    phi.values[j] = sinc * damp * std::polar(1.0, x);
  }
  return phi;
}

std::vector<double> eit_transmission(const ComplexSpectrum& chi, double center_frequency,
                                     double length) {
  const ComplexSpectrum k = wavevector(chi, center_frequency, SpectrumLabel::k_as);
  std::vector<double> t(k.size());
  for (size_t j = 0; j < k.size(); ++j) {
    t[j] = std::exp(2.0 * k.values[j].imag() * length);
    if (t[j] > 1.0) t[j] = 1.0;
  }
  return t;
}

}  // namespace bp
