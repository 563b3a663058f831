#pragma once

#include <functional>

#include "biphoton/config.hpp"
#include "biphoton/spectrum.hpp"

namespace bp {

// Builds the signed-wavevector medium description for the backward geometry:
// pump and Stokes along +z, coupling and anti-Stokes along -z, which is the
// sign assignment compatible with backward phase matching at 780/795 nm.
MediumParams medium_params_from_config(const ExperimentConfig& cfg);

// sigma_v = sqrt(kB T / m)
double velocity_sigma(double temperature, double mass);

// Lambda-EIT response of the anti-Stokes leg for one velocity class:
//   chi = C (d2 + i g12) / ((d1 + i g13)(d2 + i g12) - Oc^2/4)
// d1 = delta - k_as v, d2 = delta - delta_c - (k_as - k_c) v.
cplx chi_eit(double delta, double velocity, const MediumParams& p);

// Far-detuned two-level tail seen by the Stokes photon:
//   chi_s = C' / (delta + delta_p - k_s v + i g13)
cplx chi_stokes(double delta, double velocity, const MediumParams& p);

// Third-order SFWM coupling; shares the EIT denominator with chi_eit and adds
// the pump-detuned prefactor 1 / (delta_p + k_p v + i g13).
cplx chi3_sfwm(double delta, double velocity, const MediumParams& p);

// EIT denominator D(delta, v); shared pole structure of chi_eit and chi3_sfwm.
cplx eit_denominator(double delta, double velocity, const MediumParams& p);

// chi_eit / chi3_sfwm averaged over the Gaussian two-photon-detuning spread
// p.sigma_2ph (analytic, one Faddeeva evaluation). Equal to the plain forms
// when sigma_2ph == 0.
cplx chi_eit_smeared(double delta, double velocity, const MediumParams& p);
cplx chi3_sfwm_smeared(double delta, double velocity, const MediumParams& p);

// Generic velocity average: value(delta) = sum_i w_i * kernel(delta, v_i).
// Throws NumericError on a non-finite kernel output.
ComplexSpectrum doppler_average(const std::function<cplx(double, double)>& kernel,
                                const std::vector<double>& grid,
                                const VelocityQuadrature& quad,
                                SpectrumLabel label);

// All three Doppler-averaged susceptibilities in one pass through the
// runtime-selected accumulation kernel (scalar or AVX2). Equivalent to three
// doppler_average calls; this is the production path.
struct AveragedChi {
  ComplexSpectrum chi_as;
  ComplexSpectrum chi3;
  ComplexSpectrum chi_s;
};
AveragedChi doppler_average_chi(const std::vector<double>& grid,
                                const VelocityQuadrature& quad, const MediumParams& p);

// k(delta) = ((omega0 + delta)/c) sqrt(1 + chi), principal branch. In the
// +i*gamma pole convention the passive medium has Im chi <= 0, so loss is
// -Im k >= 0.
ComplexSpectrum wavevector(const ComplexSpectrum& chi, double center_frequency,
                           SpectrumLabel label);

// Longitudinal phase mismatch Delta_k(delta) = Re k_as(delta) + Re k_s(-delta) - K0,
// with K0 fixed so that the pair is phase matched at line center in vacuum,
// plus the constant transverse correction from the alignment angle.
// Energy conservation pairs omega_as0 + delta with omega_s0 - delta, so the
// Stokes spectrum enters grid-reversed.
ComplexSpectrum phase_mismatch(const ComplexSpectrum& k_as, const ComplexSpectrum& k_s,
                               const MediumParams& p, double omega_as0, double omega_s0,
                               double alignment_angle);

// Field loss coefficient alpha(delta) = -Im k_as(delta) >= 0, carried
// separately from Delta_k.
std::vector<double> absorption_coefficient(const ComplexSpectrum& k_as);

// Phi(delta) = sinc(dk L/2) exp(i dk L/2) exp(-alpha L/2), sinc(0) = 1.
ComplexSpectrum longitudinal_profile(const ComplexSpectrum& delta_k,
                                     const std::vector<double>& absorption, double length);

// Power transmission T(delta) = exp(-2 |Im k(delta)| L) in [0, 1].
std::vector<double> eit_transmission(const ComplexSpectrum& chi, double center_frequency,
                                     double length);

}  // namespace bp
