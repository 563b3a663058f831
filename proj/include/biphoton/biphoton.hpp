#pragma once

#include <optional>
#include <string>

#include "biphoton/config.hpp"
#include "biphoton/medium.hpp"
#include "biphoton/spectrum.hpp"

namespace bp {

struct JointSpectralAmplitude {
  ComplexSpectrum spec;      // label jsa; values = kappa * Phi * filter amplitudes
  std::string fingerprint;

  void validate() const;  // finiteness + square integrability
};

// Intermediate spectra of the assembly, exposed for export and testing.
struct JsaParts {
  ComplexSpectrum chi_as, chi_s, chi3;
  ComplexSpectrum k_as, k_s, delta_k, phi;
  std::vector<double> transmission;  // anti-Stokes power transmission through the cell
  JointSpectralAmplitude jsa;
  double omega_as0 = 0.0, omega_s0 = 0.0;
};

// Unit-peak etalon power transmission with the configured FWHM (Lorentzian
// squared); the peak transmission scalar is applied in the detection chain.
double etalon_power_shape(double delta, const FilterChannel& f);

// Cost/accuracy preset for the assembly. The default is the converged
// production mode; calibrate() trims the Doppler wings and the node count,
// then reports final residuals at production quality.
struct JsaQuality {
  size_t min_points = 4096;
  int velocity_nodes_cap = 0;  // 0 = follow config
  bool wide_span = true;       // cover the Doppler absorption band
};

// Assembles the joint spectral amplitude from the Doppler-averaged medium
// response, the longitudinal phase-matching profile and the filter shapes.
// The detuning grid is auto-sized from a probe pass unless
// cfg.numerics.frequency_points pins it.
// Throws NumericError when the coupling Rabi frequency is zero or the
// envelope width cannot be resolved.
JointSpectralAmplitude joint_spectrum(const ExperimentConfig& cfg);
JsaParts joint_spectrum_parts(const ExperimentConfig& cfg);
JsaParts joint_spectrum_parts(const ExperimentConfig& cfg, const JsaQuality& quality);

struct BiphotonWaveform {
  std::vector<double> tau;           // s, uniform, tau = t_as - t_s
  std::vector<cplx> psi;             // two-photon amplitude
  std::vector<double> rate_density;  // pairs/s per s, rate_constant * |psi|^2
  std::string fingerprint;

  double step() const { return tau.size() > 1 ? tau[1] - tau[0] : 0.0; }
};

// psi(tau) = (1/2pi) sum JSA(delta) e^{-i delta tau} ddelta via FFT.
// Parseval holds to rounding; checked in tests.
BiphotonWaveform waveform_from_spectrum(const JointSpectralAmplitude& jsa,
                                        double rate_constant);

struct DecayFit {
  double tau_b = 0.0;   // s, intensity 1/e decay constant
  double stderr_s = 0.0;
};

// Weighted least squares of log-intensity over [window]. Default window runs
// from peak + 5 ns to where the signal meets max(2 x background, 1e-6 x peak).
// Throws StatsError on a degenerate window or non-decaying data.
DecayFit fit_decay(const std::vector<double>& tau, const std::vector<double>& intensity,
                   std::optional<std::pair<double, double>> window = std::nullopt,
                   double background = 0.0);

// Width between the first and last crossings of peak/e of |psi|^2.
double correlation_time_1e(const std::vector<double>& tau,
                           const std::vector<double>& intensity);

// Generated pairs/s (pre-detection): rate_constant/(2pi) * integral |JSA|^2 ddelta.
double pair_rate(const JointSpectralAmplitude& jsa, const ExperimentConfig& cfg);

struct WaveformMetrics {
  double tau_b = 0.0;          // s
  double one_over_e_time = 0.0;  // s
  double bandwidth = 0.0;      // Hz, 1/(2 pi tau_b)
  double peak_time = 0.0;      // s
  double pair_rate = 0.0;      // pairs/s
  double fit_stderr = 0.0;     // s
};

WaveformMetrics waveform_metrics(const JointSpectralAmplitude& jsa,
                                 const BiphotonWaveform& wf, const ExperimentConfig& cfg);

// FWHM of |spectrum|^2 in Hz (for the time-bandwidth check).
double intensity_fwhm_hz(const ComplexSpectrum& spec);

}  // namespace bp
