#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "biphoton/constants.hpp"

namespace bp {

struct AtomicSpecies {
  double mass = consts::rb::mass_87;                      // kg
  double d1_wavelength = 795e-9;                          // m
  double d2_wavelength = 780e-9;                          // m
  double natural_linewidth = consts::rb::natural_linewidth;  // rad/s
  double dipole_moment_d1 = consts::rb::dipole_d1;        // C m
  double dipole_moment_d2 = consts::rb::dipole_d2;        // C m
  double isotopic_purity = 0.99;
};

struct CellConfig {
  double length = 0.0127;                   // m (0.5 in)
  double inner_diameter = 0.010;            // m
  double temperature = 336.15;              // K (63 C)
  double temperature_uncertainty = 0.2;     // K
  double ground_decoherence_rate = consts::two_pi * 30e3;  // rad/s, gamma_12
  // Inhomogeneous two-photon broadening (1-sigma, rad/s) beyond the geometric
  // residual Doppler terms: unshielded Zeeman spread, transit, gradients.
  double two_photon_inhomogeneous = 0.0;
};

struct LaserConfig {
  double pump_power = -1.0;    // W, required in config documents
  double coupling_power = -1.0;  // W, required
  double pump_detuning = -consts::two_pi * 2.7e9;  // rad/s
  double coupling_detuning = 0.0;                  // rad/s
  double pump_diameter = 1.4e-3;     // m, 1/e^2
  double coupling_diameter = 1.4e-3;  // m, 1/e^2
  double mode_waist = 250e-6;        // m, biphoton mode 1/e^2 diameter
  double alignment_angle = 0.1 * consts::pi / 180.0;  // rad
  // Effective coupling-field strength factor in (0, 1]: absorbs coupling-beam
  // attenuation in the cell and Zeeman/hyperfine component averaging, neither
  // of which is modeled microscopically. Fitted by `bipsim calibrate`.
  double coupling_rabi_scale = 1.0;
};

struct FilterChannel {
  double bandwidth = 0.0;          // Hz, FWHM of the power transmission
  double transmission = 1.0;       // peak power transmission
  double extinction_db = 0.0;      // dB
  double free_spectral_range = 13.6e9;  // Hz
};

struct FilterConfig {
  FilterChannel stokes{350e6, 0.80, 60.0, 13.6e9};
  FilterChannel anti_stokes{80e6, 0.30, 40.0, 13.6e9};
};

struct DetectorConfig {
  double quantum_efficiency = 0.5;
  double fiber_coupling = 0.8;
  double dead_time = 22e-9;          // s
  double timing_jitter_sigma = 0.35e-9;  // s
  double dark_count_rate = 100.0;    // Hz
};

// Uncorrelated-photon model. Rates are effective detected click rates added to
// each channel; the optical-pumping factor multiplies the Raman term.
struct NoiseModel {
  double raman_background_as = 0.0;  // Hz, coupling-laser Raman scatter on the anti-Stokes channel
  double leakage_s = 0.0;            // Hz, residual leakage on the Stokes channel
  double dark_rate_s = -1.0;         // Hz; <0 means inherit detectors.dark_count_rate
  double dark_rate_as = -1.0;        // Hz; <0 means inherit detectors.dark_count_rate
  double optical_pumping_suppression = 1.0;  // in (0,1], multiplies raman_background_as
};

// Numerical controls for the spectral/waveform engines. Defaults are converged
// (stability under doubling is part of the test suite).
struct NumericsConfig {
  int frequency_points = 0;       // 0 = auto (>= 4096, power of two)
  int velocity_nodes = 4096;      // midpoint-rule nodes on the Gaussian velocity measure
  double velocity_span_sigmas = 7.0;
  double span_envelope_mult = 40.0;  // frequency span >= this multiple of the JSA width
  bool include_stokes_dispersion = true;
};

struct ExperimentConfig {
  AtomicSpecies species;
  CellConfig cell;
  LaserConfig lasers;
  FilterConfig filters;
  DetectorConfig detectors;
  NoiseModel noise;
  NumericsConfig numerics;
  std::optional<double> density_override;  // m^-3
  // Overall pair-rate scale, fixed against the 7 mW -> 2000 pairs/s operating
  // point by `bipsim calibrate`; see docs/config.md.
  double rate_constant = 1.0;

  double dark_rate_s() const {
    return noise.dark_rate_s >= 0 ? noise.dark_rate_s : detectors.dark_count_rate;
  }
  double dark_rate_as() const {
    return noise.dark_rate_as >= 0 ? noise.dark_rate_as : detectors.dark_count_rate;
  }
  // fiber * filter * SPCM for each channel
  double efficiency_s() const {
    return detectors.fiber_coupling * filters.stokes.transmission * detectors.quantum_efficiency;
  }
  double efficiency_as() const {
    return detectors.fiber_coupling * filters.anti_stokes.transmission *
           detectors.quantum_efficiency;
  }
};

// Parses an INI-style configuration document (sections + key = value with unit
// suffixes). Unknown sections/keys are rejected; omitted optional fields get
// the defaults above; pump_power and coupling_power are required.
// Throws ConfigError with the offending field and bound on any violation.
ExperimentConfig load_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Canonical serialization: fixed key order, SI base units, round-trips exactly.
std::string serialize_config(const ExperimentConfig& cfg);

void validate(const ExperimentConfig& cfg);

// Applies one "section.key" = value (unit-suffixed) override; same schema and
// validation as load_config.
void apply_config_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value);

// FNV-1a over the canonical serialization, as a 16-hex-digit string. Embedded
// in every CSV/JSON artifact to tie outputs to their configuration.
std::string config_fingerprint(const ExperimentConfig& cfg);

// Rubidium number density from the Alcock vapor-pressure correlation
// (solid branch below the 312.46 K melting point, liquid above), scaled by
// isotopic purity. Valid for 273 < T < 450 K.
double vapor_density(double temperature, double purity);

// Peak Rabi frequency of a Gaussian beam: Omega = d * E_peak / hbar with
// E_peak = sqrt(4 P / (pi w^2 eps0 c)), w = 1/e^2 radius.
double power_to_rabi(double power, double beam_diameter, double dipole);

// Gaussian-beam peak field amplitude, V/m.
double gaussian_peak_field(double power, double beam_diameter);

// Doppler FWHM in Hz: sqrt(8 ln2 kB T / m) / lambda.
double doppler_fwhm(double temperature, double wavelength, double mass);

}  // namespace bp
