#include "biphoton/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace bp {

using units::Dim;

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

struct Field {
  Dim dim;
  std::function<void(ExperimentConfig&, double)> set;
};

// section.key -> (dimension, setter). The table is the schema; anything not
// listed here is rejected.
const std::map<std::string, Field>& field_table() {
  static const std::map<std::string, Field> table = {
      {"species.mass", {Dim::mass, [](auto& c, double v) { c.species.mass = v; }}},
      {"species.d1_wavelength", {Dim::length, [](auto& c, double v) { c.species.d1_wavelength = v; }}},
      {"species.d2_wavelength", {Dim::length, [](auto& c, double v) { c.species.d2_wavelength = v; }}},
      {"species.natural_linewidth", {Dim::angular_freq, [](auto& c, double v) { c.species.natural_linewidth = v; }}},
      {"species.dipole_d1", {Dim::dimensionless, [](auto& c, double v) { c.species.dipole_moment_d1 = v; }}},
      {"species.dipole_d2", {Dim::dimensionless, [](auto& c, double v) { c.species.dipole_moment_d2 = v; }}},
      {"species.isotopic_purity", {Dim::dimensionless, [](auto& c, double v) { c.species.isotopic_purity = v; }}},

      {"cell.length", {Dim::length, [](auto& c, double v) { c.cell.length = v; }}},
      {"cell.inner_diameter", {Dim::length, [](auto& c, double v) { c.cell.inner_diameter = v; }}},
      {"cell.temperature", {Dim::temperature, [](auto& c, double v) { c.cell.temperature = v; }}},
      {"cell.temperature_uncertainty", {Dim::dimensionless, [](auto& c, double v) { c.cell.temperature_uncertainty = v; }}},
      {"cell.ground_decoherence", {Dim::angular_freq, [](auto& c, double v) { c.cell.ground_decoherence_rate = v; }}},
      {"cell.two_photon_inhomogeneous", {Dim::angular_freq, [](auto& c, double v) { c.cell.two_photon_inhomogeneous = v; }}},

      {"lasers.pump_power", {Dim::power, [](auto& c, double v) { c.lasers.pump_power = v; }}},
      {"lasers.coupling_power", {Dim::power, [](auto& c, double v) { c.lasers.coupling_power = v; }}},
      {"lasers.pump_detuning", {Dim::angular_freq, [](auto& c, double v) { c.lasers.pump_detuning = v; }}},
      {"lasers.coupling_detuning", {Dim::angular_freq, [](auto& c, double v) { c.lasers.coupling_detuning = v; }}},
      {"lasers.pump_diameter", {Dim::length, [](auto& c, double v) { c.lasers.pump_diameter = v; }}},
      {"lasers.coupling_diameter", {Dim::length, [](auto& c, double v) { c.lasers.coupling_diameter = v; }}},
      {"lasers.mode_waist", {Dim::length, [](auto& c, double v) { c.lasers.mode_waist = v; }}},
      {"lasers.alignment_angle", {Dim::angle, [](auto& c, double v) { c.lasers.alignment_angle = v; }}},
      {"lasers.coupling_rabi_scale", {Dim::dimensionless, [](auto& c, double v) { c.lasers.coupling_rabi_scale = v; }}},

      {"filter.stokes.bandwidth", {Dim::plain_rate, [](auto& c, double v) { c.filters.stokes.bandwidth = v; }}},
      {"filter.stokes.transmission", {Dim::dimensionless, [](auto& c, double v) { c.filters.stokes.transmission = v; }}},
      {"filter.stokes.extinction", {Dim::decibel, [](auto& c, double v) { c.filters.stokes.extinction_db = v; }}},
      {"filter.stokes.free_spectral_range", {Dim::plain_rate, [](auto& c, double v) { c.filters.stokes.free_spectral_range = v; }}},
      {"filter.anti_stokes.bandwidth", {Dim::plain_rate, [](auto& c, double v) { c.filters.anti_stokes.bandwidth = v; }}},
      {"filter.anti_stokes.transmission", {Dim::dimensionless, [](auto& c, double v) { c.filters.anti_stokes.transmission = v; }}},
      {"filter.anti_stokes.extinction", {Dim::decibel, [](auto& c, double v) { c.filters.anti_stokes.extinction_db = v; }}},
      {"filter.anti_stokes.free_spectral_range", {Dim::plain_rate, [](auto& c, double v) { c.filters.anti_stokes.free_spectral_range = v; }}},

      {"detectors.quantum_efficiency", {Dim::dimensionless, [](auto& c, double v) { c.detectors.quantum_efficiency = v; }}},
      {"detectors.fiber_coupling", {Dim::dimensionless, [](auto& c, double v) { c.detectors.fiber_coupling = v; }}},
      {"detectors.dead_time", {Dim::time, [](auto& c, double v) { c.detectors.dead_time = v; }}},
      {"detectors.timing_jitter", {Dim::time, [](auto& c, double v) { c.detectors.timing_jitter_sigma = v; }}},
      {"detectors.dark_count_rate", {Dim::plain_rate, [](auto& c, double v) { c.detectors.dark_count_rate = v; }}},

      {"noise.raman_background", {Dim::plain_rate, [](auto& c, double v) { c.noise.raman_background_as = v; }}},
      {"noise.stokes_leakage", {Dim::plain_rate, [](auto& c, double v) { c.noise.leakage_s = v; }}},
      {"noise.dark_rate_stokes", {Dim::plain_rate, [](auto& c, double v) { c.noise.dark_rate_s = v; }}},
      {"noise.dark_rate_anti_stokes", {Dim::plain_rate, [](auto& c, double v) { c.noise.dark_rate_as = v; }}},
      {"noise.optical_pumping_suppression", {Dim::dimensionless, [](auto& c, double v) { c.noise.optical_pumping_suppression = v; }}},

      {"medium.density", {Dim::density, [](auto& c, double v) { c.density_override = v; }}},
      {"medium.rate_constant", {Dim::dimensionless, [](auto& c, double v) { c.rate_constant = v; }}},

      {"numerics.frequency_points", {Dim::dimensionless, [](auto& c, double v) { c.numerics.frequency_points = static_cast<int>(v); }}},
      {"numerics.velocity_nodes", {Dim::dimensionless, [](auto& c, double v) { c.numerics.velocity_nodes = static_cast<int>(v); }}},
      {"numerics.velocity_span_sigmas", {Dim::dimensionless, [](auto& c, double v) { c.numerics.velocity_span_sigmas = v; }}},
      {"numerics.span_envelope_mult", {Dim::dimensionless, [](auto& c, double v) { c.numerics.span_envelope_mult = v; }}},
      {"numerics.include_stokes_dispersion", {Dim::dimensionless, [](auto& c, double v) { c.numerics.include_stokes_dispersion = v != 0.0; }}},
  };
  return table;
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig load_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  bool pump_set = false, coupling_set = false;

  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      check(line.back() == ']', "line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      check(!section.empty(), "line " + std::to_string(lineno) + ": empty section name");
      continue;
    }

    size_t eq = line.find('=');
    check(eq != std::string::npos, "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    check(!section.empty(), "line " + std::to_string(lineno) + ": key '" + key + "' outside any section");

    std::string full = section + "." + key;
    auto it = field_table().find(full);
    check(it != field_table().end(), "unknown key '" + full + "'");

    if (full == "numerics.include_stokes_dispersion") {
      if (value == "true" || value == "yes") value = "1";
      if (value == "false" || value == "no") value = "0";
    }
    it->second.set(cfg, units::parse_quantity(value, it->second.dim, full));
    if (full == "lasers.pump_power") pump_set = true;
    if (full == "lasers.coupling_power") coupling_set = true;
  }

  check(pump_set, "lasers.pump_power required");
  check(coupling_set, "lasers.coupling_power required");
  validate(cfg);
  return cfg;
}

void apply_config_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value) {
  auto it = field_table().find(key);
  check(it != field_table().end(), "unknown key '" + key + "'");
  it->second.set(cfg, units::parse_quantity(value, it->second.dim, key));
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  const auto& sp = cfg.species;
  check(sp.mass > 0, "AtomicSpecies.mass must be > 0");
  check(sp.d1_wavelength > 700e-9 && sp.d1_wavelength < 900e-9,
        "AtomicSpecies.d1_wavelength must be in (700 nm, 900 nm)");
  check(sp.d2_wavelength > 700e-9 && sp.d2_wavelength < 900e-9,
        "AtomicSpecies.d2_wavelength must be in (700 nm, 900 nm)");
  check(sp.natural_linewidth > 0, "AtomicSpecies.natural_linewidth must be > 0");
  check(sp.dipole_moment_d1 > 0 && sp.dipole_moment_d2 > 0,
        "AtomicSpecies.dipole moments must be > 0");
  check(sp.isotopic_purity > 0 && sp.isotopic_purity <= 1,
        "AtomicSpecies.isotopic_purity must be in (0, 1]");

  check(cfg.cell.length > 0, "CellConfig.length must be > 0");
  check(cfg.cell.inner_diameter > 0, "CellConfig.inner_diameter must be > 0");
  check(cfg.cell.temperature > 273, "CellConfig.temperature must be > 273 K");
  check(cfg.cell.ground_decoherence_rate >= 0, "CellConfig.ground_decoherence must be >= 0");
  check(cfg.cell.two_photon_inhomogeneous >= 0, "CellConfig.two_photon_inhomogeneous must be >= 0");

  check(cfg.lasers.pump_power >= 0, "LaserConfig.pump_power must be >= 0");
  check(cfg.lasers.coupling_power >= 0, "LaserConfig.coupling_power must be >= 0");
  check(cfg.lasers.pump_diameter > 0, "LaserConfig.pump_diameter must be > 0");
  check(cfg.lasers.coupling_diameter > 0, "LaserConfig.coupling_diameter must be > 0");
  check(cfg.lasers.mode_waist > 0, "LaserConfig.mode_waist must be > 0");
  check(cfg.lasers.coupling_rabi_scale > 0 && cfg.lasers.coupling_rabi_scale <= 1,
        "LaserConfig.coupling_rabi_scale must be in (0, 1]");

  for (const auto* f : {&cfg.filters.stokes, &cfg.filters.anti_stokes}) {
    const char* which = (f == &cfg.filters.stokes) ? "stokes" : "anti_stokes";
    check(f->bandwidth > 0, std::string("FilterConfig.") + which + ".bandwidth must be > 0");
    check(f->transmission > 0 && f->transmission <= 1,
          std::string("FilterConfig.") + which + ".transmission must be in (0, 1]");
    check(f->free_spectral_range > 0,
          std::string("FilterConfig.") + which + ".free_spectral_range must be > 0");
  }

  check(cfg.detectors.quantum_efficiency > 0 && cfg.detectors.quantum_efficiency <= 1,
        "DetectorConfig.quantum_efficiency must be in (0, 1]");
  check(cfg.detectors.fiber_coupling > 0 && cfg.detectors.fiber_coupling <= 1,
        "DetectorConfig.fiber_coupling must be in (0, 1]");
  check(cfg.detectors.dead_time >= 0, "DetectorConfig.dead_time must be >= 0");
  check(cfg.detectors.timing_jitter_sigma >= 0, "DetectorConfig.timing_jitter must be >= 0");
  check(cfg.detectors.dark_count_rate >= 0, "DetectorConfig.dark_count_rate must be >= 0");

  check(cfg.noise.raman_background_as >= 0, "NoiseModel.raman_background must be >= 0");
  check(cfg.noise.leakage_s >= 0, "NoiseModel.stokes_leakage must be >= 0");
  check(cfg.noise.optical_pumping_suppression > 0 && cfg.noise.optical_pumping_suppression <= 1,
        "NoiseModel.optical_pumping_suppression must be in (0, 1]");

  if (cfg.density_override)
    check(*cfg.density_override >= 0, "medium.density must be >= 0");
  check(cfg.rate_constant > 0, "medium.rate_constant must be > 0");

  const auto& nm = cfg.numerics;
  check(nm.frequency_points == 0 || nm.frequency_points >= 256,
        "numerics.frequency_points must be 0 (auto) or >= 256");
  check(nm.velocity_nodes >= 64, "numerics.velocity_nodes must be >= 64");
  check(nm.velocity_span_sigmas >= 4, "numerics.velocity_span_sigmas must be >= 4");
  check(nm.span_envelope_mult >= 10, "numerics.span_envelope_mult must be >= 10");
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream o;
  o << "[species]\n"
    << "mass = " << fmt(cfg.species.mass) << " kg\n"
    << "d1_wavelength = " << fmt(cfg.species.d1_wavelength) << " m\n"
    << "d2_wavelength = " << fmt(cfg.species.d2_wavelength) << " m\n"
    << "natural_linewidth = " << fmt(cfg.species.natural_linewidth) << " rad/s\n"
    << "dipole_d1 = " << fmt(cfg.species.dipole_moment_d1) << "\n"
    << "dipole_d2 = " << fmt(cfg.species.dipole_moment_d2) << "\n"
    << "isotopic_purity = " << fmt(cfg.species.isotopic_purity) << "\n";
  o << "[cell]\n"
    << "length = " << fmt(cfg.cell.length) << " m\n"
    << "inner_diameter = " << fmt(cfg.cell.inner_diameter) << " m\n"
    << "temperature = " << fmt(cfg.cell.temperature) << " K\n"
    << "temperature_uncertainty = " << fmt(cfg.cell.temperature_uncertainty) << "\n"
    << "ground_decoherence = " << fmt(cfg.cell.ground_decoherence_rate) << " rad/s\n"
    << "two_photon_inhomogeneous = " << fmt(cfg.cell.two_photon_inhomogeneous) << " rad/s\n";
  o << "[lasers]\n"
    << "pump_power = " << fmt(cfg.lasers.pump_power) << " W\n"
    << "coupling_power = " << fmt(cfg.lasers.coupling_power) << " W\n"
    << "pump_detuning = " << fmt(cfg.lasers.pump_detuning) << " rad/s\n"
    << "coupling_detuning = " << fmt(cfg.lasers.coupling_detuning) << " rad/s\n"
    << "pump_diameter = " << fmt(cfg.lasers.pump_diameter) << " m\n"
    << "coupling_diameter = " << fmt(cfg.lasers.coupling_diameter) << " m\n"
    << "mode_waist = " << fmt(cfg.lasers.mode_waist) << " m\n"
    << "alignment_angle = " << fmt(cfg.lasers.alignment_angle) << " rad\n"
    << "coupling_rabi_scale = " << fmt(cfg.lasers.coupling_rabi_scale) << "\n";
  for (const auto* f : {&cfg.filters.stokes, &cfg.filters.anti_stokes}) {
    o << (f == &cfg.filters.stokes ? "[filter.stokes]\n" : "[filter.anti_stokes]\n")
      << "bandwidth = " << fmt(f->bandwidth) << " Hz\n"
      << "transmission = " << fmt(f->transmission) << "\n"
      << "extinction = " << fmt(f->extinction_db) << " dB\n"
      << "free_spectral_range = " << fmt(f->free_spectral_range) << " Hz\n";
  }
  o << "[detectors]\n"
    << "quantum_efficiency = " << fmt(cfg.detectors.quantum_efficiency) << "\n"
    << "fiber_coupling = " << fmt(cfg.detectors.fiber_coupling) << "\n"
    << "dead_time = " << fmt(cfg.detectors.dead_time) << " s\n"
    << "timing_jitter = " << fmt(cfg.detectors.timing_jitter_sigma) << " s\n"
    << "dark_count_rate = " << fmt(cfg.detectors.dark_count_rate) << " Hz\n";
  o << "[noise]\n"
    << "raman_background = " << fmt(cfg.noise.raman_background_as) << " Hz\n"
    << "stokes_leakage = " << fmt(cfg.noise.leakage_s) << " Hz\n"
    << "dark_rate_stokes = " << fmt(cfg.noise.dark_rate_s) << " Hz\n"
    << "dark_rate_anti_stokes = " << fmt(cfg.noise.dark_rate_as) << " Hz\n"
    << "optical_pumping_suppression = " << fmt(cfg.noise.optical_pumping_suppression) << "\n";
  o << "[medium]\n";
  if (cfg.density_override) o << "density = " << fmt(*cfg.density_override) << " m^-3\n";
  o << "rate_constant = " << fmt(cfg.rate_constant) << "\n";
  o << "[numerics]\n"
    << "frequency_points = " << cfg.numerics.frequency_points << "\n"
    << "velocity_nodes = " << cfg.numerics.velocity_nodes << "\n"
    << "velocity_span_sigmas = " << fmt(cfg.numerics.velocity_span_sigmas) << "\n"
    << "span_envelope_mult = " << fmt(cfg.numerics.span_envelope_mult) << "\n"
    << "include_stokes_dispersion = " << (cfg.numerics.include_stokes_dispersion ? 1 : 0) << "\n";
  return o.str();
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
  const std::string s = serialize_config(cfg);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double vapor_density(double temperature, double purity) {
  if (!(temperature > 273.0 && temperature < 450.0))
    throw ConfigError("vapor_density: temperature " + fmt(temperature) +
                      " K outside validated range (273, 450)");
  if (!(purity >= 0 && purity <= 1))
    throw ConfigError("vapor_density: purity must be in [0, 1]");
  // Alcock et al. correlation for Rb, log10(P/atm) converted to torr form
  // (as tabulated by Steck, "Rubidium 87 D Line Data").
  const double T = temperature;
  double log10_p_torr;
  if (T < consts::rb::melting_point) {
    log10_p_torr = -94.04826 - 1961.258 / T - 0.03771687 * T + 42.57526 * std::log10(T);
  } else {
    log10_p_torr = 15.88253 - 4529.635 / T + 0.00058663 * T - 2.99138 * std::log10(T);
  }
  const double pressure = std::pow(10.0, log10_p_torr) * consts::torr;
  return purity * pressure / (consts::k_b * T);
}

double gaussian_peak_field(double power, double beam_diameter) {
  const double w = 0.5 * beam_diameter;
  const double peak_intensity = 2.0 * power / (consts::pi * w * w);
  return std::sqrt(2.0 * peak_intensity / (consts::eps0 * consts::c));
}

double power_to_rabi(double power, double beam_diameter, double dipole) {
  if (power < 0) throw ConfigError("power_to_rabi: power must be >= 0");
  if (beam_diameter <= 0) throw ConfigError("power_to_rabi: beam_diameter must be > 0");
  return dipole * gaussian_peak_field(power, beam_diameter) / consts::hbar;
}

double doppler_fwhm(double temperature, double wavelength, double mass) {
  if (temperature < 0) throw ConfigError("doppler_fwhm: temperature must be >= 0");
  return std::sqrt(8.0 * std::log(2.0) * consts::k_b * temperature / mass) / wavelength;
}

}  // namespace bp
