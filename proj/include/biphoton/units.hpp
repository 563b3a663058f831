#pragma once

#include <string>

namespace bp::units {

// Dimension expected by a config field. Values are stored in SI base units;
// frequency-like quantities are either plain rates (Hz) or angular (rad/s,
// where Hz-family suffixes are multiplied by 2*pi on input).
enum class Dim {
  dimensionless,
  power,         // W
  length,        // m
  time,          // s
  plain_rate,    // Hz (counts/s, bandwidths, FSR)
  angular_freq,  // rad/s (detunings, linewidths, decoherence rates)
  temperature,   // K
  angle,         // rad
  mass,          // kg
  decibel,       // dB (stored as the dB number)
  density,       // m^-3
};

// Parses "<number> [suffix]" (e.g. "27 mW", "-2.7 GHz", "63 C", "0.1 deg").
// Throws bp::ConfigError naming `field` on malformed numbers or a suffix that
// does not belong to `dim`.
double parse_quantity(const std::string& text, Dim dim, const std::string& field);

}  // namespace bp::units
