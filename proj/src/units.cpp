#include "biphoton/units.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <vector>

#include "biphoton/constants.hpp"
#include "biphoton/errors.hpp"

namespace bp::units {
namespace {

struct Suffix {
  const char* name;
  Dim dim;
  double scale;
  double offset = 0.0;
};

// Angular-frequency fields accept Hz-family suffixes and absorb the 2*pi.
const std::vector<Suffix>& suffix_table() {
  using consts::two_pi;
  static const std::vector<Suffix> table = {
      {"W", Dim::power, 1.0},
      {"mW", Dim::power, 1e-3},
      {"uW", Dim::power, 1e-6},
      {"kW", Dim::power, 1e3},
      {"m", Dim::length, 1.0},
      {"cm", Dim::length, 1e-2},
      {"mm", Dim::length, 1e-3},
      {"um", Dim::length, 1e-6},
      {"nm", Dim::length, 1e-9},
      {"in", Dim::length, 0.0254},
      {"s", Dim::time, 1.0},
      {"ms", Dim::time, 1e-3},
      {"us", Dim::time, 1e-6},
      {"ns", Dim::time, 1e-9},
      {"ps", Dim::time, 1e-12},
      {"Hz", Dim::plain_rate, 1.0},
      {"kHz", Dim::plain_rate, 1e3},
      {"MHz", Dim::plain_rate, 1e6},
      {"GHz", Dim::plain_rate, 1e9},
      {"THz", Dim::plain_rate, 1e12},
      {"Hz", Dim::angular_freq, two_pi},
      {"kHz", Dim::angular_freq, two_pi * 1e3},
      {"MHz", Dim::angular_freq, two_pi * 1e6},
      {"GHz", Dim::angular_freq, two_pi * 1e9},
      {"THz", Dim::angular_freq, two_pi * 1e12},
      {"rad/s", Dim::angular_freq, 1.0},
      {"K", Dim::temperature, 1.0},
      {"C", Dim::temperature, 1.0, consts::zero_celsius},
      {"rad", Dim::angle, 1.0},
      {"mrad", Dim::angle, 1e-3},
      {"deg", Dim::angle, consts::pi / 180.0},
      {"kg", Dim::mass, 1.0},
      {"u", Dim::mass, consts::amu},
      {"dB", Dim::decibel, 1.0},
      {"%", Dim::dimensionless, 1e-2},
      {"m^-3", Dim::density, 1.0},
      {"/m3", Dim::density, 1.0},
      {"cm^-3", Dim::density, 1e6},
      {"/cm3", Dim::density, 1e6},
  };
  return table;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_quantity(const std::string& text, Dim dim, const std::string& field) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError(field + ": empty value");

  const char* begin = t.c_str();
  char* num_end = nullptr;
  double value = std::strtod(begin, &num_end);
  if (num_end == begin) throw ConfigError(field + ": malformed number '" + t + "'");

  std::string suffix = trim(t.substr(static_cast<size_t>(num_end - begin)));
  if (suffix.empty()) {
    if (dim == Dim::temperature)
      throw ConfigError(field + ": temperature needs a unit (K or C)");
    return value;  // bare numbers are SI base units (or dimensionless)
  }

  for (const auto& s : suffix_table()) {
    if (s.dim == dim && suffix == s.name) return value * s.scale + s.offset;
  }
  throw ConfigError(field + ": unit '" + suffix + "' not valid here");
}

}  // namespace bp::units
