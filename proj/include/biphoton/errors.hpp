#pragma once

#include <stdexcept>
#include <string>

namespace bp {

// Exit-code contract used by the CLI: 0 success, 2 config error,
// 3 numerical error, 4 statistics error.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct StatsError : std::runtime_error {
  explicit StatsError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bp
