#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "biphoton/config.hpp"

namespace bp {

// Parameter sweep over coupling or pump power. `fixed` holds config-key
// overrides applied before the sweep; endtoend_duration_s > 0 adds a simulated
// g2_max column from a full detection run per point.
struct SweepSpec {
  std::string parameter;        // "coupling_power" | "pump_power"
  std::vector<double> values;   // W, positive, >= 2 entries
  std::map<std::string, std::string> fixed;
  std::vector<std::string> outputs;  // empty = all columns
  uint64_t seed = 1;
  double endtoend_duration_s = 0.0;

  void validate() const;
};

SweepSpec parse_sweep_file(const std::string& path);

struct SweepRow {
  double value = 0.0;  // W
  double tau_b = 0.0;
  double one_over_e = 0.0;
  double bandwidth = 0.0;
  double pair_rate = 0.0;
  double g2m_model = 0.0;
  double g2_max_sim = 0.0;
  double g2_max_sim_stderr = 0.0;
  bool has_sim = false;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;
  std::string fingerprint;  // of the base config with fixed overrides
};

SweepResult run_sweep(const ExperimentConfig& base, const SweepSpec& spec);

// CSV with one row per sweep value and the requested metric columns.
std::string sweep_csv(const SweepResult& result);

}  // namespace bp
