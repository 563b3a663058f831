#include "biphoton/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "biphoton/errors.hpp"
#include "biphoton/harness.hpp"
#include "biphoton/units.hpp"

namespace bp {

void SweepSpec::validate() const {
  if (parameter != "coupling_power" && parameter != "pump_power")
    throw ConfigError("sweep parameter must be coupling_power or pump_power");
  if (values.size() < 2) throw ConfigError("sweep needs at least 2 values");
  for (double v : values)
    if (!(v > 0)) throw ConfigError("sweep values must be positive");
  static const std::vector<std::string> known = {
      "value_mW",   "tau_b_ns",      "one_over_e_ns", "bandwidth_MHz",
      "pair_rate_per_s", "g2m_model", "g2_max_sim",    "g2_max_sim_stderr"};
  for (const auto& o : outputs)
    if (std::find(known.begin(), known.end(), o) == known.end())
      throw ConfigError("unknown sweep output column '" + o + "'");
}

SweepSpec parse_sweep_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open sweep spec '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("sweep spec: ") + e.what());
  }
  SweepSpec spec;
  spec.parameter = j.at("parameter").get<std::string>();
  for (const auto& v : j.at("values")) {
    if (v.is_number())
      spec.values.push_back(v.get<double>());
    else
      spec.values.push_back(
          units::parse_quantity(v.get<std::string>(), units::Dim::power, "values"));
  }
  if (j.contains("fixed"))
    for (const auto& [key, val] : j.at("fixed").items())
      spec.fixed[key] = val.is_string() ? val.get<std::string>() : val.dump();
  if (j.contains("outputs"))
    for (const auto& o : j.at("outputs")) spec.outputs.push_back(o.get<std::string>());
  if (j.contains("seed")) spec.seed = j.at("seed").get<uint64_t>();
  if (j.contains("endtoend_duration_s"))
    spec.endtoend_duration_s = j.at("endtoend_duration_s").get<double>();
  spec.validate();
  return spec;
}

SweepResult run_sweep(const ExperimentConfig& base, const SweepSpec& spec) {
  spec.validate();
  ExperimentConfig cfg = base;
  for (const auto& [key, val] : spec.fixed) apply_config_override(cfg, key, val);
  validate(cfg);

  SweepResult result;
  result.spec = spec;
  result.fingerprint = config_fingerprint(cfg);
  result.rows.resize(spec.values.size());

  for (size_t i = 0; i < spec.values.size(); ++i) {
    ExperimentConfig point = cfg;
    if (spec.parameter == "coupling_power")
      point.lasers.coupling_power = spec.values[i];
    else
      point.lasers.pump_power = spec.values[i];

    SweepRow row;
    row.value = spec.values[i];
    const WaveformRun run = run_waveform(point, "");
    row.tau_b = run.metrics.tau_b;
    row.one_over_e = run.metrics.one_over_e_time;
    row.bandwidth = run.metrics.bandwidth;
    row.pair_rate = run.metrics.pair_rate;
    row.g2m_model = g2m_rate_ratio_model(point, run.metrics.pair_rate, run.waveform);
    if (spec.endtoend_duration_s > 0) {
      const EndToEndRun e2e =
          run_endtoend(point, spec.endtoend_duration_s,
                       derive_seed(spec.seed, "sweep-" + std::to_string(i)), "");
      row.g2_max_sim = e2e.analysis.g2.g2_max.value;
      row.g2_max_sim_stderr = e2e.analysis.g2.g2_max.u;
      row.has_sim = true;
    }
    result.rows[i] = row;
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::vector<std::string> cols = result.spec.outputs;
  if (cols.empty()) {
    cols = {"value_mW", "tau_b_ns", "one_over_e_ns", "bandwidth_MHz", "pair_rate_per_s",
            "g2m_model"};
    if (result.spec.endtoend_duration_s > 0) {
      cols.push_back("g2_max_sim");
      cols.push_back("g2_max_sim_stderr");
    }
  }
  std::ostringstream o;
  o << "# sweep: " << result.spec.parameter << "\n";
  o << "# fingerprint: " << result.fingerprint << "\n";
  for (size_t c = 0; c < cols.size(); ++c) o << cols[c] << (c + 1 < cols.size() ? "," : "\n");
  char buf[40];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.10g", v);
    o << buf;
  };
  for (const auto& row : result.rows) {
    for (size_t c = 0; c < cols.size(); ++c) {
      const std::string& col = cols[c];
      if (col == "value_mW") emit(row.value * 1e3);
      else if (col == "tau_b_ns") emit(row.tau_b * 1e9);
      else if (col == "one_over_e_ns") emit(row.one_over_e * 1e9);
      else if (col == "bandwidth_MHz") emit(row.bandwidth / 1e6);
      else if (col == "pair_rate_per_s") emit(row.pair_rate);
      else if (col == "g2m_model") emit(row.g2m_model);
      else if (col == "g2_max_sim") emit(row.g2_max_sim);
      else if (col == "g2_max_sim_stderr") emit(row.g2_max_sim_stderr);
      o << (c + 1 < cols.size() ? "," : "\n");
    }
  }
  return o.str();
}

}  // namespace bp
