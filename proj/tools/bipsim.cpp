// bipsim: biphoton-source simulator and click-stream analysis front end.
//
// Subcommands: waveform, sweep, endtoend, analyze, calibrate.
// Exit codes: 0 success, 2 configuration error, 3 numerical error,
// 4 statistics error. BIPHOTON_WORKERS caps the worker pool.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "biphoton/calibrate.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/harness.hpp"
#include "biphoton/io.hpp"
#include "biphoton/sweep.hpp"

namespace {

using namespace bp;

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

int cmd_waveform(const std::string& config_path, const std::string& out_dir) {
  const ExperimentConfig cfg = load_config_file(config_path);
  const WaveformRun run = run_waveform(cfg, out_dir);
  std::printf("fingerprint        %s\n", run.fingerprint.c_str());
  std::printf("tau_b              %.3f ns (+- %.3f)\n", run.metrics.tau_b * 1e9,
              run.metrics.fit_stderr * 1e9);
  std::printf("1/e correlation    %.3f ns\n", run.metrics.one_over_e_time * 1e9);
  std::printf("bandwidth          %.4f MHz\n", run.metrics.bandwidth / 1e6);
  std::printf("pair rate          %.1f /s\n", run.metrics.pair_rate);
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& spec_path,
              const std::string& out_dir) {
  const ExperimentConfig cfg = load_config_file(config_path);
  const SweepSpec spec = parse_sweep_file(spec_path);
  const SweepResult result = run_sweep(cfg, spec);
  std::filesystem::create_directories(out_dir);
  atomic_write_text(join(out_dir, "sweep.csv"), sweep_csv(result));
  std::printf("%zu sweep points -> %s\n", result.rows.size(),
              join(out_dir, "sweep.csv").c_str());
  return 0;
}

int cmd_endtoend(const std::string& config_path, double duration, uint64_t seed,
                 const std::string& out_dir) {
  const ExperimentConfig cfg = load_config_file(config_path);
  const EndToEndRun run = run_endtoend(cfg, duration, seed, out_dir);
  std::printf("generated rate     %.1f pairs/s\n", run.configured_rate);
  std::printf("stokes clicks      %zu\n", run.streams[0].t_ps.size());
  std::printf("anti-stokes clicks %zu\n", run.streams[1].t_ps.size());
  std::printf("g2 max             %.2f +- %.2f\n", run.analysis.g2.g2_max.value,
              run.analysis.g2.g2_max.u);
  std::printf("backed-out rate    %.1f pairs/s\n", run.analysis.backed_out_rate);
  std::printf("CS violation       %.1f +- %.1f (%s)\n",
              run.analysis.cs.violation_factor.value, run.analysis.cs.violation_factor.u,
              run.analysis.cs.violated ? "violated" : "not violated");
  return 0;
}

int cmd_analyze(const std::string& input, double bin_width, double window_lo,
                double window_hi, double duration, const std::string& out_dir) {
  AnalysisOptions opts;
  opts.bin_ps = to_ps(bin_width);
  opts.window_lo_ps = to_ps(window_lo);
  opts.window_hi_ps = to_ps(window_hi);
  const auto streams = read_timestamps(input, duration > 0 ? to_ps(duration) : 0);
  if (streams.size() < 2)
    throw IoError("analyze: need at least 2 channels, found " +
                  std::to_string(streams.size()));
  // analysis efficiencies are not known for arbitrary files; unit efficiencies
  // make backed_out == detected unless a config is supplied
  ExperimentConfig cfg;
  cfg.lasers.pump_power = 0;
  cfg.lasers.coupling_power = 0;
  cfg.filters.stokes.transmission = 1.0;
  cfg.filters.anti_stokes.transmission = 1.0;
  cfg.detectors.quantum_efficiency = 1.0;
  cfg.detectors.fiber_coupling = 1.0;
  const AnalysisRun run = analyze_streams(streams, cfg, opts, out_dir, "file");
  std::printf("channels           %zu\n", streams.size());
  std::printf("g2 max             %.2f +- %.2f\n", run.g2.g2_max.value, run.g2.g2_max.u);
  std::printf("CS violation       %.1f +- %.1f (%s)\n", run.cs.violation_factor.value,
              run.cs.violation_factor.u, run.cs.violated ? "violated" : "not violated");
  return 0;
}

int cmd_analyze_with_config(const std::string& input, const std::string& config_path,
                            double bin_width, double window_lo, double window_hi,
                            double duration, uint64_t seed, const std::string& out_dir) {
  AnalysisOptions opts;
  opts.bin_ps = to_ps(bin_width);
  opts.window_lo_ps = to_ps(window_lo);
  opts.window_hi_ps = to_ps(window_hi);
  opts.seed = derive_seed(seed, "analysis");
  const auto streams = read_timestamps(input, duration > 0 ? to_ps(duration) : 0);
  const ExperimentConfig cfg = load_config_file(config_path);
  const AnalysisRun run =
      analyze_streams(streams, cfg, opts, out_dir, config_fingerprint(cfg));
  std::printf("channels           %zu\n", streams.size());
  std::printf("g2 max             %.2f +- %.2f\n", run.g2.g2_max.value, run.g2.g2_max.u);
  std::printf("backed-out rate    %.1f pairs/s\n", run.backed_out_rate);
  return 0;
}

int cmd_calibrate(const std::string& config_path, const std::string& anchors_path,
                  const std::string& out_dir) {
  const ExperimentConfig base = load_config_file(config_path);
  const std::vector<Anchor> anchors =
      anchors_path.empty() ? default_anchors() : parse_anchors_file(anchors_path);
  const CalibrationResult result = calibrate(base, anchors);

  std::filesystem::create_directories(out_dir);
  const ExperimentConfig fitted = result.apply(base);
  atomic_write_text(join(out_dir, "calibrated.conf"), serialize_config(fitted));

  nlohmann::json j;
  j["density_m3"] = result.density;
  j["gamma12_rad_s"] = result.gamma12;
  j["coupling_rabi_scale"] = result.coupling_rabi_scale;
  j["raman_background_Hz"] = result.raman_background;
  j["rate_constant"] = result.rate_constant;
  j["converged"] = result.converged;
  j["iterations"] = result.iterations;
  nlohmann::json res = nlohmann::json::array();
  for (size_t i = 0; i < result.anchors.size(); ++i) {
    res.push_back({{"kind", result.anchors[i].kind},
                   {"coupling_power_W", result.anchors[i].coupling_power},
                   {"pump_power_W", result.anchors[i].pump_power},
                   {"target", result.anchors[i].target},
                   {"relative_residual", result.residuals[i]}});
  }
  j["residuals"] = res;
  atomic_write_text(join(out_dir, "calibration.json"), j.dump(2) + "\n");

  std::printf("density            %.4g m^-3\n", result.density);
  std::printf("gamma12            2pi x %.1f kHz\n",
              result.gamma12 / consts::two_pi / 1e3);
  std::printf("rabi scale         %.3f\n", result.coupling_rabi_scale);
  std::printf("raman background   %.0f Hz\n", result.raman_background);
  std::printf("rate constant      %.6g\n", result.rate_constant);
  for (size_t i = 0; i < result.anchors.size(); ++i)
    std::printf("residual[%zu] %-16s %+.1f%%\n", i, result.anchors[i].kind.c_str(),
                100.0 * result.residuals[i]);
  if (!result.converged) {
    std::fprintf(stderr, "calibrate: fit did not converge\n");
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"biphoton source simulator and correlation analysis"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", spec_path, input, anchors_path;
  double duration = 600.0, bin_width = 1e-9;
  double window_lo = -200e-9, window_hi = 1000e-9;
  double file_duration = 0.0;
  uint64_t seed = 1;

  auto* wf = app.add_subcommand("waveform", "joint spectrum, waveform and metrics");
  wf->add_option("--config", config_path, "configuration file")->required();
  wf->add_option("--out", out_dir, "output directory");

  auto* sw = app.add_subcommand("sweep", "parameter sweep (coupling or pump power)");
  sw->add_option("--config", config_path, "configuration file")->required();
  sw->add_option("--spec", spec_path, "sweep spec JSON")->required();
  sw->add_option("--out", out_dir, "output directory");

  auto* e2e = app.add_subcommand("endtoend", "simulate, detect and analyze");
  e2e->add_option("--config", config_path, "configuration file")->required();
  e2e->add_option("--duration", duration, "acquisition time, s");
  e2e->add_option("--seed", seed, "master RNG seed");
  e2e->add_option("--out", out_dir, "output directory");

  auto* an = app.add_subcommand("analyze", "analyze a BPHT or CSV timestamp file");
  an->add_option("--input", input, "timestamp file")->required();
  an->add_option("--config", config_path, "optional config for efficiency back-out");
  an->add_option("--bin-width", bin_width, "bin width, s");
  an->add_option("--window-lo", window_lo, "window start, s");
  an->add_option("--window-hi", window_hi, "window end, s");
  an->add_option("--duration", file_duration, "acquisition time, s (default: last timestamp)");
  an->add_option("--seed", seed, "seed for the autocorrelation splits");
  an->add_option("--out", out_dir, "output directory");

  auto* cal = app.add_subcommand("calibrate", "fit medium/noise parameters to anchors");
  cal->add_option("--config", config_path, "configuration file")->required();
  cal->add_option("--anchors", anchors_path, "anchors JSON (default: built-in)");
  cal->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (wf->parsed()) return cmd_waveform(config_path, out_dir);
    if (sw->parsed()) return cmd_sweep(config_path, spec_path, out_dir);
    if (e2e->parsed()) return cmd_endtoend(config_path, duration, seed, out_dir);
    if (an->parsed()) {
      if (config_path.empty())
        return cmd_analyze(input, bin_width, window_lo, window_hi, file_duration, out_dir);
      return cmd_analyze_with_config(input, config_path, bin_width, window_lo, window_hi,
                                     file_duration, seed, out_dir);
    }
    if (cal->parsed()) return cmd_calibrate(config_path, anchors_path, out_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const StatsError& e) {
    std::fprintf(stderr, "statistics error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
