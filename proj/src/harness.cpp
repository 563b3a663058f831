#include "biphoton/harness.hpp"

#include <cmath>
#include <filesystem>

#include "biphoton/errors.hpp"

namespace bp {

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

WaveformRun run_waveform(const ExperimentConfig& cfg, const std::string& out_dir) {
  WaveformRun run;
  run.parts = joint_spectrum_parts(cfg);
  run.waveform = waveform_from_spectrum(run.parts.jsa, cfg.rate_constant);
  run.metrics = waveform_metrics(run.parts.jsa, run.waveform, cfg);
  run.fingerprint = run.parts.jsa.fingerprint;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    atomic_write_text(join(out_dir, "jsa.csv"), spectrum_csv(run.parts.jsa.spec, run.fingerprint));
    atomic_write_text(join(out_dir, "waveform.csv"), waveform_csv(run.waveform));
    atomic_write_text(join(out_dir, "metrics.json"), metrics_json(run.metrics, run.fingerprint));
  }
  return run;
}

AnalysisRun analyze_streams(const std::vector<ClickStream>& streams,
                            const ExperimentConfig& cfg, const AnalysisOptions& opts,
                            const std::string& out_dir, const std::string& fingerprint) {
  if (streams.size() < 2)
    throw StatsError("analyze_streams: need at least Stokes and anti-Stokes channels");
  const ClickStream& stokes = streams[0];
  const ClickStream& anti = streams[1];

  AnalysisRun run;
  run.hist = coincidence_histogram(stokes, anti, opts.bin_ps, opts.window_lo_ps,
                                   opts.window_hi_ps);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    atomic_write_text(join(out_dir, "histogram.csv"), histogram_csv(run.hist, fingerprint));
  }

  run.g2 = normalize_g2(run.hist, opts.floor_mode);
  run.det_rate = detected_pair_rate(run.hist, run.g2.floor_counts);
  run.backed_out_rate = back_out_generation_rate(run.det_rate.value, cfg);

  const ValueU g_ss = auto_g2_zero(stokes, opts.bin_ps, derive_seed(opts.seed, "hbt-stokes"));
  const ValueU g_asas =
      auto_g2_zero(anti, opts.bin_ps, derive_seed(opts.seed, "hbt-anti-stokes"));
  run.cs = cs_violation(run.g2.g2_max, g_ss, g_asas);

  if (streams.size() >= 4) {
    run.g2c = conditional_g2(stokes, streams[2], streams[3], opts.g2c_windows_s);
    run.has_g2c = true;
  } else if (streams.size() == 3) {
    // trigger + two arms already split upstream
    run.g2c = conditional_g2(streams[0], streams[1], streams[2], opts.g2c_windows_s);
    run.has_g2c = true;
  }

  if (!out_dir.empty()) {
    atomic_write_text(join(out_dir, "g2.csv"), g2_csv(run.g2, fingerprint));
    atomic_write_text(join(out_dir, "g2.json"),
                      g2_json(run.g2, run.hist, run.det_rate, run.backed_out_rate,
                              opts.configured_rate, fingerprint));
    atomic_write_text(join(out_dir, "cs.json"), cs_json(run.cs, fingerprint));
    if (run.has_g2c) {
      atomic_write_text(join(out_dir, "g2c.csv"), g2c_csv(run.g2c, fingerprint));
      atomic_write_text(join(out_dir, "g2c.json"), g2c_json(run.g2c, fingerprint));
    }
  }
  return run;
}

EndToEndRun run_endtoend(const ExperimentConfig& cfg, double duration, uint64_t seed,
                         const std::string& out_dir, AnalysisOptions opts) {
  const WaveformRun wf = run_waveform(cfg, "");
  EndToEndRun run;
  run.configured_rate = wf.metrics.pair_rate;
  opts.configured_rate = run.configured_rate;
  opts.seed = derive_seed(seed, "analysis");

  const PairEventList pairs =
      generate_pairs(run.configured_rate, wf.waveform, duration, derive_seed(seed, "pairs"));
  std::vector<double> t_s(pairs.events.size()), t_as(pairs.events.size());
  for (size_t i = 0; i < pairs.events.size(); ++i) {
    t_s[i] = pairs.events[i].first;
    t_as[i] = pairs.events[i].second;
  }

  const auto& det = cfg.detectors;
  ClickStream stokes =
      apply_channel(t_s, duration, 0, cfg.efficiency_s(), det.timing_jitter_sigma,
                    det.dead_time, derive_seed(seed, "detect-stokes"), "stokes");
  ClickStream anti =
      apply_channel(t_as, duration, 1, cfg.efficiency_as(), det.timing_jitter_sigma,
                    det.dead_time, derive_seed(seed, "detect-anti-stokes"), "anti-stokes");

  const int64_t dead_ps = to_ps(det.dead_time);
  const double bg_s = cfg.noise.leakage_s + cfg.dark_rate_s();
  const double bg_as =
      cfg.noise.raman_background_as * cfg.noise.optical_pumping_suppression +
      cfg.dark_rate_as();
  if (bg_s > 0)
    stokes = add_background(stokes, bg_s, derive_seed(seed, "background-stokes"), dead_ps);
  if (bg_as > 0)
    anti = add_background(anti, bg_as, derive_seed(seed, "background-anti-stokes"), dead_ps);

  auto [arm_a, arm_b] = split_stream(anti, 0.5, derive_seed(seed, "beamsplitter"));
  arm_a.channel = 2;
  arm_b.channel = 3;

  run.streams = {std::move(stokes), std::move(anti), std::move(arm_a), std::move(arm_b)};
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_bpht((std::filesystem::path(out_dir) / "streams.bpht").string(), run.streams);
  }
  run.analysis = analyze_streams(run.streams, cfg, opts, out_dir, wf.fingerprint);
  return run;
}

double g2m_rate_ratio_model(const ExperimentConfig& cfg, double generation_rate,
                            const BiphotonWaveform& wf, double bin_s) {
  // peak-bin fraction of the normalized delay distribution
  double total = 0.0;
  for (const auto& p : wf.psi) total += std::norm(p);
  const double dtau = wf.step();
  const size_t per_bin = std::max<size_t>(1, static_cast<size_t>(std::llround(bin_s / dtau)));
  double best = 0.0;
  for (size_t i = 0; i < wf.psi.size(); i += per_bin) {
    double acc = 0.0;
    for (size_t j = i; j < std::min(wf.psi.size(), i + per_bin); ++j)
      acc += std::norm(wf.psi[j]);
    best = std::max(best, acc);
  }
  const double p_pk = total > 0 ? best / total : 0.0;

  const double r_s = generation_rate * cfg.efficiency_s() + cfg.noise.leakage_s +
                     cfg.dark_rate_s();
  const double r_as = generation_rate * cfg.efficiency_as() +
                      cfg.noise.raman_background_as * cfg.noise.optical_pumping_suppression +
                      cfg.dark_rate_as();
  const double floor_rate = r_s * r_as * bin_s;
  if (!(floor_rate > 0)) return 1.0;
  const double peak_rate = generation_rate * cfg.efficiency_s() * cfg.efficiency_as() * p_pk;
  return 1.0 + peak_rate / floor_rate;
}

}  // namespace bp
