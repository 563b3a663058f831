#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biphoton/config.hpp"
#include "biphoton/correlation.hpp"
#include "biphoton/detection.hpp"
#include "biphoton/io.hpp"

namespace bp {

struct AnalysisOptions {
  int64_t bin_ps = 1000;
  int64_t window_lo_ps = -200000;   // -200 ns
  int64_t window_hi_ps = 1000000;   // +1 us
  FloorMode floor_mode = FloorMode::measured;
  std::vector<double> g2c_windows_s = {2e-9, 5e-9, 1e-8, 2e-8, 5e-8, 1e-7, 2e-7, 4e-7};
  uint64_t seed = 1;                // HBT split seeds for the autocorrelations
  double configured_rate = 0.0;     // generation rate when known (simulation closure)
};

struct WaveformRun {
  JsaParts parts;
  BiphotonWaveform waveform;
  WaveformMetrics metrics;
  std::string fingerprint;
};

// joint_spectrum -> waveform -> metrics; writes jsa.csv, waveform.csv,
// metrics.json when out_dir is nonempty.
WaveformRun run_waveform(const ExperimentConfig& cfg, const std::string& out_dir);

struct AnalysisRun {
  CoincidenceHistogram hist;
  G2Result g2;
  CSCheck cs;
  bool has_g2c = false;
  ConditionalG2Result g2c;
  ValueU det_rate;
  double backed_out_rate = 0.0;
};

// Shared by endtoend and analyze: histogram + g2 + Cauchy-Schwarz check
// (+ conditional g2 when arm streams are present). Streams: [0] Stokes,
// [1] anti-Stokes, optional [2],[3] beamsplit arms of the heralded channel.
AnalysisRun analyze_streams(const std::vector<ClickStream>& streams,
                            const ExperimentConfig& cfg, const AnalysisOptions& opts,
                            const std::string& out_dir, const std::string& fingerprint);

struct EndToEndRun {
  std::vector<ClickStream> streams;
  AnalysisRun analysis;
  double configured_rate = 0.0;
};

// Full chain: generate pairs at the calibrated rate, detect both channels,
// add backgrounds, split the anti-Stokes for the heralded test, analyze.
// Writes streams.bpht and all analysis artifacts when out_dir is nonempty.
EndToEndRun run_endtoend(const ExperimentConfig& cfg, double duration, uint64_t seed,
                         const std::string& out_dir, AnalysisOptions opts = {});

// Rate-ratio model of the maximum normalized cross-correlation: 1 plus the
// peak-bin true-coincidence rate over the accidental floor rate, from
// configured noise rates and the waveform's peak-bin fraction.
double g2m_rate_ratio_model(const ExperimentConfig& cfg, double generation_rate,
                            const BiphotonWaveform& wf, double bin_s = 1e-9);

}  // namespace bp
