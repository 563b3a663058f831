// Acceptance suite: runs every headline requirement at its stated tolerance
// and prints one PASS/FAIL line per criterion. Returns the number of failures.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "biphoton/calibrate.hpp"
#include "biphoton/correlation.hpp"
#include "biphoton/harness.hpp"
#include "biphoton/sweep.hpp"

using namespace bp;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d. %-34s %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

}  // namespace

int main() {
  ExperimentConfig base = load_config_file(std::string(CONFIG_DIR) + "/paper.conf");

  // 1. Doppler width
  {
    const double fwhm = doppler_fwhm(336.15, 795e-9, consts::rb::mass_87);
    const double dev = std::abs(fwhm / 530e6 - 1.0);
    report(1, "Doppler width 530 MHz +-2%", dev < 0.02,
           fmt("fwhm = %.2f MHz (dev %.2f%%)", fwhm / 1e6, 100 * dev));
  }

  // 2. Cauchy-Schwarz arithmetic
  {
    const double a = cs_violation({11, 0}, {2.0, 0}, {1.6, 0}).violation_factor.value;
    const double b = cs_violation({6, 0}, {2.0, 0}, {1.6, 0}).violation_factor.value;
    const bool pass = std::abs(a - 37.8125) < 1e-12 && std::abs(b - 11.25) < 1e-12;
    report(2, "CS factors 37.8125 / 11.25 exact", pass, fmt("%.13g, %.13g", a, b));
  }

  // 3. Waveform trend and calibration
  ExperimentConfig calibrated = base;
  {
    const auto t0 = std::chrono::steady_clock::now();
    const CalibrationResult cal = calibrate(base, default_anchors());
    calibrated = cal.apply(base);
    const double targets[3] = {47e-9, 60e-9, 94e-9};
    const double couplings[3] = {27e-3, 9e-3, 1e-3};
    double t1e[3];
    for (int i = 0; i < 3; ++i) {
      ExperimentConfig cfg = calibrated;
      cfg.lasers.coupling_power = couplings[i];
      const WaveformRun run = run_waveform(cfg, "");
      t1e[i] = run.metrics.one_over_e_time;
    }
    const double elapsed = seconds_since(t0);
    bool pass = t1e[0] < t1e[1] && t1e[1] < t1e[2];
    for (int i = 0; i < 3; ++i) {
      pass = pass && t1e[i] > 25e-9;
      pass = pass && std::abs(t1e[i] / targets[i] - 1.0) < 0.25;
    }
    pass = pass && elapsed < 10.0;
    report(3, "calibrated 1/e times 47/60/94 +-25%", pass,
           fmt("%.1f/%.1f/%.1f ns in %.1f s", t1e[0] * 1e9, t1e[1] * 1e9, t1e[2] * 1e9,
               elapsed));
  }

  // 4. Fourier limit
  {
    bool pass = true;
    std::string detail;
    for (double mw : {27.0, 9.0, 1.0}) {
      ExperimentConfig cfg = calibrated;
      cfg.lasers.coupling_power = mw * 1e-3;
      const WaveformRun run = run_waveform(cfg, "");
      const double identity =
          run.metrics.bandwidth * consts::two_pi * run.metrics.tau_b;  // == 1 by definition
      const double tbp = run.metrics.one_over_e_time * intensity_fwhm_hz(run.parts.jsa.spec);
      const double ratio = tbp * consts::two_pi;  // 1 for a pure Lorentzian
      pass = pass && std::abs(identity - 1.0) < 1e-12 && ratio <= 1.2;
      detail += fmt("%.2fx ", ratio);
    }
    report(4, "time-bandwidth within 1.2x Lorentzian", pass, detail + "(27/9/1 mW)");
  }

  // 5. Rate closure
  {
    ExperimentConfig cfg = calibrated;
    cfg.lasers.pump_power = 7e-3;
    cfg.lasers.coupling_power = 27e-3;
    const WaveformRun at7 = run_waveform(cfg, "");
    const double predicted_90 = at7.metrics.pair_rate * 90.0 / 7.0;
    const double dev = std::abs(predicted_90 / 25000.0 - 1.0);

    SweepSpec spec;
    spec.parameter = "pump_power";
    spec.values = {1e-3, 2e-3, 3e-3, 4e-3, 5e-3, 6e-3, 7e-3};
    const SweepResult sweep = run_sweep(calibrated, spec);
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double n = static_cast<double>(sweep.rows.size());
    for (const auto& row : sweep.rows) {
      sx += row.value;
      sy += row.pair_rate;
      sxx += row.value * row.value;
      sxy += row.value * row.pair_rate;
      syy += row.pair_rate * row.pair_rate;
    }
    const double r_num = n * sxy - sx * sy;
    const double r2 = r_num * r_num / ((n * sxx - sx * sx) * (n * syy - sy * sy));
    const bool pass = dev < 0.05 && r2 > 0.99 &&
                      std::abs(at7.metrics.pair_rate / 2000.0 - 1.0) < 0.01;
    report(5, "rate closure 2000@7mW -> ~25700@90mW", pass,
           fmt("rate(7mW) = %.0f/s, 90 mW -> %.0f/s (dev %.1f%% of 25000), R^2 = %.6f",
               at7.metrics.pair_rate, predicted_90, 100 * dev, r2));
  }

  // 6. Estimator closure (600 s endtoend at the a1 point)
  EndToEndRun a1;
  bool have_a1 = false;
  {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = calibrated;
    cfg.lasers.pump_power = 6e-3;
    cfg.lasers.coupling_power = 27e-3;
    try {
      a1 = run_endtoend(cfg, 600.0, 20260810, "");
      have_a1 = true;
      const double elapsed = seconds_since(t0);
      const double g2m = a1.analysis.g2.g2_max.value;
      const double sigma = a1.analysis.g2.g2_max.u;
      const double back = a1.analysis.backed_out_rate;
      const double back_sigma =
          a1.analysis.det_rate.u / (cfg.efficiency_s() * cfg.efficiency_as());
      const bool pass = std::abs(g2m - 11.0) < 3.0 * sigma &&
                        std::abs(back - a1.configured_rate) < 3.0 * back_sigma &&
                        elapsed < 60.0;
      report(6, "endtoend closure at a1 (600 s)", pass,
             fmt("g2m = %.2f+-%.2f (target 11), rate %.0f vs %.0f (+-%.0f), %.1f s", g2m,
                 sigma, back, a1.configured_rate, back_sigma, elapsed));
    } catch (const std::exception& e) {
      report(6, "endtoend closure at a1 (600 s)", false, e.what());
    }
  }

  // 7. Nonclassicality benchmarks
  {
    bool pass = true;
    std::string detail;
    // noiseless split pair source
    {
      Rng rng(99);
      const double duration = 60.0;
      std::vector<int64_t> trig;
      std::vector<int64_t> partner;
      for (double t = rng.exponential(2e4); t < duration; t += rng.exponential(2e4)) {
        trig.push_back(to_ps(t));
        partner.push_back(to_ps(t + 40e-9));
      }
      ClickStream trig_s, partner_s;
      trig_s.channel = 0;
      trig_s.duration_ps = to_ps(duration);
      trig_s.t_ps = trig;
      partner_s.channel = 1;
      partner_s.duration_ps = to_ps(duration);
      partner_s.t_ps = partner;
      const auto [a, b] = split_stream(partner_s, 0.5, 4);
      const auto r = conditional_g2(trig_s, a, b, {100e-9});
      pass = pass && r.g2c[0] < 0.05;
      detail += fmt("pairs %.3f ", r.g2c[0]);
    }
    // synthetic coherent streams
    {
      const auto trig = poisson_stream(1e4, 40.0, 0, 101, "t");
      const auto a = poisson_stream(1.2e5, 40.0, 1, 102, "a");
      const auto b = poisson_stream(1.2e5, 40.0, 2, 103, "b");
      const auto r = conditional_g2(trig, a, b, {400e-9});
      pass = pass && std::abs(r.g2c[0] - 1.0) < 0.05;
      detail += fmt("coherent %.3f ", r.g2c[0]);
    }
    // calibrated operating point: below 0.5 inside the coherence time
    if (have_a1) {
      double inside = 2.0;
      for (size_t i = 0; i < a1.analysis.g2c.window_widths_s.size(); ++i) {
        if (a1.analysis.g2c.window_widths_s[i] <= 50e-9)
          inside = std::min(inside, a1.analysis.g2c.g2c[i]);
      }
      // the widest window still inside the coherence time
      double at_edge = 0;
      for (size_t i = 0; i < a1.analysis.g2c.window_widths_s.size(); ++i)
        if (a1.analysis.g2c.window_widths_s[i] <= 50e-9) at_edge = a1.analysis.g2c.g2c[i];
      pass = pass && at_edge < 0.5;
      detail += fmt("a1@50ns %.3f", at_edge);
    } else {
      pass = false;
    }
    report(7, "conditional g2 benchmarks", pass, detail);
  }

  // 8. Oracle equivalence and floor consistency
  {
    std::mt19937_64 rng(2026);
    bool equal = true;
    for (int trial = 0; trial < 200 && equal; ++trial) {
      std::uniform_int_distribution<int> size_dist(0, 10000);
      const double duration = 2e-3;
      std::uniform_int_distribution<int64_t> t_dist(0, to_ps(duration) - 1);
      ClickStream s, as;
      s.duration_ps = as.duration_ps = to_ps(duration);
      s.t_ps.resize(size_dist(rng));
      as.t_ps.resize(size_dist(rng));
      for (auto& t : s.t_ps) t = t_dist(rng);
      for (auto& t : as.t_ps) t = t_dist(rng);
      std::sort(s.t_ps.begin(), s.t_ps.end());
      std::sort(as.t_ps.begin(), as.t_ps.end());
      const int64_t bin = 1000, lo = -60000, hi = 60000;
      const auto h = coincidence_histogram(s, as, bin, lo, hi);
      // brute force with early exit on the sorted partner
      const size_t nbins = h.counts.size();
      std::vector<int64_t> oracle(nbins, 0);
      for (int64_t t1 : s.t_ps)
        for (int64_t t2 : as.t_ps) {
          const int64_t d = t2 - t1;
          if (d < lo) continue;
          if (d >= lo + static_cast<int64_t>(nbins) * bin) break;
          ++oracle[static_cast<size_t>((d - lo) / bin)];
        }
      equal = h.counts == oracle;
    }

    const auto s = poisson_stream(5e3, 200.0, 0, 301, "s");
    const auto as = poisson_stream(5e3, 200.0, 1, 302, "as");
    const auto h = coincidence_histogram(s, as, 1000, -500000, 500000);
    double total = 0, mean = 0;
    for (int64_t c : h.counts) total += static_cast<double>(c);
    const auto g2 = normalize_g2(h, FloorMode::analytic);
    for (double v : g2.g2) mean += v;
    mean /= static_cast<double>(g2.g2.size());
    const bool floor_ok = total >= 1e6 && std::abs(mean - 1.0) < 0.01;
    report(8, "histogram oracle + Poisson floor", equal && floor_ok,
           fmt("200 instances equal = %s, %.3g pairs, mean g2 = %.4f",
               equal ? "yes" : "no", total, mean));
  }

  // 9. Numerical stability under doubling
  {
    ExperimentConfig cfg = calibrated;
    cfg.lasers.coupling_power = 27e-3;
    cfg.numerics.frequency_points = 16384;
    auto metrics_of = [](const ExperimentConfig& c) {
      const WaveformRun run = run_waveform(c, "");
      return run.metrics;
    };
    const WaveformMetrics m0 = metrics_of(cfg);

    ExperimentConfig finer = cfg;
    finer.numerics.frequency_points = 32768;  // halves the step at fixed span
    const WaveformMetrics m_res = metrics_of(finer);

    ExperimentConfig wider = cfg;
    wider.numerics.frequency_points = 32768;
    wider.numerics.span_envelope_mult = 2.0 * cfg.numerics.span_envelope_mult;
    const WaveformMetrics m_span = metrics_of(wider);

    ExperimentConfig denser = cfg;
    denser.numerics.velocity_nodes = 2 * cfg.numerics.velocity_nodes;
    const WaveformMetrics m_quad = metrics_of(denser);

    auto dev = [&](const WaveformMetrics& m) {
      return std::max({std::abs(m.tau_b / m0.tau_b - 1.0),
                       std::abs(m.bandwidth / m0.bandwidth - 1.0),
                       std::abs(m.pair_rate / m0.pair_rate - 1.0)});
    };
    const double d1 = dev(m_res), d2 = dev(m_span), d3 = dev(m_quad);
    const bool pass = d1 < 0.01 && d2 < 0.01 && d3 < 0.01;
    report(9, "metrics stable under grid doubling", pass,
           fmt("res %.3g%%, span %.3g%%, quadrature %.3g%%", 100 * d1, 100 * d2, 100 * d3));
  }

  // 10. Performance
  {
    ExperimentConfig cfg = calibrated;
    cfg.lasers.coupling_power = 27e-3;
    cfg.numerics.frequency_points = 4096;
    cfg.numerics.velocity_nodes = 128;
    auto t0 = std::chrono::steady_clock::now();
    const JointSpectralAmplitude jsa = joint_spectrum(cfg);
    const BiphotonWaveform wf = waveform_from_spectrum(jsa, cfg.rate_constant);
    const double t_engine = seconds_since(t0);
    (void)wf;

    const auto s = poisson_stream(1e4, 600.0, 0, 401, "s");
    const auto as = poisson_stream(1e4, 600.0, 1, 402, "as");
    t0 = std::chrono::steady_clock::now();
    const auto h = coincidence_histogram(s, as, 1000, -500000, 500000);
    const auto g2 = normalize_g2(h, FloorMode::measured);
    (void)g2;
    const double t_analysis = seconds_since(t0);
    const bool pass = t_engine < 1.0 && t_analysis < 10.0;
    report(10, "performance budgets", pass,
           fmt("spectrum+waveform %.3f s (< 1), 600 s stream analysis %.3f s (< 10)",
               t_engine, t_analysis));
  }

  std::printf("%s: %d/10 criteria passed\n", failures == 0 ? "OK" : "ATTENTION",
              10 - failures);
  return failures;
}
