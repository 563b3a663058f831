#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/biphoton.hpp"
#include "biphoton/detection.hpp"

namespace bp {

struct ValueU {
  double value = 0.0;
  double u = 0.0;  // 1-sigma uncertainty
};

struct CoincidenceHistogram {
  int64_t bin_ps = 1000;
  int64_t lo_ps = 0;  // window [lo, hi) on tau = t_as - t_s
  int64_t hi_ps = 0;
  std::vector<int64_t> counts;
  int64_t n_s = 0;   // total Stokes singles
  int64_t n_as = 0;  // total anti-Stokes singles
  int64_t duration_ps = 0;

  size_t bins() const { return counts.size(); }
  double tau_center_s(size_t i) const {
    return (static_cast<double>(lo_ps) +
            (static_cast<double>(i) + 0.5) * static_cast<double>(bin_ps)) /
           seconds_to_ps;
  }
};

// Counts all ordered pairs with t_as - t_s in [lo, hi) via a two-pointer
// sweep, linear in clicks plus in-window pairs. The window must span at least
// 100 bins; hi - lo is rounded up to a whole number of bins.
CoincidenceHistogram coincidence_histogram(const ClickStream& s, const ClickStream& as,
                                           int64_t bin_ps, int64_t lo_ps, int64_t hi_ps);

enum class FloorMode { analytic, measured };

struct G2Result {
  std::vector<double> tau_s;
  std::vector<double> g2;
  std::vector<double> stderr_g2;
  FloorMode mode = FloorMode::measured;
  double floor_counts = 0.0;  // accidental counts per bin
  ValueU g2_max;
  size_t peak_bin = 0;
};

// analytic floor: N_s N_as bin / T. measured floor: mean of bins farther than
// 5 rough decay constants from the peak (both sides). Optional 3-bin smoothing
// of the reported maximum (off by default, matching the single-bin g2_max).
G2Result normalize_g2(const CoincidenceHistogram& hist, FloorMode mode,
                      bool smooth_peak = false);

// Hanbury Brown-Twiss autocorrelation surrogate at tau = 0: splits the stream
// 50:50 and cross-correlates the halves in the centered tau = 0 bin,
// normalized by the analytic floor of the halves.
ValueU auto_g2_zero(const ClickStream& stream, int64_t bin_ps, uint64_t seed);

struct CSCheck {
  ValueU g2m, g_ss0, g_asas0;
  ValueU violation_factor;
  bool violated = false;  // factor - u > 1
};

CSCheck cs_violation(ValueU g2m, ValueU g_ss0, ValueU g_asas0);

struct ConditionalG2Result {
  std::vector<double> window_widths_s;
  std::vector<double> g2c;
  std::vector<double> u;
  int64_t n_heralds = 0;
  std::vector<int64_t> n12, n13, n123;
};

// Heralded beamsplitter test: for each window width, counts heralds with a
// click in arm A within [t, t+w), in arm B, and in both;
// g2c = N1 N123 / (N12 N13).
ConditionalG2Result conditional_g2(const ClickStream& trigger, const ClickStream& arm_a,
                                   const ClickStream& arm_b,
                                   const std::vector<double>& window_widths_s);

double back_out_generation_rate(double detected_pair_rate, const ExperimentConfig& cfg);

struct HistogramDecay {
  DecayFit fit;
  double floor_counts = 0.0;
  double peak_tau_s = 0.0;
};

// Poisson maximum likelihood for A exp(-(tau-tau_pk)/tau_b) + floor on the
// floor-subtracted histogram; the measured floor is held fixed.
HistogramDecay fit_histogram_decay(const CoincidenceHistogram& hist);

// Floor-subtracted in-window pair rate (pairs/s) with Poisson uncertainty.
ValueU detected_pair_rate(const CoincidenceHistogram& hist, double floor_counts);

}  // namespace bp
