#include "biphoton/correlation.hpp"

#include <algorithm>
#include <cmath>

#include "biphoton/errors.hpp"
#include "biphoton/optim.hpp"

namespace bp {

CoincidenceHistogram coincidence_histogram(const ClickStream& s, const ClickStream& as,
                                           int64_t bin_ps, int64_t lo_ps, int64_t hi_ps) {
  if (bin_ps <= 0) throw StatsError("coincidence_histogram: bin width must be > 0");
  if (hi_ps <= lo_ps) throw StatsError("coincidence_histogram: empty window");
  const int64_t nbins = (hi_ps - lo_ps + bin_ps - 1) / bin_ps;
  if (nbins < 100) throw StatsError("coincidence_histogram: window must span >= 100 bins");
  for (const auto* st : {&s, &as})
    if (!std::is_sorted(st->t_ps.begin(), st->t_ps.end()))
      throw StatsError("coincidence_histogram: unsorted input stream");

  CoincidenceHistogram h;
  h.bin_ps = bin_ps;
  h.lo_ps = lo_ps;
  h.hi_ps = lo_ps + nbins * bin_ps;
  h.counts.assign(static_cast<size_t>(nbins), 0);
  h.n_s = static_cast<int64_t>(s.t_ps.size());
  h.n_as = static_cast<int64_t>(as.t_ps.size());
  h.duration_ps = std::max(s.duration_ps, as.duration_ps);

  size_t start = 0;
  for (int64_t ts : s.t_ps) {
    const int64_t wlo = ts + h.lo_ps;
    const int64_t whi = ts + h.hi_ps;
    while (start < as.t_ps.size() && as.t_ps[start] < wlo) ++start;
    for (size_t j = start; j < as.t_ps.size() && as.t_ps[j] < whi; ++j) {
      const size_t bin = static_cast<size_t>((as.t_ps[j] - ts - h.lo_ps) / bin_ps);
      ++h.counts[bin];
    }
  }
  return h;
}

namespace {

// Rough decay scale for floor-region selection: distance from the peak to the
// last bin above floor_guess + (peak - floor_guess)/e.
int64_t rough_decay_bins(const CoincidenceHistogram& h, size_t peak, double floor_guess) {
  const double level = floor_guess + (static_cast<double>(h.counts[peak]) - floor_guess) /
                                         std::exp(1.0);
  size_t last = peak;
  for (size_t i = peak; i < h.bins(); ++i)
    if (static_cast<double>(h.counts[i]) > level) last = i;
  return std::max<int64_t>(1, static_cast<int64_t>(last - peak));
}

double measured_floor(const CoincidenceHistogram& h, size_t peak) {
  // first guess from the outer 20% of bins on each side
  const size_t n = h.bins();
  const size_t edge = std::max<size_t>(1, n / 5);
  double sum = 0;
  size_t cnt = 0;
  for (size_t i = 0; i < edge; ++i) {
    sum += static_cast<double>(h.counts[i]);
    sum += static_cast<double>(h.counts[n - 1 - i]);
    cnt += 2;
  }
  const double guess = sum / static_cast<double>(cnt);
  const int64_t tail = 5 * rough_decay_bins(h, peak, guess);

  sum = 0;
  cnt = 0;
  for (size_t i = 0; i < n; ++i) {
    const int64_t d = static_cast<int64_t>(i) - static_cast<int64_t>(peak);
    if (d >= -tail && d <= tail) continue;
    sum += static_cast<double>(h.counts[i]);
    ++cnt;
  }
  if (cnt < 10) throw StatsError("normalize_g2: no floor bins beyond 5 decay constants");
  return sum / static_cast<double>(cnt);
}

}  // namespace

G2Result normalize_g2(const CoincidenceHistogram& hist, FloorMode mode, bool smooth_peak) {
  const size_t n = hist.bins();
  if (n == 0) throw StatsError("normalize_g2: empty histogram");
  size_t peak = 0;
  for (size_t i = 1; i < n; ++i)
    if (hist.counts[i] > hist.counts[peak]) peak = i;

  double floor;
  if (mode == FloorMode::analytic) {
    if (hist.duration_ps <= 0 || hist.n_s == 0 || hist.n_as == 0)
      throw StatsError("normalize_g2: zero analytic floor (no singles)");
    floor = static_cast<double>(hist.n_s) * static_cast<double>(hist.n_as) *
            static_cast<double>(hist.bin_ps) / static_cast<double>(hist.duration_ps);
  } else {
    floor = measured_floor(hist, peak);
  }
  if (!(floor > 0)) throw StatsError("normalize_g2: zero floor");

  G2Result r;
  r.mode = mode;
  r.floor_counts = floor;
  r.tau_s.resize(n);
  r.g2.resize(n);
  r.stderr_g2.resize(n);
  for (size_t i = 0; i < n; ++i) {
    r.tau_s[i] = hist.tau_center_s(i);
    const double c = static_cast<double>(hist.counts[i]);
    r.g2[i] = c / floor;
    r.stderr_g2[i] = std::sqrt(c) / floor;
  }

  if (smooth_peak) {
    double best = 0;
    size_t best_i = 1;
    for (size_t i = 1; i + 1 < n; ++i) {
      const double avg = (r.g2[i - 1] + r.g2[i] + r.g2[i + 1]) / 3.0;
      if (avg > best) {
        best = avg;
        best_i = i;
      }
    }
    r.peak_bin = best_i;
    const double c3 = best * 3.0 * floor;
    r.g2_max = {best, std::sqrt(c3) / (3.0 * floor)};
  } else {
    r.peak_bin = peak;
    r.g2_max = {r.g2[peak], r.stderr_g2[peak]};
  }
  return r;
}

ValueU auto_g2_zero(const ClickStream& stream, int64_t bin_ps, uint64_t seed) {
  auto [a, b] = split_stream(stream, 0.5, seed);
  // centered tau = 0 bin: |t_b - t_a| < bin/2
  const int64_t half = bin_ps / 2;
  int64_t coincidences = 0;
  size_t start = 0;
  for (int64_t t : a.t_ps) {
    while (start < b.t_ps.size() && b.t_ps[start] < t - half) ++start;
    for (size_t j = start; j < b.t_ps.size() && b.t_ps[j] < t + half; ++j) ++coincidences;
  }
  if (a.t_ps.empty() || b.t_ps.empty() || stream.duration_ps <= 0)
    throw StatsError("auto_g2_zero: empty stream");
  const double floor = static_cast<double>(a.t_ps.size()) *
                       static_cast<double>(b.t_ps.size()) * static_cast<double>(bin_ps) /
                       static_cast<double>(stream.duration_ps);
  if (coincidences == 0)
    throw StatsError("auto_g2_zero: insufficient statistics (no coincidences in the zero bin)");
  const double g = static_cast<double>(coincidences) / floor;
  return {g, std::sqrt(static_cast<double>(coincidences)) / floor};
}

CSCheck cs_violation(ValueU g2m, ValueU g_ss0, ValueU g_asas0) {
  if (!(g2m.value > 0) || !(g_ss0.value > 0) || !(g_asas0.value > 0))
    throw StatsError("cs_violation: inputs must be positive");
  CSCheck c;
  c.g2m = g2m;
  c.g_ss0 = g_ss0;
  c.g_asas0 = g_asas0;
  const double f = g2m.value * g2m.value / (g_ss0.value * g_asas0.value);
  const double rel = std::sqrt(4.0 * (g2m.u / g2m.value) * (g2m.u / g2m.value) +
                               (g_ss0.u / g_ss0.value) * (g_ss0.u / g_ss0.value) +
                               (g_asas0.u / g_asas0.value) * (g_asas0.u / g_asas0.value));
  c.violation_factor = {f, f * rel};
  c.violated = (f - c.violation_factor.u) > 1.0;
  return c;
}

ConditionalG2Result conditional_g2(const ClickStream& trigger, const ClickStream& arm_a,
                                   const ClickStream& arm_b,
                                   const std::vector<double>& window_widths_s) {
  ConditionalG2Result r;
  r.window_widths_s = window_widths_s;
  r.n_heralds = static_cast<int64_t>(trigger.t_ps.size());
  for (double w_s : window_widths_s) {
    const int64_t w = to_ps(w_s);
    int64_t n12 = 0, n13 = 0, n123 = 0;
    size_t ia = 0, ib = 0;
    for (int64_t t : trigger.t_ps) {
      while (ia < arm_a.t_ps.size() && arm_a.t_ps[ia] < t) ++ia;
      while (ib < arm_b.t_ps.size() && arm_b.t_ps[ib] < t) ++ib;
      const bool got_a = ia < arm_a.t_ps.size() && arm_a.t_ps[ia] < t + w;
      const bool got_b = ib < arm_b.t_ps.size() && arm_b.t_ps[ib] < t + w;
      n12 += got_a;
      n13 += got_b;
      n123 += got_a && got_b;
    }
    if (n12 == 0 || n13 == 0)
      throw StatsError("conditional_g2: no arm coincidences in window");
    const double n1 = static_cast<double>(r.n_heralds);
    const double g = n1 * static_cast<double>(n123) /
                     (static_cast<double>(n12) * static_cast<double>(n13));
    double u;
    if (n123 > 0) {
      u = g * std::sqrt(1.0 / static_cast<double>(n123) + 1.0 / static_cast<double>(n12) +
                        1.0 / static_cast<double>(n13));
    } else {
      u = n1 / (static_cast<double>(n12) * static_cast<double>(n13));  // one-count scale
    }
    r.g2c.push_back(g);
    r.u.push_back(u);
    r.n12.push_back(n12);
    r.n13.push_back(n13);
    r.n123.push_back(n123);
  }
  return r;
}

double back_out_generation_rate(double detected_pair_rate, const ExperimentConfig& cfg) {
  const double eff = cfg.efficiency_s() * cfg.efficiency_as();
  if (!(eff > 0)) throw NumericError("back_out_generation_rate: zero efficiency");
  return detected_pair_rate / eff;
}

ValueU detected_pair_rate(const CoincidenceHistogram& hist, double floor_counts) {
  double sum = 0;
  for (int64_t c : hist.counts) sum += static_cast<double>(c);
  const double signal = sum - floor_counts * static_cast<double>(hist.bins());
  const double duration_s = static_cast<double>(hist.duration_ps) / seconds_to_ps;
  if (!(duration_s > 0)) throw StatsError("detected_pair_rate: zero duration");
  return {signal / duration_s, std::sqrt(std::max(sum, 1.0)) / duration_s};
}

HistogramDecay fit_histogram_decay(const CoincidenceHistogram& hist) {
  const size_t n = hist.bins();
  size_t peak = 0;
  for (size_t i = 1; i < n; ++i)
    if (hist.counts[i] > hist.counts[peak]) peak = i;
  const double floor = measured_floor(hist, peak);
  const double peak_amp = static_cast<double>(hist.counts[peak]) - floor;
  if (!(peak_amp > 3.0 * std::sqrt(std::max(floor, 1.0))))
    throw StatsError("fit_histogram_decay: no signal above the floor");

  std::vector<double> tau(n), counts(n);
  for (size_t i = 0; i < n; ++i) {
    tau[i] = hist.tau_center_s(i);
    counts[i] = static_cast<double>(hist.counts[i]);
  }
  // log-linear start, then Poisson MLE on mu_i = A exp(-(tau-tau_pk)/tau_b) + floor
  const DecayFit start = fit_decay(tau, counts, std::nullopt, floor);
  const double tau_pk = tau[peak];
  auto negloglike = [&](const std::vector<double>& x) {
    const double amp = std::exp(x[0]);
    const double tb = std::exp(x[1]);
    double nll = 0;
    for (size_t i = peak; i < n; ++i) {
      const double mu = amp * std::exp(-(tau[i] - tau_pk) / tb) + floor;
      nll -= counts[i] * std::log(mu) - mu;
    }
    return nll;
  };
  OptimResult opt = nelder_mead(negloglike, {std::log(std::max(peak_amp, 1e-9)),
                                             std::log(start.tau_b)},
                                {0.3, 0.3}, 400, 1e-10);
  const double tau_b = std::exp(opt.x[1]);

  // 1-sigma from the observed information (numerical second derivative)
  const double h = 1e-4;
  auto at = [&](double dx) {
    std::vector<double> x = opt.x;
    x[1] += dx;
    return negloglike(x);
  };
  const double d2 = (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h);
  const double sigma_log = d2 > 0 ? 1.0 / std::sqrt(d2) : 0.0;

  HistogramDecay out;
  out.fit.tau_b = tau_b;
  out.fit.stderr_s = tau_b * sigma_log;
  out.floor_counts = floor;
  out.peak_tau_s = tau_pk;
  return out;
}

}  // namespace bp
