#include "biphoton/detection.hpp"

#include <algorithm>
#include <cmath>

#include "biphoton/errors.hpp"

namespace bp {

int64_t to_ps(double seconds) { return std::llround(seconds * seconds_to_ps); }

double Rng::uniform() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::exponential(double rate) {
  double u;
  do {
    u = uniform();
  } while (u <= 0.0);
  return -std::log(u) / rate;
}

double Rng::gaussian(double sigma) {
  if (have_spare_) {
    have_spare_ = false;
    return spare_ * sigma;
  }
  double u1, u2;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(consts::two_pi * u2);
  have_spare_ = true;
  return r * std::cos(consts::two_pi * u2) * sigma;
}

uint64_t derive_seed(uint64_t master, const std::string& label) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  uint64_t z = master ^ h;
  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void ClickStream::validate(int64_t dead_time_ps) const {
  for (size_t i = 0; i < t_ps.size(); ++i) {
    if (t_ps[i] < 0 || t_ps[i] >= duration_ps)
      throw NumericError("ClickStream: timestamp outside [0, duration)");
    if (i > 0) {
      if (t_ps[i] < t_ps[i - 1]) throw NumericError("ClickStream: not sorted");
      if (dead_time_ps > 0 && t_ps[i] - t_ps[i - 1] < dead_time_ps)
        throw NumericError("ClickStream: gap below dead time");
    }
  }
}

PairEventList generate_pairs(double rate, const BiphotonWaveform& wf, double duration,
                             uint64_t seed) {
  if (rate < 0) throw NumericError("generate_pairs: rate must be >= 0");
  PairEventList out;
  out.rate = rate;
  out.waveform_fingerprint = wf.fingerprint;
  if (rate == 0.0 || duration <= 0.0) return out;

  // cumulative of |psi|^2 on the tau grid; piecewise-linear inverse CDF
  const size_t n = wf.psi.size();
  if (n < 2) throw NumericError("generate_pairs: waveform too short");
  std::vector<double> cdf(n + 1, 0.0);
  for (size_t i = 0; i < n; ++i) cdf[i + 1] = cdf[i] + std::norm(wf.psi[i]);
  const double total = cdf.back();
  if (!(total > 0.0) || !std::isfinite(total))
    throw NumericError("generate_pairs: waveform not normalizable");
  for (auto& c : cdf) c /= total;
  const double dtau = wf.step();
  const double tau0 = wf.tau.front() - 0.5 * dtau;  // bin i covers tau0 + [i, i+1) dtau

  Rng rng(seed);
  out.events.reserve(static_cast<size_t>(rate * duration * 1.1) + 16);
  double t = rng.exponential(rate);
  while (t < duration) {
    const double u = rng.uniform();
    const size_t bin =
        static_cast<size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()) - 1;
    const size_t i = std::min(bin, n - 1);
    const double frac = (cdf[i + 1] > cdf[i]) ? (u - cdf[i]) / (cdf[i + 1] - cdf[i]) : 0.5;
    const double tau = tau0 + (static_cast<double>(i) + frac) * dtau;
    out.events.emplace_back(t, t + tau);
    t += rng.exponential(rate);
  }
  return out;
}

namespace {

ClickStream finish_stream(std::vector<int64_t> ts, double duration, int channel,
                          int64_t dead_ps, uint64_t master, const std::string& lineage) {
  ClickStream s;
  s.channel = channel;
  s.duration_ps = to_ps(duration);
  s.seed = {master, lineage};
  std::sort(ts.begin(), ts.end());
  s.t_ps.reserve(ts.size());
  int64_t last = -1;
  for (int64_t t : ts) {
    if (t < 0 || t >= s.duration_ps) continue;
    if (dead_ps > 0 && last >= 0 && t - last < dead_ps) continue;
    s.t_ps.push_back(t);
    last = t;
  }
  return s;
}

}  // namespace

ClickStream apply_channel(const std::vector<double>& times, double duration, int channel,
                          double efficiency, double jitter_sigma, double dead_time,
                          uint64_t seed, const std::string& lineage) {
  if (efficiency < 0 || efficiency > 1)
    throw NumericError("apply_channel: efficiency must be in [0, 1]");
  Rng rng(seed);
  std::vector<int64_t> kept;
  kept.reserve(static_cast<size_t>(times.size() * efficiency) + 16);
  for (double t : times) {
    if (!rng.bernoulli(efficiency)) continue;
    const double jittered = jitter_sigma > 0 ? t + rng.gaussian(jitter_sigma) : t;
    kept.push_back(to_ps(jittered));
  }
  return finish_stream(std::move(kept), duration, channel, to_ps(dead_time), seed, lineage);
}

ClickStream poisson_stream(double rate, double duration, int channel, uint64_t seed,
                           const std::string& lineage) {
  Rng rng(seed);
  std::vector<int64_t> ts;
  if (rate > 0) {
    ts.reserve(static_cast<size_t>(rate * duration * 1.1) + 16);
    for (double t = rng.exponential(rate); t < duration; t += rng.exponential(rate))
      ts.push_back(to_ps(t));
  }
  return finish_stream(std::move(ts), duration, channel, 0, seed, lineage);
}

ClickStream add_background(const ClickStream& in, double rate, uint64_t seed,
                           int64_t reapply_dead_time_ps) {
  if (rate < 0) throw NumericError("add_background: rate must be >= 0");
  const double duration = static_cast<double>(in.duration_ps) / seconds_to_ps;
  ClickStream bg = poisson_stream(rate, duration, in.channel, seed, "background");
  std::vector<int64_t> merged;
  merged.resize(in.t_ps.size() + bg.t_ps.size());
  std::merge(in.t_ps.begin(), in.t_ps.end(), bg.t_ps.begin(), bg.t_ps.end(),
             merged.begin());
  ClickStream out;
  out.channel = in.channel;
  out.duration_ps = in.duration_ps;
  out.seed = {seed, in.seed.lineage + "+background"};
  if (reapply_dead_time_ps > 0) {
    out.t_ps.reserve(merged.size());
    int64_t last = -1;
    for (int64_t t : merged) {
      if (last >= 0 && t - last < reapply_dead_time_ps) continue;
      out.t_ps.push_back(t);
      last = t;
    }
  } else {
    out.t_ps = std::move(merged);
  }
  return out;
}

std::pair<ClickStream, ClickStream> split_stream(const ClickStream& in, double ratio,
                                                 uint64_t seed) {
  if (ratio < 0 || ratio > 1) throw NumericError("split_stream: ratio must be in [0, 1]");
  Rng rng(seed);
  ClickStream a, b;
  a.channel = in.channel;
  b.channel = in.channel + 1;
  a.duration_ps = b.duration_ps = in.duration_ps;
  a.seed = {seed, in.seed.lineage + "+splitA"};
  b.seed = {seed, in.seed.lineage + "+splitB"};
  for (int64_t t : in.t_ps) {
    if (rng.bernoulli(ratio))
      a.t_ps.push_back(t);
    else
      b.t_ps.push_back(t);
  }
  return {std::move(a), std::move(b)};
}

}  // namespace bp
