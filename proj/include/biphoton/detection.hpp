#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/biphoton.hpp"

namespace bp {

// All click timestamps are integer picoseconds: detector physics is applied on
// the quantized values, so a stream written to disk and read back analyzes
// bit-identically to the in-process one.
constexpr double seconds_to_ps = 1e12;
int64_t to_ps(double seconds);

// mt19937_64 with explicit samplers. std::*_distribution is
// implementation-defined, so the mapping from bits to variates is spelled out
// here and byte-identical reruns are guaranteed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  double uniform();                 // [0, 1), 53-bit
  double exponential(double rate);  // mean 1/rate
  double gaussian(double sigma);    // Box-Muller
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stable per-purpose seed derivation (splitmix64 over master ^ fnv1a(label)).
uint64_t derive_seed(uint64_t master, const std::string& label);

struct SeedRecord {
  uint64_t master = 0;
  std::string lineage;
};

struct ClickStream {
  int channel = 0;
  std::vector<int64_t> t_ps;  // sorted, all in [0, duration_ps)
  int64_t duration_ps = 0;
  SeedRecord seed;

  double rate() const {
    return duration_ps > 0 ? static_cast<double>(t_ps.size()) * seconds_to_ps /
                                 static_cast<double>(duration_ps)
                           : 0.0;
  }
  // Throws NumericError on violation: unsorted, out of range, or a gap below
  // dead_time_ps when one is given.
  void validate(int64_t dead_time_ps = 0) const;
};

struct PairEventList {
  std::vector<std::pair<double, double>> events;  // (t_s, t_as), seconds
  double rate = 0.0;                              // pairs/s used for generation
  std::string waveform_fingerprint;
};

// Stokes times from a homogeneous Poisson process; anti-Stokes delay drawn
// from |psi(tau)|^2 by inverse-CDF sampling on the waveform grid with linear
// interpolation. Identical seed gives identical output.
PairEventList generate_pairs(double rate, const BiphotonWaveform& wf, double duration,
                             uint64_t seed);

// Bernoulli thinning at the composite efficiency, Gaussian timing jitter,
// quantization to ps, then dead-time removal in time order. Events landing
// outside [0, duration) are dropped.
ClickStream apply_channel(const std::vector<double>& times, double duration, int channel,
                          double efficiency, double jitter_sigma, double dead_time,
                          uint64_t seed, const std::string& lineage);

// Homogeneous Poisson stream (backgrounds, benchmarks).
ClickStream poisson_stream(double rate, double duration, int channel, uint64_t seed,
                           const std::string& lineage);

// Merge an independent Poisson background of the given rate; re-sorts and
// re-applies dead time if reapply_dead_time_ps > 0.
ClickStream add_background(const ClickStream& in, double rate, uint64_t seed,
                           int64_t reapply_dead_time_ps = 0);

// Bernoulli routing of each click: first stream with probability `ratio`.
// Union of outputs equals the input; intersection is empty.
std::pair<ClickStream, ClickStream> split_stream(const ClickStream& in, double ratio,
                                                 uint64_t seed);

}  // namespace bp
