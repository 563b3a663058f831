#include "biphoton/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "biphoton/errors.hpp"
#include "biphoton/harness.hpp"
#include "biphoton/optim.hpp"
#include "biphoton/units.hpp"

namespace bp {

std::vector<Anchor> default_anchors() {
  return {
      {"one_over_e_time", 27e-3, 6e-3, 47e-9},
      {"one_over_e_time", 9e-3, 6e-3, 60e-9},
      {"one_over_e_time", 1e-3, 6e-3, 94e-9},
      {"pair_rate", 27e-3, 7e-3, 2000.0},
      {"g2_max", 27e-3, 6e-3, 11.0},
      {"g2_max", 9e-3, 6e-3, 11.0},
      {"g2_max", 1e-3, 6e-3, 6.0},
  };
}

std::vector<Anchor> parse_anchors_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open anchors file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw ConfigError("anchors file '" + path + "': " + e.what());
  }
  if (!j.is_array()) throw ConfigError("anchors file must be a JSON array");
  std::vector<Anchor> anchors;
  for (const auto& item : j) {
    Anchor a;
    a.kind = item.at("kind").get<std::string>();
    if (a.kind != "one_over_e_time" && a.kind != "pair_rate" && a.kind != "g2_max")
      throw ConfigError("anchor kind '" + a.kind + "' not recognized");
    auto qty = [&](const char* key, units::Dim dim) {
      if (!item.contains(key)) return 0.0;
      const auto& v = item.at(key);
      if (v.is_number()) return v.get<double>();
      return units::parse_quantity(v.get<std::string>(), dim, key);
    };
    a.coupling_power = qty("coupling_power", units::Dim::power);
    a.pump_power = qty("pump_power", units::Dim::power);
    a.target = a.kind == "one_over_e_time" ? qty("target", units::Dim::time)
                                           : qty("target", units::Dim::dimensionless);
    if (!(a.target > 0)) throw ConfigError("anchor target must be positive");
    anchors.push_back(a);
  }
  return anchors;
}

ExperimentConfig CalibrationResult::apply(ExperimentConfig base) const {
  base.density_override = density;
  base.cell.ground_decoherence_rate = gamma12;
  base.lasers.coupling_rabi_scale = coupling_rabi_scale;
  base.noise.raman_background_as = raman_background;
  base.noise.leakage_s = raman_background * base.noise.optical_pumping_suppression;
  base.rate_constant = rate_constant;
  return base;
}

namespace {

// smooth bounded transform: p = lo (hi/lo)^sigmoid(x)
double to_bounded(double x, double lo, double hi) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  return lo * std::pow(hi / lo, s);
}
double from_bounded(double p, double lo, double hi) {
  const double s = std::log(p / lo) / std::log(hi / lo);
  const double sc = std::min(std::max(s, 1e-6), 1.0 - 1e-6);
  return std::log(sc / (1.0 - sc));
}

struct Bounds {
  double density_lo = 1e16, density_hi = 1e19;          // m^-3
  double gamma12_lo = consts::two_pi * 1e3, gamma12_hi = consts::two_pi * 5e6;
  double rabi_lo = 0.05, rabi_hi = 1.0;
  double noise_lo = 1.0, noise_hi = 1e7;                // Hz
};

ExperimentConfig at_point(ExperimentConfig cfg, const Anchor& a) {
  if (a.coupling_power > 0) cfg.lasers.coupling_power = a.coupling_power;
  if (a.pump_power > 0) cfg.lasers.pump_power = a.pump_power;
  return cfg;
}

double one_over_e_time_of(const ExperimentConfig& cfg, const JsaQuality& q) {
  const JsaParts parts = joint_spectrum_parts(cfg, q);
  const BiphotonWaveform wf = waveform_from_spectrum(parts.jsa, 1.0);
  std::vector<double> inten(wf.psi.size());
  for (size_t i = 0; i < inten.size(); ++i) inten[i] = std::norm(wf.psi[i]);
  return correlation_time_1e(wf.tau, inten);
}

}  // namespace

CalibrationResult calibrate(const ExperimentConfig& base, const std::vector<Anchor>& anchors) {
  if (anchors.size() < 3)
    throw StatsError("calibrate: underdetermined (need >= 3 anchors)");
  std::vector<Anchor> time_anchors, rate_anchors, g2_anchors;
  for (const auto& a : anchors) {
    if (a.kind == "one_over_e_time") time_anchors.push_back(a);
    if (a.kind == "pair_rate") rate_anchors.push_back(a);
    if (a.kind == "g2_max") g2_anchors.push_back(a);
  }
  std::set<double> distinct;
  for (const auto& a : time_anchors) distinct.insert(a.coupling_power);
  if (distinct.size() < 2)
    throw StatsError("calibrate: underdetermined (need >= 2 distinct correlation-time points)");

  const Bounds b;
  const JsaQuality fit_quality{4096, 2048, true};

  CalibrationResult result;
  result.anchors = anchors;

  // Stage A: shape parameters against the correlation times
  auto objective = [&](const std::vector<double>& x) {
    ExperimentConfig cfg = base;
    cfg.density_override = to_bounded(x[0], b.density_lo, b.density_hi);
    cfg.cell.ground_decoherence_rate = to_bounded(x[1], b.gamma12_lo, b.gamma12_hi);
    cfg.lasers.coupling_rabi_scale = to_bounded(x[2], b.rabi_lo, b.rabi_hi);
    double sum = 0.0;
    for (const auto& a : time_anchors) {
      double t;
      try {
        t = one_over_e_time_of(at_point(cfg, a), fit_quality);
      } catch (const std::exception&) {
        return 1e6;  // penalize parameter regions where the model degenerates
      }
      const double r = t / a.target - 1.0;
      sum += r * r;
    }
    return sum;
  };

  const double n0 = base.density_override
                        ? *base.density_override
                        : vapor_density(base.cell.temperature, base.species.isotopic_purity);
  std::vector<double> x0 = {
      from_bounded(std::min(std::max(2.0 * n0, b.density_lo), b.density_hi), b.density_lo,
                   b.density_hi),
      from_bounded(consts::two_pi * 1e6, b.gamma12_lo, b.gamma12_hi),
      from_bounded(0.5, b.rabi_lo, b.rabi_hi)};
  OptimResult opt = nelder_mead(objective, x0, {0.6, 0.6, 0.6}, 120, 1e-5);
  result.density = to_bounded(opt.x[0], b.density_lo, b.density_hi);
  result.gamma12 = to_bounded(opt.x[1], b.gamma12_lo, b.gamma12_hi);
  result.coupling_rabi_scale = to_bounded(opt.x[2], b.rabi_lo, b.rabi_hi);
  result.converged = opt.converged;
  result.iterations = opt.iterations;

  ExperimentConfig fitted = base;
  fitted.density_override = result.density;
  fitted.cell.ground_decoherence_rate = result.gamma12;
  fitted.lasers.coupling_rabi_scale = result.coupling_rabi_scale;

  // Stage B: rate constant (model rate is exactly linear in it)
  result.rate_constant = base.rate_constant;
  if (!rate_anchors.empty()) {
    const Anchor& a = rate_anchors.front();
    ExperimentConfig cfg = at_point(fitted, a);
    cfg.rate_constant = 1.0;
    const JointSpectralAmplitude jsa = joint_spectrum(cfg);
    const double raw = pair_rate(jsa, cfg);
    if (!(raw > 0)) throw NumericError("calibrate: model pair rate vanished");
    result.rate_constant = a.target / raw;
  }
  fitted.rate_constant = result.rate_constant;

  // Stage C: noise rates against the g2_max anchors via the rate-ratio model
  result.raman_background = base.noise.raman_background_as;
  if (!g2_anchors.empty()) {
    struct Point {
      double rate;
      BiphotonWaveform wf;
      double target;
    };
    std::vector<Point> pts;
    for (const auto& a : g2_anchors) {
      ExperimentConfig cfg = at_point(fitted, a);
      const WaveformRun run = run_waveform(cfg, "");
      pts.push_back({run.metrics.pair_rate, run.waveform, a.target});
    }
    auto g2_obj = [&](double lx) {
      const double x = std::exp(lx);
      double sum = 0.0;
      size_t i = 0;
      for (const auto& a : g2_anchors) {
        ExperimentConfig cfg = at_point(fitted, a);
        cfg.noise.raman_background_as = x / cfg.noise.optical_pumping_suppression;
        cfg.noise.leakage_s = x;
        const double g = g2m_rate_ratio_model(cfg, pts[i].rate, pts[i].wf);
        const double r = g / a.target - 1.0;
        sum += r * r;
        ++i;
      }
      return sum;
    };
    const double lx = golden_section_min(g2_obj, std::log(b.noise_lo), std::log(b.noise_hi),
                                         1e-4);
    const double x = std::exp(lx);
    result.raman_background = x / fitted.noise.optical_pumping_suppression;
    fitted.noise.raman_background_as = result.raman_background;
    fitted.noise.leakage_s = x;
  }

  // residuals at production quality
  for (const auto& a : anchors) {
    ExperimentConfig cfg = at_point(fitted, a);
    double model = 0.0;
    if (a.kind == "one_over_e_time") {
      model = one_over_e_time_of(cfg, JsaQuality{});
    } else if (a.kind == "pair_rate") {
      const JointSpectralAmplitude jsa = joint_spectrum(cfg);
      model = pair_rate(jsa, cfg);
    } else {
      const WaveformRun run = run_waveform(cfg, "");
      model = g2m_rate_ratio_model(cfg, run.metrics.pair_rate, run.waveform);
    }
    result.residuals.push_back(model / a.target - 1.0);
  }
  return result;
}

}  // namespace bp
