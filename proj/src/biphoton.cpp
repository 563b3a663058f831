#include "biphoton/biphoton.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "biphoton/errors.hpp"

namespace bp {

namespace {

// FWHM pinning for the Lorentzian-squared etalon: T = 1/(1+(delta/a)^2)^2
// reaches 1/2 at delta = a sqrt(sqrt(2)-1).
double etalon_a(const FilterChannel& f) {
  const double w_fwhm = consts::two_pi * f.bandwidth;
  return 0.5 * w_fwhm / std::sqrt(std::sqrt(2.0) - 1.0);
}

struct GridSpec {
  size_t n;
  double step;
};

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

JsaParts assemble(const ExperimentConfig& cfg, const MediumParams& p,
                  const VelocityQuadrature& quad, const GridSpec& gs) {
  JsaParts out;
  out.omega_as0 = consts::two_pi * consts::c / cfg.species.d1_wavelength;
  out.omega_s0 =
      consts::two_pi * consts::c / cfg.species.d2_wavelength + cfg.lasers.pump_detuning;

  const std::vector<double> grid = make_symmetric_grid(gs.n, gs.step);
  AveragedChi chi = doppler_average_chi(grid, quad, p);
  out.chi_as = std::move(chi.chi_as);
  out.chi3 = std::move(chi.chi3);
  out.chi_s = std::move(chi.chi_s);

  out.k_as = wavevector(out.chi_as, out.omega_as0, SpectrumLabel::k_as);
  if (cfg.numerics.include_stokes_dispersion) {
    out.k_s = wavevector(out.chi_s, out.omega_s0, SpectrumLabel::k_s);
  } else {
    ComplexSpectrum vac;
    vac.grid = grid;
    vac.label = SpectrumLabel::chi_s;
    vac.values.assign(gs.n, cplx(0.0, 0.0));
    out.k_s = wavevector(vac, out.omega_s0, SpectrumLabel::k_s);
  }
  out.delta_k = phase_mismatch(out.k_as, out.k_s, p, out.omega_as0, out.omega_s0,
                               cfg.lasers.alignment_angle);
  const std::vector<double> alpha = absorption_coefficient(out.k_as);
  out.phi = longitudinal_profile(out.delta_k, alpha, cfg.cell.length);
  out.transmission = eit_transmission(out.chi_as, out.omega_as0, cfg.cell.length);

  const double e_pump =
      gaussian_peak_field(cfg.lasers.pump_power, cfg.lasers.pump_diameter);
  const double e_coupling =
      gaussian_peak_field(cfg.lasers.coupling_power, cfg.lasers.coupling_diameter);
  const double kappa_scale =
      std::sqrt(out.omega_s0 * out.omega_as0) / (2.0 * consts::c) * e_pump * e_coupling;

  const double a_as = etalon_a(cfg.filters.anti_stokes);
  const double a_s = etalon_a(cfg.filters.stokes);

  out.jsa.spec.grid = grid;
  out.jsa.spec.label = SpectrumLabel::jsa;
  out.jsa.spec.values.resize(gs.n);
  for (size_t j = 0; j < gs.n; ++j) {
    const double d = grid[j];
    // anti-Stokes at +delta, Stokes at -delta; amplitude = sqrt of power shape
    const double xa = d / a_as;
    const double xs = d / a_s;  // symmetric shape: shape(-d) == shape(d)
    const double filt = 1.0 / ((1.0 + xa * xa) * (1.0 + xs * xs));
    out.jsa.spec.values[j] = kappa_scale * out.chi3.values[j] * out.phi.values[j] * filt;
  }
  out.jsa.fingerprint = config_fingerprint(cfg);
  return out;
}

// Intensity FWHM by half-max crossings with linear interpolation; returns 0
// when no crossing exists.
double fwhm_of(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = y.size();
  size_t pk = 0;
  for (size_t i = 1; i < n; ++i)
    if (y[i] > y[pk]) pk = i;
  if (y[pk] <= 0.0) return 0.0;
  const double half = 0.5 * y[pk];
  double lo = 0.0, hi = 0.0;
  bool has_lo = false, has_hi = false;
  for (size_t i = 1; i <= pk; ++i) {
    if (y[i - 1] < half && y[i] >= half) {
      const double f = (half - y[i - 1]) / (y[i] - y[i - 1]);
      lo = x[i - 1] + f * (x[i] - x[i - 1]);
      has_lo = true;
    }
  }
  for (size_t i = n - 1; i > pk; --i) {
    if (y[i] < half && y[i - 1] >= half) {
      const double f = (half - y[i]) / (y[i - 1] - y[i]);
      hi = x[i] - f * (x[i] - x[i - 1]);
      has_hi = true;
    }
  }
  if (!has_lo || !has_hi) return 0.0;
  return hi - lo;
}

}  // namespace

double etalon_power_shape(double delta, const FilterChannel& f) {
  const double x = delta / etalon_a(f);
  const double lor = 1.0 / (1.0 + x * x);
  return lor * lor;
}

void JointSpectralAmplitude::validate() const {
  spec.validate();
  double sum = 0.0;
  for (const auto& v : spec.values) sum += std::norm(v);
  sum *= spec.step();
  if (!std::isfinite(sum))
    throw NumericError("JointSpectralAmplitude: not square-integrable");
}

JsaParts joint_spectrum_parts(const ExperimentConfig& cfg, const JsaQuality& quality) {
  validate(cfg);
  MediumParams p = medium_params_from_config(cfg);
  const double sigma_v = velocity_sigma(cfg.cell.temperature, cfg.species.mass);
  size_t vnodes = static_cast<size_t>(cfg.numerics.velocity_nodes);
  if (quality.velocity_nodes_cap > 0)
    vnodes = std::min(vnodes, static_cast<size_t>(quality.velocity_nodes_cap));
  const auto quad = VelocityQuadrature::gaussian_midpoint(vnodes, sigma_v,
                                                          cfg.numerics.velocity_span_sigmas);

  const double k_doppler = std::abs(p.k_as) * sigma_v;  // one-photon Doppler scale, rad/s
  const double filter_scale = consts::two_pi * 4.0 * cfg.filters.anti_stokes.bandwidth;
  // fast mode trims the Doppler absorption band; the envelope core is kept
  const double half_floor =
      quality.wide_span ? 3.0 * k_doppler + filter_scale : filter_scale;

  if (p.density == 0.0) {
    // no medium: JSA is identically zero on the default grid
    GridSpec gs{4096, 2.0 * half_floor / 4096.0};
    return assemble(cfg, p, quad, gs);
  }
  if (p.omega_c <= 0.0)
    throw NumericError("joint_spectrum: EIT window unresolvable (coupling Rabi frequency is zero)");

  // probe pass to estimate the envelope width
  GridSpec probe{1024, 2.0 * (3.0 * k_doppler + filter_scale) / 1024.0};
  JsaParts pp = assemble(cfg, p, quad, probe);
  std::vector<double> inten(pp.jsa.spec.size());
  for (size_t i = 0; i < inten.size(); ++i) inten[i] = std::norm(pp.jsa.spec.values[i]);
  const double width = fwhm_of(pp.jsa.spec.grid, inten);
  if (width <= 0.0)
    throw NumericError("joint_spectrum: grid auto-size failure (EIT width unresolvable)");

  const double half = std::max(0.5 * cfg.numerics.span_envelope_mult * width, half_floor);
  const size_t n_cap = size_t{1} << 18;
  double tau_est = 1.0 / width;  // decay scale of a Lorentzian of this FWHM

  // iterate until the tau span comfortably contains the realized decay (the
  // probe resolution can understate narrow EIT cores)
  JsaParts parts;
  for (int pass = 0;; ++pass) {
    size_t n;
    if (cfg.numerics.frequency_points > 0) {
      n = next_pow2(static_cast<size_t>(cfg.numerics.frequency_points));
    } else {
      const double step_max = consts::pi / (6.0 * tau_est);  // tau span >= 12 tau_est
      n = next_pow2(static_cast<size_t>(std::ceil(2.0 * half / step_max)));
      n = std::max<size_t>(n, quality.min_points);
      n = std::min(n, n_cap);
    }
    GridSpec gs{n, 2.0 * half / static_cast<double>(n)};
    parts = assemble(cfg, p, quad, gs);
    if (cfg.numerics.frequency_points > 0) break;

    BiphotonWaveform wf = waveform_from_spectrum(parts.jsa, 1.0);
    std::vector<double> wi(wf.psi.size());
    for (size_t i = 0; i < wi.size(); ++i) wi[i] = std::norm(wf.psi[i]);
    double tau_meas;
    try {
      tau_meas = correlation_time_1e(wf.tau, wi);
    } catch (const StatsError&) {
      tau_meas = tau_est;
    }
    const double tau_span = wf.tau.back() - wf.tau.front();
    if (tau_span >= 10.0 * tau_meas || n >= n_cap) break;
    if (pass >= 4)
      throw NumericError("joint_spectrum: grid auto-size failed to converge");
    tau_est = std::max(2.0 * tau_est, 1.2 * tau_meas);
  }
  parts.jsa.validate();
  return parts;
}

JsaParts joint_spectrum_parts(const ExperimentConfig& cfg) {
  return joint_spectrum_parts(cfg, JsaQuality{});
}

JointSpectralAmplitude joint_spectrum(const ExperimentConfig& cfg) {
  return joint_spectrum_parts(cfg).jsa;
}

BiphotonWaveform waveform_from_spectrum(const JointSpectralAmplitude& jsa,
                                        double rate_constant) {
  const size_t n = jsa.spec.size();
  const double dstep = jsa.spec.step();
  const double dtau = consts::two_pi / (static_cast<double>(n) * dstep);

  static std::mutex plan_mutex;
  std::vector<cplx> in(n), out(n);
  // ordered positive-frequency-second input with alternating sign absorbs the
  // frequency offset; the residual linear phase is applied after the FFT
  for (size_t j = 0; j < n; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    in[j] = jsa.spec.values[j] * sign;
  }
  {
    std::unique_lock<std::mutex> lock(plan_mutex);
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
        reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    lock.unlock();
    fftw_execute(plan);
    lock.lock();
    fftw_destroy_plan(plan);
  }

  BiphotonWaveform wf;
  wf.tau.resize(n);
  wf.psi.resize(n);
  wf.rate_density.resize(n);
  wf.fingerprint = jsa.fingerprint;
  const double scale = dstep / consts::two_pi;
  const double nn = static_cast<double>(n);
  // residual linear phase from the grid center offset c = (n-1)/2:
  // psi(tau_m) = scale * e^{-i pi c} e^{i 2 pi c m / n} * DFT[J_j (-1)^j]_m
  const double c_off = 0.5 * (nn - 1.0);
  for (size_t m = 0; m < n; ++m) {
    const double phase =
        -consts::pi * c_off + consts::two_pi * c_off * static_cast<double>(m) / nn;
    wf.tau[m] = (static_cast<double>(m) - nn / 2.0) * dtau;
    wf.psi[m] = scale * out[m] * std::polar(1.0, phase);
    wf.rate_density[m] = rate_constant * std::norm(wf.psi[m]);
  }
  return wf;
}

DecayFit fit_decay(const std::vector<double>& tau, const std::vector<double>& intensity,
                   std::optional<std::pair<double, double>> window, double background) {
  if (tau.size() != intensity.size() || tau.size() < 4)
    throw StatsError("fit_decay: need matching tau/intensity arrays");
  size_t pk = 0;
  for (size_t i = 1; i < intensity.size(); ++i)
    if (intensity[i] > intensity[pk]) pk = i;
  const double peak = intensity[pk] - background;
  if (!(peak > 0)) throw StatsError("fit_decay: no signal above background");

  double lo, hi;
  if (window) {
    lo = window->first;
    hi = window->second;
  } else {
    lo = tau[pk] + 5e-9;
    const double floor_level = std::max(2.0 * background, background + 1e-6 * peak);
    hi = tau.back();
    for (size_t i = pk; i < tau.size(); ++i) {
      if (intensity[i] <= floor_level) {
        hi = tau[i];
        break;
      }
    }
  }
  if (!(hi > lo)) throw StatsError("fit_decay: degenerate window");

  // weighted LS on log(I - background), weights ~ I (Poisson-motivated)
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  size_t count = 0;
  for (size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] < lo || tau[i] > hi || tau[i] <= tau[pk]) continue;
    const double y = intensity[i] - background;
    if (y <= 0) continue;
    const double w = y;
    const double ly = std::log(y);
    sw += w;
    swx += w * tau[i];
    swy += w * ly;
    swxx += w * tau[i] * tau[i];
    swxy += w * tau[i] * ly;
    ++count;
  }
  if (count < 10) throw StatsError("fit_decay: degenerate window (need >= 10 points past peak)");
  const double det = sw * swxx - swx * swx;
  if (!(std::abs(det) > 0)) throw StatsError("fit_decay: singular fit");
  const double slope = (sw * swxy - swx * swy) / det;
  if (!(slope < 0)) throw StatsError("fit_decay: non-decaying data");

  // residual-based slope uncertainty
  const double intercept = (swy - slope * swx) / sw;
  double ssr = 0;
  for (size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] < lo || tau[i] > hi || tau[i] <= tau[pk]) continue;
    const double y = intensity[i] - background;
    if (y <= 0) continue;
    const double r = std::log(y) - (intercept + slope * tau[i]);
    ssr += y * r * r;
  }
  const double dof = std::max<double>(1.0, static_cast<double>(count) - 2.0);
  const double var_slope = (ssr / dof) * sw / det;
  const double tau_b = -1.0 / slope;
  DecayFit fit;
  fit.tau_b = tau_b;
  fit.stderr_s = tau_b * tau_b * std::sqrt(std::max(0.0, var_slope));
  return fit;
}

double correlation_time_1e(const std::vector<double>& tau,
                           const std::vector<double>& intensity) {
  size_t pk = 0;
  for (size_t i = 1; i < intensity.size(); ++i)
    if (intensity[i] > intensity[pk]) pk = i;
  const double level = intensity[pk] / std::exp(1.0);
  if (!(level > 0)) throw StatsError("correlation_time_1e: empty waveform");

  double first = 0, last = 0;
  bool has_first = false, has_last = false;
  for (size_t i = 1; i <= pk; ++i) {
    if (intensity[i - 1] < level && intensity[i] >= level) {
      const double f = (level - intensity[i - 1]) / (intensity[i] - intensity[i - 1]);
      first = tau[i - 1] + f * (tau[i] - tau[i - 1]);
      has_first = true;
      break;
    }
  }
  for (size_t i = intensity.size() - 1; i > pk; --i) {
    if (intensity[i] < level && intensity[i - 1] >= level) {
      const double f = (level - intensity[i]) / (intensity[i - 1] - intensity[i]);
      last = tau[i] - f * (tau[i] - tau[i - 1]);
      has_last = true;
      break;
    }
  }
  if (!has_first || !has_last)
    throw StatsError("correlation_time_1e: no 1/e crossing found");
  return last - first;
}

double pair_rate(const JointSpectralAmplitude& jsa, const ExperimentConfig& cfg) {
  double sum = 0.0;
  for (const auto& v : jsa.spec.values) sum += std::norm(v);
  return cfg.rate_constant * sum * jsa.spec.step() / consts::two_pi;
}

WaveformMetrics waveform_metrics(const JointSpectralAmplitude& jsa,
                                 const BiphotonWaveform& wf, const ExperimentConfig& cfg) {
  std::vector<double> inten(wf.psi.size());
  for (size_t i = 0; i < inten.size(); ++i) inten[i] = std::norm(wf.psi[i]);

  WaveformMetrics m;
  const DecayFit fit = fit_decay(wf.tau, inten);
  m.tau_b = fit.tau_b;
  m.fit_stderr = fit.stderr_s;
  m.one_over_e_time = correlation_time_1e(wf.tau, inten);
  m.bandwidth = 1.0 / (consts::two_pi * m.tau_b);
  size_t pk = 0;
  for (size_t i = 1; i < inten.size(); ++i)
    if (inten[i] > inten[pk]) pk = i;
  m.peak_time = wf.tau[pk];
  m.pair_rate = pair_rate(jsa, cfg);

  const double span = wf.tau.back() - wf.tau.front();
  if (span < 10.0 * m.tau_b)
    throw NumericError("waveform grid span below 10 decay constants; increase resolution");
  return m;
}

double intensity_fwhm_hz(const ComplexSpectrum& spec) {
  std::vector<double> inten(spec.size());
  for (size_t i = 0; i < inten.size(); ++i) inten[i] = std::norm(spec.values[i]);
  return fwhm_of(spec.grid, inten) / consts::two_pi;
}

}  // namespace bp
