#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "biphoton/biphoton.hpp"
#include "biphoton/config.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/medium.hpp"

using namespace bp;

namespace {

ExperimentConfig base_config(double coupling_mw = 9.0) {
  ExperimentConfig cfg;
  cfg.lasers.pump_power = 6e-3;
  cfg.lasers.coupling_power = coupling_mw * 1e-3;
  return cfg;
}

MediumParams params(double coupling_mw = 9.0, double angle = -1.0) {
  ExperimentConfig cfg = base_config(coupling_mw);
  if (angle >= 0) cfg.lasers.alignment_angle = angle;
  return medium_params_from_config(cfg);
}

}  // namespace

TEST_CASE("medium params encode the backward geometry") {
  const MediumParams p = params();
  CHECK(p.k_p * p.k_c < 0);
  CHECK(p.k_s * p.k_as < 0);
  CHECK(p.gamma13 == doctest::Approx(consts::pi * 6e6));  // Gamma/2
  CHECK(p.density == doctest::Approx(3.16800570e17).epsilon(1e-6));
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("chi_eit with zero coupling reduces to the two-level response") {
  MediumParams p = params();
  p.omega_c = 0.0;
  for (double v : {-150.0, 0.0, 42.0}) {
    for (double d : {-3e8, -2e7, 0.0, 5e6, 4e8}) {
      const cplx full = chi_eit(d, v, p);
      const cplx two_level = p.c_as / cplx(d - p.k_as * v, p.gamma13);
      CHECK(std::abs(full - two_level) <= 1e-14 * std::abs(two_level));
    }
  }
}

TEST_CASE("perfect transparency at exact two-photon resonance") {
  MediumParams p = params();
  p.gamma12 = 0.0;
  CHECK(std::abs(chi_eit(0.0, 0.0, p)) == 0.0);
}

TEST_CASE("EIT doublet: transparency dip at line center, dip fills with gamma12") {
  // dense-grid scan as the oracle for the doublet structure; the dip is the
  // local minimum between the Autler-Townes peaks
  MediumParams p = params(27.0);
  auto scan_dip = [&](double gamma12) {
    MediumParams q = p;
    q.gamma12 = gamma12;
    const double half = 0.45 * q.omega_c;  // between the doublet peaks
    double min_loss = 1e300, argmin = -1;
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
      const double d = -half + 2 * half * i / n;
      const double loss = -chi_eit(d, 0.0, q).imag();  // passive: Im chi <= 0
      CHECK(loss >= -1e-18);
      if (loss < min_loss) {
        min_loss = loss;
        argmin = d;
      }
    }
    const double peak_loss = -chi_eit(0.5 * q.omega_c, 0.0, q).imag();
    CHECK(std::abs(argmin) <= 2 * half / n + 1.0);  // dip sits at delta = 0
    return min_loss / peak_loss;
  };
  const double depth_small = scan_dip(consts::two_pi * 10e3);
  const double depth_large = scan_dip(consts::two_pi * 300e3);
  CHECK(depth_small < depth_large);  // dip fills in as gamma12 grows
}

TEST_CASE("chi_stokes: far-detuned tail") {
  MediumParams p = params();
  // delta_p -> infinity kills the response (1/delta_p tail)
  MediumParams far = p, farther = p;
  far.delta_p = 1e4 * p.delta_p;
  farther.delta_p = 1e5 * p.delta_p;
  CHECK(std::abs(chi_stokes(0.0, 0.0, far)) < 2e-4 * std::abs(chi_stokes(0.0, 0.0, p)));
  CHECK(std::abs(chi_stokes(0.0, 0.0, farther)) ==
        doctest::Approx(0.1 * std::abs(chi_stokes(0.0, 0.0, far))).epsilon(1e-3));
  // at the operating detuning the Stokes leg is dispersive and weak:
  // |Im chi_s| / |Im chi_resonant| ~ (gamma13/delta_p)^2 << 1e-4
  const double im_res = std::abs((p.c_s / cplx(0.0, p.gamma13)).imag());
  const double ratio = std::abs(chi_stokes(0.0, 0.0, p).imag()) / im_res;
  CHECK(ratio < 1e-4);
  CHECK(ratio == doctest::Approx(std::pow(p.gamma13 / p.delta_p, 2)).epsilon(1e-3));
  // resonant velocity class: v* = delta_p / k_s maximizes the loss at delta = 0
  const double v_star = p.delta_p / p.k_s;
  const double at_star = -chi_stokes(0.0, v_star, p).imag();
  for (double v : {v_star - 40.0, v_star + 40.0, 0.0}) {
    CHECK(at_star >= -chi_stokes(0.0, v, p).imag());
  }
}

TEST_CASE("chi3 scalings and shared pole structure") {
  MediumParams p = params(27.0);
  // |chi3(0)| ~ 1/Omega_c^2 at line center for large coupling
  MediumParams big = p, bigger = p;
  big.omega_c = 8e9;
  bigger.omega_c = 16e9;
  const double r = std::abs(chi3_sfwm(0, 0, big)) / std::abs(chi3_sfwm(0, 0, bigger));
  CHECK(r == doctest::Approx(4.0).epsilon(0.01));
  // doubling the pump detuning halves |chi3| in the far-detuned regime
  MediumParams dbl = p;
  dbl.delta_p = 2 * p.delta_p;
  CHECK(std::abs(chi3_sfwm(0, 0, dbl)) ==
        doctest::Approx(0.5 * std::abs(chi3_sfwm(0, 0, p))).epsilon(2e-3));
  // chi3 and chi_eit share the same denominator zeros
  for (double d : {-2e8, 1e7, 3e8}) {
    for (double v : {-90.0, 10.0}) {
      const cplx denom = eit_denominator(d, v, p);
      const cplx pump(p.delta_p + p.k_p * v, p.gamma13);
      CHECK(std::abs(chi3_sfwm(d, v, p) * pump * denom - p.c3) <= 1e-12 * p.c3);
      const double d2 = d - p.delta_c - p.k2 * v;
      CHECK(std::abs(chi_eit(d, v, p) * denom - p.c_as * cplx(d2, p.gamma12)) <=
            1e-12 * std::abs(p.c_as * denom));
    }
  }
}

TEST_CASE("doppler_average: degenerate and constant kernels") {
  const auto grid = make_symmetric_grid(128, 1e7);
  // T -> 0: all weight at v = 0
  const auto cold = VelocityQuadrature::gaussian_midpoint(256, 0.0, 7.0);
  const MediumParams p = params();
  const auto avg = doppler_average(
      [&](double d, double v) { return chi_eit(d, v, p); }, grid, cold,
      SpectrumLabel::chi_as);
  for (size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(avg.values[i] - chi_eit(grid[i], 0.0, p)) <=
          1e-12 * std::abs(avg.values[i]));
  // constant kernel: weights sum to one
  const auto warm = VelocityQuadrature::gaussian_midpoint(512, 179.3, 7.0);
  const auto c = doppler_average([](double, double) { return cplx(2.5, -1.5); }, grid,
                                 warm, SpectrumLabel::chi_as);
  for (const auto& v : c.values) CHECK(std::abs(v - cplx(2.5, -1.5)) < 1e-12);
  // non-finite kernel output is reported
  CHECK_THROWS_AS(doppler_average([](double, double) { return cplx(1.0 / 0.0, 0.0); },
                                  grid, warm, SpectrumLabel::chi_as),
                  NumericError);
}

TEST_CASE("two-level Doppler average reproduces the Voigt profile") {
  // oracle: high-resolution trapezoid integration over velocity
  MediumParams p = params();
  p.omega_c = 0.0;
  const double sigma_v = velocity_sigma(336.15, consts::rb::mass_87);
  const size_t n = 2401;
  const double span = consts::two_pi * 1.5e9;
  const auto grid = make_symmetric_grid(n, span / n);

  const auto quad = VelocityQuadrature::gaussian_midpoint(4096, sigma_v, 7.0);
  const auto avg = doppler_average(
      [&](double d, double v) { return chi_eit(d, v, p); }, grid, quad,
      SpectrumLabel::chi_as);

  std::vector<double> oracle(n, 0.0);
  {
    const int m = 262144;
    const double vspan = 8.0 * sigma_v;
    const double h = 2.0 * vspan / m;
    std::vector<double> w(m), vs(m);
    double wsum = 0;
    for (int i = 0; i < m; ++i) {
      vs[i] = -vspan + (i + 0.5) * h;
      w[i] = std::exp(-0.5 * vs[i] * vs[i] / (sigma_v * sigma_v));
      wsum += w[i];
    }
    for (size_t g = 0; g < n; ++g) {
      double acc = 0;
      for (int i = 0; i < m; ++i)
        acc += w[i] * (-p.c_as * p.gamma13 /
                       (std::pow(grid[g] - p.k_as * vs[i], 2) + p.gamma13 * p.gamma13));
      oracle[g] = acc / wsum;
    }
  }
  // compare losses and FWHM
  std::vector<double> loss(n);
  for (size_t i = 0; i < n; ++i) {
    loss[i] = -avg.values[i].imag();
    CHECK(std::abs(avg.values[i].imag() - oracle[i]) <=
          2e-4 * std::abs(oracle[n / 2]));
  }
  auto fwhm = [&](const std::vector<double>& y) {
    const double half = 0.5 * y[n / 2];
    size_t lo = 0, hi = n - 1;
    while (y[lo] < half) ++lo;
    while (y[hi] < half) --hi;
    return grid[hi] - grid[lo];
  };
  std::vector<double> oracle_loss(n);
  for (size_t i = 0; i < n; ++i) oracle_loss[i] = -oracle[i];
  CHECK(std::abs(fwhm(loss) / fwhm(oracle_loss) - 1.0) < 0.005);
  // and the width is the Doppler scale: sqrt(FWHM_D^2-ish) broadened by gamma
  const double doppler = consts::two_pi * doppler_fwhm(336.15, 795e-9, consts::rb::mass_87);
  CHECK(fwhm(loss) > doppler);
  CHECK(fwhm(loss) < 1.2 * doppler);
}

TEST_CASE("quadrature convergence: doubling the order is a no-op at production order") {
  ExperimentConfig cfg = base_config(9.0);
  const MediumParams p = medium_params_from_config(cfg);
  const double sigma_v = velocity_sigma(cfg.cell.temperature, cfg.species.mass);
  const auto grid = make_symmetric_grid(512, consts::two_pi * 2.2e9 / 512);
  const auto q1 = VelocityQuadrature::gaussian_midpoint(4096, sigma_v, 7.0);
  const auto q2 = VelocityQuadrature::gaussian_midpoint(8192, sigma_v, 7.0);
  const AveragedChi a = doppler_average_chi(grid, q1, p);
  const AveragedChi b = doppler_average_chi(grid, q2, p);
  auto rel = [&](const ComplexSpectrum& x, const ComplexSpectrum& y) {
    double scale = 0, worst = 0;
    for (const auto& v : x.values) scale = std::max(scale, std::abs(v));
    for (size_t i = 0; i < x.size(); ++i)
      worst = std::max(worst, std::abs(x.values[i] - y.values[i]) / scale);
    return worst;
  };
  CHECK(rel(a.chi_as, b.chi_as) < 1e-6);
  CHECK(rel(a.chi3, b.chi3) < 1e-6);
  CHECK(rel(a.chi_s, b.chi_s) < 1e-6);
}

TEST_CASE("passivity: Doppler-averaged anti-Stokes loss is nonnegative everywhere") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    ExperimentConfig cfg = base_config(0.3 + 30.0 * u(rng));
    cfg.cell.ground_decoherence_rate = consts::two_pi * (1e3 + 2e6 * u(rng));
    cfg.cell.two_photon_inhomogeneous = consts::two_pi * 2e6 * u(rng);
    cfg.cell.temperature = 300.0 + 80.0 * u(rng);
    const MediumParams p = medium_params_from_config(cfg);
    const double sigma_v = velocity_sigma(cfg.cell.temperature, cfg.species.mass);
    const auto grid = make_symmetric_grid(512, consts::two_pi * 3e9 / 512);
    const auto quad = VelocityQuadrature::gaussian_midpoint(4096, sigma_v, 7.0);
    const AveragedChi chi = doppler_average_chi(grid, quad, p);
    double peak = 0;
    for (const auto& v : chi.chi_as.values) peak = std::max(peak, -v.imag());
    for (const auto& v : chi.chi_as.values) CHECK(v.imag() <= 1e-9 * peak);
  }
}

TEST_CASE("wavevector: vacuum limit, Taylor bound, branch continuity") {
  const auto grid = make_symmetric_grid(256, 1e7);
  ComplexSpectrum chi;
  chi.grid = grid;
  chi.label = SpectrumLabel::chi_as;
  chi.values.assign(grid.size(), cplx(0, 0));
  const double om0 = consts::two_pi * consts::c / 795e-9;
  const auto kvac = wavevector(chi, om0, SpectrumLabel::k_as);
  for (size_t i = 0; i < grid.size(); ++i)
    CHECK(kvac.values[i].real() ==
          doctest::Approx((om0 + grid[i]) / consts::c).epsilon(1e-15));

  // small-chi Taylor: k ~ (om/c)(1 + chi/2) within |chi|^2 relative error
  for (size_t i = 0; i < grid.size(); ++i)
    chi.values[i] = cplx(3e-4 * std::sin(0.1 * i), -2e-4);
  const auto k = wavevector(chi, om0, SpectrumLabel::k_as);
  for (size_t i = 0; i < grid.size(); ++i) {
    const cplx approx = ((om0 + grid[i]) / consts::c) * (1.0 + 0.5 * chi.values[i]);
    CHECK(std::abs(k.values[i] - approx) <=
          2.0 * std::abs(chi.values[i]) * std::abs(chi.values[i]) *
              ((om0 + grid[i]) / consts::c));
  }
  // branch continuity on a realistic medium: no jumps beyond the local Taylor scale
  ExperimentConfig cfg = base_config(9.0);
  const auto parts = joint_spectrum_parts(cfg);
  const auto& ka = parts.k_as;
  for (size_t i = 1; i < ka.size(); ++i) {
    const double jump = std::abs(ka.values[i] - ka.values[i - 1]);
    CHECK(jump < 0.3 * std::abs(ka.values[i]));
  }
}

TEST_CASE("group delay is positive and grows as the coupling weakens") {
  // in the +i*gamma pole convention the spectra are conjugates of the
  // Im chi >= 0 convention, so the slow-light delay is -L dRe(k)/ddelta
  // stay in the transparent regime: the slow-light slope saturates once the
  // residual two-photon absorption closes the window at low power
  auto group_delay = [&](double coupling_mw) {
    ExperimentConfig cfg = base_config(coupling_mw);
    const auto parts = joint_spectrum_parts(cfg);
    const auto& k = parts.k_as;
    const size_t mid = k.size() / 2;
    const double dk = (k.values[mid + 1].real() - k.values[mid - 1].real()) /
                      (k.grid[mid + 1] - k.grid[mid - 1]);
    return -cfg.cell.length * dk;
  };
  const double tg27 = group_delay(27.0);
  const double tg9 = group_delay(9.0);
  const double tg3 = group_delay(3.0);
  CHECK(tg27 > 0);
  CHECK(tg9 > tg27);
  CHECK(tg3 > tg9);
}

TEST_CASE("phase mismatch: vacuum construction and EIT-dispersion dominance") {
  const auto grid = make_symmetric_grid(512, 1e7);
  ComplexSpectrum chi0;
  chi0.grid = grid;
  chi0.values.assign(grid.size(), cplx(0, 0));
  const double om_as = consts::two_pi * consts::c / 795e-9;
  const double om_s = consts::two_pi * consts::c / 780e-9 - consts::two_pi * 2.7e9;
  const auto k_as = wavevector(chi0, om_as, SpectrumLabel::k_as);
  const auto k_s = wavevector(chi0, om_s, SpectrumLabel::k_s);
  const MediumParams p = params();

  // zero alignment angle: exact zero by construction of the central frequencies
  const auto dk0 = phase_mismatch(k_as, k_s, p, om_as, om_s, 0.0);
  for (const auto& v : dk0.values) CHECK(std::abs(v.real()) < 1e-9);
  // the 0.1 deg transverse correction is a constant below 2 pi (1-cos)/lambda
  const double theta = 0.1 * consts::pi / 180.0;
  const auto dk1 = phase_mismatch(k_as, k_s, p, om_as, om_s, theta);
  const double bound = consts::two_pi * (1.0 - std::cos(theta)) / 780e-9;
  for (size_t i = 0; i < dk1.size(); ++i) {
    CHECK(std::abs(dk1.values[i].real()) < bound);
    CHECK(dk1.values[i].real() ==
          doctest::Approx(dk1.values[0].real()).epsilon(1e-12));  // constant
  }

  // inside the EIT window the mismatch slope is carried by Re k_as
  ExperimentConfig cfg = base_config(9.0);
  cfg.lasers.coupling_rabi_scale = 0.5;
  const auto parts = joint_spectrum_parts(cfg);
  const size_t mid = parts.delta_k.size() / 2;
  const double step = parts.delta_k.step();
  const double slope_dk = std::abs(parts.delta_k.values[mid + 1].real() -
                                   parts.delta_k.values[mid - 1].real()) /
                          (2 * step);
  const size_t rev_hi = parts.k_s.size() - 1 - (mid - 1);
  const size_t rev_lo = parts.k_s.size() - 1 - (mid + 1);
  const double slope_ks = std::abs(parts.k_s.values[rev_hi].real() -
                                   parts.k_s.values[rev_lo].real()) /
                          (2 * step);
  CHECK(slope_dk > 20.0 * slope_ks);
}

TEST_CASE("longitudinal profile: sinc shape and loss") {
  const auto grid = make_symmetric_grid(128, 1e6);
  ComplexSpectrum dk;
  dk.grid = grid;
  dk.values.assign(grid.size(), cplx(0, 0));
  std::vector<double> alpha(grid.size(), 0.0);
  const double L = 0.0127;
  auto phi0 = longitudinal_profile(dk, alpha, L);
  for (const auto& v : phi0.values) CHECK(std::abs(v - cplx(1, 0)) < 1e-12);

  // delta_k L = 2 pi: sinc zero
  for (auto& v : dk.values) v = cplx(consts::two_pi / L, 0.0);
  auto phi_zero = longitudinal_profile(dk, alpha, L);
  for (const auto& v : phi_zero.values) CHECK(std::abs(v) < 1e-12);

  // half power where dk L = 2 x 1.392 (root of sinc^2 = 1/2, found by bisection)
  double x_half = 1.392;
  {
    double lo = 1.0, hi = 2.0;
    for (int i = 0; i < 60; ++i) {
      const double m = 0.5 * (lo + hi);
      (std::pow(std::sin(m) / m, 2) > 0.5 ? lo : hi) = m;
    }
    x_half = 0.5 * (lo + hi);
  }
  for (auto& v : dk.values) v = cplx(2.0 * x_half / L, 0.0);
  auto phi_half = longitudinal_profile(dk, alpha, L);
  for (const auto& v : phi_half.values)
    CHECK(std::norm(v) == doctest::Approx(0.5).epsilon(1e-9));

  // absorption enters as exp(-alpha L / 2) on the amplitude
  std::fill(alpha.begin(), alpha.end(), 100.0);
  for (auto& v : dk.values) v = cplx(0, 0);
  auto phi_abs = longitudinal_profile(dk, alpha, L);
  for (const auto& v : phi_abs.values)
    CHECK(std::abs(v) == doctest::Approx(std::exp(-50.0 * L)).epsilon(1e-12));
}

TEST_CASE("EIT transmission: bounds and coupling-power trend") {
  const auto grid = make_symmetric_grid(64, 1e7);
  ComplexSpectrum chi0;
  chi0.grid = grid;
  chi0.values.assign(grid.size(), cplx(0, 0));
  const double om0 = consts::two_pi * consts::c / 795e-9;
  for (double t : eit_transmission(chi0, om0, 0.0127)) CHECK(t == doctest::Approx(1.0));

  auto t0_of = [&](double coupling_mw) {
    ExperimentConfig cfg = base_config(coupling_mw);
    cfg.lasers.coupling_rabi_scale = 0.5;
    cfg.cell.ground_decoherence_rate = consts::two_pi * 1e6;
    const auto parts = joint_spectrum_parts(cfg);
    double best = 0;  // transmission at line center (grid is half-offset)
    const size_t mid = parts.transmission.size() / 2;
    best = 0.5 * (parts.transmission[mid - 1] + parts.transmission[mid]);
    for (double t : parts.transmission) {
      CHECK(t >= 0.0);
      CHECK(t <= 1.0);
    }
    return best;
  };
  const double t1 = t0_of(1.0), t9 = t0_of(9.0), t27 = t0_of(27.0);
  CHECK(t9 > t1);
  CHECK(t27 > t9);

  // opaque two-level medium at zero coupling
  ExperimentConfig cfg = base_config(9.0);
  MediumParams p = medium_params_from_config(cfg);
  p.omega_c = 0.0;
  const double sigma_v = velocity_sigma(cfg.cell.temperature, cfg.species.mass);
  const auto quad = VelocityQuadrature::gaussian_midpoint(4096, sigma_v, 7.0);
  const auto g = make_symmetric_grid(64, 1e6);
  const auto chi = doppler_average(
      [&](double d, double v) { return chi_eit(d, v, p); }, g, quad,
      SpectrumLabel::chi_as);
  const auto trans = eit_transmission(chi, om0, cfg.cell.length);
  CHECK(trans[32] < 0.05);
}

TEST_CASE("Kramers-Kronig consistency of the averaged response") {
  ExperimentConfig cfg = base_config(9.0);
  cfg.lasers.coupling_rabi_scale = 0.5;
  const MediumParams p = medium_params_from_config(cfg);
  const double sigma_v = velocity_sigma(cfg.cell.temperature, cfg.species.mass);
  const size_t n = 4096;
  const auto grid = make_symmetric_grid(n, consts::two_pi * 12e9 / n);
  const auto quad = VelocityQuadrature::gaussian_midpoint(4096, sigma_v, 7.0);
  const AveragedChi chi = doppler_average_chi(grid, quad, p);

  // windowed Hilbert transform: Re chi(d) = (1/pi) P.V. int Im chi / (d' - d)
  double peak = 0;
  for (const auto& v : chi.chi_as.values) peak = std::max(peak, std::abs(v));
  const double step = grid[1] - grid[0];
  for (size_t i = n / 4; i < 3 * n / 4; i += 37) {
    double acc = 0;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      acc += chi.chi_as.values[j].imag() / (grid[j] - grid[i]);
    }
    const double re_kk = acc * step / consts::pi;
    CHECK(std::abs(re_kk - chi.chi_as.values[i].real()) < 0.05 * peak);
  }
}
