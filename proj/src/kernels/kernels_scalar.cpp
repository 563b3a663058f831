#include <cmath>
#include <complex>

#include "biphoton/constants.hpp"
#include "biphoton/faddeeva.hpp"
#include "biphoton/kernels.hpp"

namespace bp::kern {

namespace {

using cplx = std::complex<double>;

// Plain per-velocity-class accumulation (no two-photon smear).
void accum_rational(const double* delta, size_t n, const NodeArrays& nodes,
                    const KernelParams& p, double* as_re, double* as_im,
                    double* c3_re, double* c3_im, double* s_re, double* s_im) {
  const double g12 = p.gamma12, g13 = p.gamma13;
  const double gg_plus_rabi = g12 * g13 + p.omega_c_sq_4;

  for (size_t j = 0; j < n; ++j) {
    const double d = delta[j];
    double ar = 0.0, ai = 0.0, cr = 0.0, ci = 0.0, sr = 0.0, si = 0.0;
    for (size_t i = 0; i < nodes.count; ++i) {
      const double v = nodes.v[i];
      const double w = nodes.w[i];
      const double d1 = d - p.k_as * v;
      const double d2 = d - p.delta_c - p.k_eps * v;

      // D = (d1 + i g13)(d2 + i g12) - Oc^2/4
      const double dr = d1 * d2 - gg_plus_rabi;
      const double di = d1 * g12 + d2 * g13;
      const double inv = 1.0 / (dr * dr + di * di);
      const double idr = dr * inv;   // Re 1/D
      const double idi = -di * inv;  // Im 1/D

      ar += w * (d2 * idr - g12 * idi);
      ai += w * (d2 * idi + g12 * idr);

      const double c3r = nodes.cw3_re[i], c3i = nodes.cw3_im[i];
      cr += c3r * idr - c3i * idi;
      ci += c3r * idi + c3i * idr;

      const double x = d + p.delta_p - p.k_s * v;
      const double invs = w / (x * x + g13 * g13);
      sr += x * invs;
      si -= g13 * invs;
    }
    as_re[j] = ar;
    as_im[j] = ai;
    c3_re[j] = cr;
    c3_im[j] = ci;
    s_re[j] = sr;
    s_im[j] = si;
  }
}

// Gaussian-smeared two-photon detuning, averaged analytically: the offset z
// is a simple pole of 1/D, so
//   <1/D>_z        = -J / (d1 + i g13),
//   <(d2+ig12)/D>_z = invD1 - q4 invD1^2 J,
// with J = i sqrt(pi) w(z*/(sqrt(2) sigma)) / (sqrt(2) sigma) and
// z* = (d2 + i g12) - q4 invD1, invD1 = 1/(d1 + i g13), q4 = Oc^2/4.
void accum_gaussian(const double* delta, size_t n, const NodeArrays& nodes,
                    const KernelParams& p, double* as_re, double* as_im,
                    double* c3_re, double* c3_im, double* s_re, double* s_im) {
  const double g12 = p.gamma12, g13 = p.gamma13;
  const double q4 = p.omega_c_sq_4;
  const double su = 1.0 / (std::sqrt(2.0) * p.sigma_2ph);
  const double jc = std::sqrt(consts::pi) * su;  // J = i * jc * w

  for (size_t j = 0; j < n; ++j) {
    const double d = delta[j];
    cplx a(0.0, 0.0), c(0.0, 0.0), s(0.0, 0.0);
    for (size_t i = 0; i < nodes.count; ++i) {
      const double v = nodes.v[i];
      const double w = nodes.w[i];
      const double d1 = d - p.k_as * v;
      const double d2 = d - p.delta_c - p.k_eps * v;

      const cplx invd1 = 1.0 / cplx(d1, g13);
      const cplx zstar = cplx(d2, g12) - q4 * invd1;
      const cplx wz = faddeeva_w(su * zstar);
      const cplx jfun = cplx(0.0, jc) * wz;

      a += w * (invd1 - q4 * invd1 * invd1 * jfun);
      c += cplx(nodes.cw3_re[i], nodes.cw3_im[i]) * (-jfun * invd1);

      const double x = d + p.delta_p - p.k_s * v;
      const double invs = w / (x * x + g13 * g13);
      s += cplx(x * invs, -g13 * invs);
    }
    as_re[j] = a.real();
    as_im[j] = a.imag();
    c3_re[j] = c.real();
    c3_im[j] = c.imag();
    s_re[j] = s.real();
    s_im[j] = s.imag();
  }
}

void accum_scalar(const double* delta, size_t n, const NodeArrays& nodes,
                  const KernelParams& p, double* as_re, double* as_im,
                  double* c3_re, double* c3_im, double* s_re, double* s_im) {
  if (p.sigma_2ph > 0.0)
    accum_gaussian(delta, n, nodes, p, as_re, as_im, c3_re, c3_im, s_re, s_im);
  else
    accum_rational(delta, n, nodes, p, as_re, as_im, c3_re, c3_im, s_re, s_im);
}

const Impl impl{"scalar", accum_scalar};

}  // namespace

const Impl& scalar_impl() { return impl; }

void prepare_chi3_weights(const double* v, const double* w, size_t n,
                          const KernelParams& p, double* cw3_re, double* cw3_im) {
  for (size_t i = 0; i < n; ++i) {
    const double pr = p.delta_p + p.k_p * v[i];
    const double inv = w[i] / (pr * pr + p.gamma13 * p.gamma13);
    cw3_re[i] = pr * inv;
    cw3_im[i] = -p.gamma13 * inv;
  }
}

}  // namespace bp::kern
