// AVX2+FMA variants of the velocity-accumulation kernel; compiled with
// -mavx2 -mfma in its own translation unit. Four detunings per iteration,
// accumulators kept in registers across the node loop. The Gaussian-smear
// path evaluates the Weideman Faddeeva approximation inline: it is a fixed
// 32-step complex Horner with no branches, so the lanes never diverge.

#include <immintrin.h>

#include <cmath>

#include "biphoton/constants.hpp"
#include "biphoton/faddeeva.hpp"
#include "biphoton/kernels.hpp"

namespace bp::kern {

namespace {

struct Vc {
  __m256d re, im;
};

inline Vc vc_mul(const Vc& a, const Vc& b) {
  return {_mm256_fmsub_pd(a.re, b.re, _mm256_mul_pd(a.im, b.im)),
          _mm256_fmadd_pd(a.re, b.im, _mm256_mul_pd(a.im, b.re))};
}

inline Vc vc_recip(const Vc& a) {
  const __m256d mag = _mm256_fmadd_pd(a.re, a.re, _mm256_mul_pd(a.im, a.im));
  const __m256d inv = _mm256_div_pd(_mm256_set1_pd(1.0), mag);
  return {_mm256_mul_pd(a.re, inv),
          _mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(a.im, inv))};
}

inline Vc vc_scale(double s, const Vc& a) {
  const __m256d v = _mm256_set1_pd(s);
  return {_mm256_mul_pd(v, a.re), _mm256_mul_pd(v, a.im)};
}

inline Vc vc_add(const Vc& a, const Vc& b) {
  return {_mm256_add_pd(a.re, b.re), _mm256_add_pd(a.im, b.im)};
}

inline Vc vc_sub(const Vc& a, const Vc& b) {
  return {_mm256_sub_pd(a.re, b.re), _mm256_sub_pd(a.im, b.im)};
}

// w(u) for four points with Im u >= 0 (Weideman rational form).
inline Vc faddeeva4(const Vc& u, const FaddeevaApprox& fa) {
  const __m256d lvec = _mm256_set1_pd(fa.L);
  // i*u = (-u.im, u.re); L - i u and L + i u
  const Vc lmiz{_mm256_add_pd(lvec, u.im), _mm256_sub_pd(_mm256_setzero_pd(), u.re)};
  const Vc lpiz{_mm256_sub_pd(lvec, u.im), u.re};
  const Vc inv = vc_recip(lmiz);
  const Vc zz = vc_mul(lpiz, inv);
  Vc poly{_mm256_setzero_pd(), _mm256_setzero_pd()};
  for (int j = 0; j < FaddeevaApprox::N; ++j) {
    const __m256d cj = _mm256_set1_pd(fa.coef[j]);
    poly = vc_mul(poly, zz);
    poly.re = _mm256_add_pd(poly.re, cj);
  }
  const Vc inv2 = vc_mul(inv, inv);
  Vc out = vc_scale(2.0, vc_mul(poly, inv2));
  constexpr double inv_sqrt_pi = 0.5641895835477563;
  return vc_add(out, vc_scale(inv_sqrt_pi, inv));
}

void accum_rational_avx2(const double* delta, size_t n, const NodeArrays& nodes,
                         const KernelParams& p, double* as_re, double* as_im,
                         double* c3_re, double* c3_im, double* s_re, double* s_im) {
  const __m256d g12 = _mm256_set1_pd(p.gamma12);
  const __m256d g13 = _mm256_set1_pd(p.gamma13);
  const __m256d g13sq = _mm256_set1_pd(p.gamma13 * p.gamma13);
  const __m256d ggr = _mm256_set1_pd(p.gamma12 * p.gamma13 + p.omega_c_sq_4);
  const __m256d kas = _mm256_set1_pd(p.k_as);
  const __m256d keps = _mm256_set1_pd(p.k_eps);
  const __m256d ks = _mm256_set1_pd(p.k_s);
  const __m256d dc = _mm256_set1_pd(p.delta_c);
  const __m256d dp = _mm256_set1_pd(p.delta_p);
  const __m256d one = _mm256_set1_pd(1.0);

  size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d d = _mm256_loadu_pd(delta + j);
    const __m256d d_two = _mm256_sub_pd(d, dc);
    const __m256d d_stk = _mm256_add_pd(d, dp);
    __m256d ar = _mm256_setzero_pd(), ai = _mm256_setzero_pd();
    __m256d cr = _mm256_setzero_pd(), ci = _mm256_setzero_pd();
    __m256d sr = _mm256_setzero_pd(), si = _mm256_setzero_pd();

    for (size_t i = 0; i < nodes.count; ++i) {
      const __m256d v = _mm256_set1_pd(nodes.v[i]);
      const __m256d w = _mm256_set1_pd(nodes.w[i]);

      const __m256d d1 = _mm256_fnmadd_pd(kas, v, d);
      const __m256d d2 = _mm256_fnmadd_pd(keps, v, d_two);

      const __m256d dr = _mm256_fmsub_pd(d1, d2, ggr);
      const __m256d di = _mm256_fmadd_pd(d1, g12, _mm256_mul_pd(d2, g13));
      const __m256d mag = _mm256_fmadd_pd(dr, dr, _mm256_mul_pd(di, di));
      const __m256d inv = _mm256_div_pd(one, mag);
      const __m256d idr = _mm256_mul_pd(dr, inv);
      const __m256d idi = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(di, inv));

      // chi_as += w * (d2 + i g12) / D
      ar = _mm256_fmadd_pd(w, _mm256_fnmadd_pd(g12, idi, _mm256_mul_pd(d2, idr)), ar);
      ai = _mm256_fmadd_pd(w, _mm256_fmadd_pd(d2, idi, _mm256_mul_pd(g12, idr)), ai);

      // chi3 += cw3 / D
      const __m256d c3r = _mm256_set1_pd(nodes.cw3_re[i]);
      const __m256d c3i = _mm256_set1_pd(nodes.cw3_im[i]);
      cr = _mm256_add_pd(cr, _mm256_fnmadd_pd(c3i, idi, _mm256_mul_pd(c3r, idr)));
      ci = _mm256_add_pd(ci, _mm256_fmadd_pd(c3r, idi, _mm256_mul_pd(c3i, idr)));

      // chi_s += w / (delta + dp - k_s v + i g13)
      const __m256d x = _mm256_fnmadd_pd(ks, v, d_stk);
      const __m256d invs = _mm256_div_pd(w, _mm256_fmadd_pd(x, x, g13sq));
      sr = _mm256_fmadd_pd(x, invs, sr);
      si = _mm256_fnmadd_pd(g13, invs, si);
    }

    _mm256_storeu_pd(as_re + j, ar);
    _mm256_storeu_pd(as_im + j, ai);
    _mm256_storeu_pd(c3_re + j, cr);
    _mm256_storeu_pd(c3_im + j, ci);
    _mm256_storeu_pd(s_re + j, sr);
    _mm256_storeu_pd(s_im + j, si);
  }

  if (j < n) {
    scalar_impl().accum(delta + j, n - j, nodes, p, as_re + j, as_im + j,
                        c3_re + j, c3_im + j, s_re + j, s_im + j);
  }
}

void accum_gaussian_avx2(const double* delta, size_t n, const NodeArrays& nodes,
                         const KernelParams& p, double* as_re, double* as_im,
                         double* c3_re, double* c3_im, double* s_re, double* s_im) {
  const auto& fa = FaddeevaApprox::instance();
  const __m256d g12 = _mm256_set1_pd(p.gamma12);
  const __m256d g13 = _mm256_set1_pd(p.gamma13);
  const __m256d g13sq = _mm256_set1_pd(p.gamma13 * p.gamma13);
  const __m256d kas = _mm256_set1_pd(p.k_as);
  const __m256d keps = _mm256_set1_pd(p.k_eps);
  const __m256d ks = _mm256_set1_pd(p.k_s);
  const __m256d dc = _mm256_set1_pd(p.delta_c);
  const __m256d dp = _mm256_set1_pd(p.delta_p);
  const double q4 = p.omega_c_sq_4;
  const double su = 1.0 / (std::sqrt(2.0) * p.sigma_2ph);
  const double jc = std::sqrt(consts::pi) * su;

  size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d d = _mm256_loadu_pd(delta + j);
    const __m256d d_two = _mm256_sub_pd(d, dc);
    const __m256d d_stk = _mm256_add_pd(d, dp);
    Vc a{_mm256_setzero_pd(), _mm256_setzero_pd()};
    Vc c{_mm256_setzero_pd(), _mm256_setzero_pd()};
    __m256d sr = _mm256_setzero_pd(), si = _mm256_setzero_pd();

    for (size_t i = 0; i < nodes.count; ++i) {
      const __m256d v = _mm256_set1_pd(nodes.v[i]);
      const double w = nodes.w[i];

      const Vc den1{_mm256_fnmadd_pd(kas, v, d), g13};
      const __m256d d2 = _mm256_fnmadd_pd(keps, v, d_two);

      const Vc invd1 = vc_recip(den1);
      const Vc zstar = vc_sub(Vc{d2, g12}, vc_scale(q4, invd1));
      const Vc wz = faddeeva4(vc_scale(su, zstar), fa);
      // J = i jc w  ->  (−jc wz.im, jc wz.re)
      const Vc jfun{_mm256_mul_pd(_mm256_set1_pd(-jc), wz.im),
                    _mm256_mul_pd(_mm256_set1_pd(jc), wz.re)};

      const Vc invd1_sq = vc_mul(invd1, invd1);
      const Vc as_term = vc_sub(invd1, vc_scale(q4, vc_mul(invd1_sq, jfun)));
      a = vc_add(a, vc_scale(w, as_term));

      const Vc cw{_mm256_set1_pd(nodes.cw3_re[i]), _mm256_set1_pd(nodes.cw3_im[i])};
      const Vc m1 = vc_mul(jfun, invd1);
      c = vc_sub(c, vc_mul(cw, m1));

      const __m256d x = _mm256_fnmadd_pd(ks, v, d_stk);
      const __m256d invs =
          _mm256_div_pd(_mm256_set1_pd(w), _mm256_fmadd_pd(x, x, g13sq));
      sr = _mm256_fmadd_pd(x, invs, sr);
      si = _mm256_fnmadd_pd(g13, invs, si);
    }

    _mm256_storeu_pd(as_re + j, a.re);
    _mm256_storeu_pd(as_im + j, a.im);
    _mm256_storeu_pd(c3_re + j, c.re);
    _mm256_storeu_pd(c3_im + j, c.im);
    _mm256_storeu_pd(s_re + j, sr);
    _mm256_storeu_pd(s_im + j, si);
  }

  if (j < n) {
    scalar_impl().accum(delta + j, n - j, nodes, p, as_re + j, as_im + j,
                        c3_re + j, c3_im + j, s_re + j, s_im + j);
  }
}

void accum_avx2(const double* delta, size_t n, const NodeArrays& nodes,
                const KernelParams& p, double* as_re, double* as_im, double* c3_re,
                double* c3_im, double* s_re, double* s_im) {
  if (p.sigma_2ph > 0.0)
    accum_gaussian_avx2(delta, n, nodes, p, as_re, as_im, c3_re, c3_im, s_re, s_im);
  else
    accum_rational_avx2(delta, n, nodes, p, as_re, as_im, c3_re, c3_im, s_re, s_im);
}

const Impl impl{"avx2", accum_avx2};

}  // namespace

const Impl* avx2_impl_compiled() { return &impl; }

}  // namespace bp::kern
