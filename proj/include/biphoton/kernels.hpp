#pragma once

#include <cstddef>
#include <string>

namespace bp::kern {

// Medium constants consumed by the velocity-accumulation kernels.
// omega_c_sq_4 = (Omega_c / 2)^2.
struct KernelParams {
  double k_as;         // rad/m, signed anti-Stokes wavevector
  double k_eps;        // rad/m, k_as - k_c (residual two-photon Doppler term)
  double k_s;          // rad/m, signed Stokes wavevector
  double k_p;          // rad/m, signed pump wavevector (used for node prep)
  double gamma12;      // rad/s
  double gamma13;      // rad/s
  double delta_p;      // rad/s
  double delta_c;      // rad/s
  double omega_c_sq_4; // (rad/s)^2
  double sigma_2ph;    // rad/s; > 0 switches on the Gaussian two-photon smear
};

// Per-node quadrature data: velocity v, Gaussian weight w, and the
// precomputed complex weight w / (delta_p + k_p v + i gamma13) for the
// third-order kernel's pump leg.
struct NodeArrays {
  const double* v;
  const double* w;
  const double* cw3_re;
  const double* cw3_im;
  size_t count;
};

// Accumulates, for every detuning delta[j], the velocity average of the three
// unnormalized susceptibility kernels:
//   chi_as: (d2 + i g12) / D      (EIT Lambda response)
//   chi3:   1 / ((dp + k_p v + i g13) D)   (pump leg folded into cw3)
//   chi_s:  1 / (delta + dp - k_s v + i g13)
// with d1 = delta - k_as v, d2 = delta - delta_c - k_eps v and
// D = (d1 + i g13)(d2 + i g12) - omega_c^2/4.
// Outputs are written (not accumulated) into the re/im arrays of length n.
using AccumFn = void (*)(const double* delta, size_t n, const NodeArrays& nodes,
                         const KernelParams& p, double* as_re, double* as_im,
                         double* c3_re, double* c3_im, double* s_re, double* s_im);

struct Impl {
  const char* name;
  AccumFn accum;
};

const Impl& scalar_impl();
const Impl* avx2_impl();    // nullptr when not compiled in or unsupported
const Impl& active_impl();  // runtime choice; BIPHOTON_KERNEL=scalar|avx2 overrides

// Fills cw3_re/cw3_im from weights and velocities (pump-leg factor).
void prepare_chi3_weights(const double* v, const double* w, size_t n,
                          const KernelParams& p, double* cw3_re, double* cw3_im);

}  // namespace bp::kern
