#include <cstdlib>
#include <cstring>

#include "biphoton/kernels.hpp"

namespace bp::kern {

#if defined(BIPHOTON_HAVE_AVX2)
const Impl* avx2_impl_compiled();  // defined in kernels_avx2.cpp
#else
static const Impl* avx2_impl_compiled() { return nullptr; }
#endif

const Impl* avx2_impl() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return avx2_impl_compiled();
#endif
  return nullptr;
}

const Impl& active_impl() {
  static const Impl* chosen = [] {
    const char* env = std::getenv("BIPHOTON_KERNEL");
    if (env && std::strcmp(env, "scalar") == 0) return &scalar_impl();
    const Impl* simd = avx2_impl();
    if (env && std::strcmp(env, "avx2") == 0 && simd) return simd;
    if (env && env[0] != '\0' && std::strcmp(env, "avx2") != 0 &&
        std::strcmp(env, "scalar") != 0)
      return &scalar_impl();  // unknown name: fail safe
    return simd ? simd : &scalar_impl();
  }();
  return *chosen;
}

}  // namespace bp::kern
