// SPDX-License-Identifier: MIT

#include <algorithm>
#include <cstdlib>
#include <string_view>
#include <thread>

#include "caltest/kernels.hpp"

namespace caltest::kernels {

#if defined(CALTEST_HAVE_AVX2)
const Ops& avx2_ops_impl();  // defined in the -mavx2 translation unit
#endif

bool avx2_available() {
#if defined(CALTEST_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const Ops& avx2_ops() {
#if defined(CALTEST_HAVE_AVX2)
  return avx2_ops_impl();
#else
  return scalar_ops();  // unreachable under the avx2_available() precondition
#endif
}

const Ops& active_ops() {
  static const Ops& chosen = []() -> const Ops& {
    if (const char* env = std::getenv("CALTEST_KERNEL")) {
      const std::string_view want(env);
      if (want == "scalar") {
        return scalar_ops();
      }
      if (want == "avx2" && avx2_available()) {
        return avx2_ops();
      }
    }
    return avx2_available() ? avx2_ops() : scalar_ops();
  }();
  return chosen;
}

int thread_budget() {
  long count = static_cast<long>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CALTEST_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed >= 1) {
      count = parsed;
    }
  }
  return static_cast<int>(std::clamp(count, 1L, 64L));
}

}  // namespace caltest::kernels
