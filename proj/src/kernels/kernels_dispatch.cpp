#include "spmux/kernels.hpp"

#include <cstdlib>

namespace spmux::kernels {

const Backend* avx2_backend_table();  // defined in kernels_avx2.cpp

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Backend* resolve(std::string_view name) {
  if (name == "scalar") return &scalar_backend();
  if (name == "avx2") return avx2_backend();
  if (name == "auto") {
    const Backend* wide = avx2_backend();
    return wide ? wide : &scalar_backend();
  }
  return nullptr;
}

const Backend* initial() {
  if (const char* env = std::getenv("SPMUX_KERNELS")) {
    if (const Backend* b = resolve(env)) return b;
  }
  return resolve("auto");
}

const Backend*& current() {
  static const Backend* b = initial();
  return b;
}

}  // namespace

const Backend* avx2_backend() {
  return cpu_has_avx2() ? avx2_backend_table() : nullptr;
}

const Backend& active() { return *current(); }

bool select(std::string_view name) {
  const Backend* b = resolve(name);
  if (!b) return false;
  current() = b;
  return true;
}

}  // namespace spmux::kernels
