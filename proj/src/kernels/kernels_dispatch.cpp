#include "ifl/kernels.hpp"

#include <cstdlib>
#include <vector>

namespace ifl::kernels {

const Kernels* avx2_variant();  // kernels_avx2.cpp; null when not built

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const std::vector<const Kernels*>& variant_list() {
  static const std::vector<const Kernels*> list = [] {
    std::vector<const Kernels*> v{&scalar()};
    if (const Kernels* avx2 = avx2_variant(); avx2 != nullptr && cpu_has_avx2())
      v.push_back(avx2);
    return v;
  }();
  return list;
}

}  // namespace

const Kernels* by_name(std::string_view name) {
  for (const Kernels* k : variant_list())
    if (name == k->name) return k;
  return nullptr;
}

std::span<const Kernels* const> available() { return variant_list(); }

const Kernels& active() {
  static const Kernels* chosen = [] {
    if (const char* forced = std::getenv("IFL_KERNEL")) {
      if (const Kernels* k = by_name(forced)) return k;
    }
    return variant_list().back();
  }();
  return *chosen;
}

}  // namespace ifl::kernels
