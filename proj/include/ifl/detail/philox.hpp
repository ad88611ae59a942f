#pragma once

#include <array>
#include <cstdint>

namespace ifl::detail {

// Philox4x32-10 block function (Salmon et al. constants).
inline std::array<uint32_t, 4> philox4x32(uint32_t k0, uint32_t k1,
                                          uint32_t c0, uint32_t c1,
                                          uint32_t c2, uint32_t c3) {
  constexpr uint32_t kMul0 = 0xD2511F53u;
  constexpr uint32_t kMul1 = 0xCD9E8D57u;
  constexpr uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr uint32_t kWeyl1 = 0xBB67AE85u;
  uint32_t x0 = c0, x1 = c1, x2 = c2, x3 = c3;
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = uint64_t(kMul0) * x0;
    const uint64_t p1 = uint64_t(kMul1) * x2;
    const uint32_t y0 = uint32_t(p1 >> 32) ^ x1 ^ k0;
    const uint32_t y1 = uint32_t(p1);
    const uint32_t y2 = uint32_t(p0 >> 32) ^ x3 ^ k1;
    const uint32_t y3 = uint32_t(p0);
    x0 = y0;
    x1 = y1;
    x2 = y2;
    x3 = y3;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {x0, x1, x2, x3};
}

}  // namespace ifl::detail
