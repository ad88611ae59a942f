#include "ifl/rng.hpp"

#include "ifl/detail/philox.hpp"
#include "ifl/kernels.hpp"

namespace ifl {

RngStream::RngStream(uint64_t seed, uint64_t item, uint32_t purpose)
    : k0_(uint32_t(seed)),
      k1_(uint32_t(seed >> 32)),
      c0_(uint32_t(item)),
      c1_(uint32_t(item >> 32)),
      c2_(purpose) {}

uint64_t RngStream::next_u64() {
  if (pos_ == 2) {
    const auto w = detail::philox4x32(k0_, k1_, c0_, c1_, c2_, block_++);
    buf_[0] = uint64_t(w[1]) << 32 | w[0];
    buf_[1] = uint64_t(w[3]) << 32 | w[2];
    pos_ = 0;
  }
  return buf_[pos_++];
}

double RngStream::uniform01() { return u64_to_unit(next_u64()); }

uint64_t RngStream::below(uint64_t n) {
  // Multiply-shift; bias is negligible for the small n used here.
  const unsigned __int128 wide = (unsigned __int128)next_u64() * n;
  return uint64_t(wide >> 64);
}

void bulk_uniform01(uint64_t seed, uint32_t purpose, uint64_t item0,
                    std::span<double> out) {
  const auto& k = kernels::active();
  constexpr size_t kChunk = 1024;
  uint64_t words[2 * kChunk];
  size_t done = 0;
  while (done < out.size()) {
    const size_t n = std::min(kChunk, out.size() - done);
    k.philox_bulk(uint32_t(seed), uint32_t(seed >> 32), purpose, 0,
                  item0 + done, std::span<uint64_t>(words, 2 * n));
    for (size_t i = 0; i < n; ++i) out[done + i] = u64_to_unit(words[2 * i]);
    done += n;
  }
}

}  // namespace ifl
