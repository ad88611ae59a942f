#pragma once

// Counter-based randomness. Every draw is addressed by (seed, item, purpose):
// the same coordinates always produce the same value, independent of draw
// order, so runs are reproducible and purposes never share a stream. "item"
// is the simulation round, or the draw index in bulk Monte Carlo loops.

#include <array>
#include <cstdint>
#include <span>

namespace ifl {

// Purpose tags. Values are part of the reproducibility contract: renumbering
// changes every sampled trajectory.
enum class Draw : uint32_t {
  kTransaction = 1,  // cell draw then latent-label draw
  kPolicySample = 2,
  kExploreOverride = 3,
  kCensor = 4,
  kDelay = 5,
  kCorruption = 6,
  kPolicyEnum = 7,
  kTestBase = 1000,  // tags >= kTestBase are reserved for tests and oracles
};

class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t item, uint32_t purpose);
  RngStream(uint64_t seed, uint64_t item, Draw purpose)
      : RngStream(seed, item, static_cast<uint32_t>(purpose)) {}

  uint64_t next_u64();
  // [0, 1) with 53 random bits.
  double uniform01();
  bool bernoulli(double p) { return uniform01() < p; }
  // Uniform integer in [0, n), n >= 1.
  uint64_t below(uint64_t n);

 private:
  uint32_t k0_, k1_, c0_, c1_, c2_;
  uint32_t block_ = 0;
  std::array<uint64_t, 2> buf_{};
  int pos_ = 2;
};

// Uniforms for items item0 .. item0+out.size()-1, one per item; each equals
// the first uniform01() of RngStream(seed, item, purpose). Generated through
// the dispatched bulk kernel.
void bulk_uniform01(uint64_t seed, uint32_t purpose, uint64_t item0,
                    std::span<double> out);
inline void bulk_uniform01(uint64_t seed, Draw purpose, uint64_t item0,
                           std::span<double> out) {
  bulk_uniform01(seed, static_cast<uint32_t>(purpose), item0, out);
}

inline double u64_to_unit(uint64_t x) {
  return double(x >> 11) * 0x1.0p-53;
}

}  // namespace ifl
