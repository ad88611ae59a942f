#pragma once

// Data-parallel inner-loop kernels: Philox counter blocks, weight-vector
// math for the exponential-weights learner, and Monte Carlo counting.
// Every kernel has a scalar reference implementation; on x86-64 an AVX2
// variant is selected at runtime when the CPU supports it. The env var
// IFL_KERNEL=scalar|avx2 forces a variant (unknown names fall back to the
// runtime default). Integer kernels are bit-exact across variants; the
// floating-point reductions may differ by reassociation rounding only.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace ifl::kernels {

// Philox4x32-10 blocks. Counter layout: {c01 lo, c01 hi, c2, c3} with c01
// advancing once per block; key is (k0, k1). Each block yields two 64-bit
// words: w1<<32|w0 and w3<<32|w2.
using PhiloxBulkFn = void (*)(uint32_t k0, uint32_t k1, uint32_t c2,
                              uint32_t c3, uint64_t c01_start,
                              std::span<uint64_t> out);

using DotFn = double (*)(std::span<const double> a, std::span<const double> b);
using SumFn = double (*)(std::span<const double> v);
using MaxFn = double (*)(std::span<const double> v);

// w[i] -= clamp(eta * est[i], lo, hi), elementwise.
using ScaledSubFn = void (*)(std::span<double> w, double eta,
                             std::span<const double> est, double lo,
                             double hi);

// probs[i] = exp(logw[i] - max(logw)) / sum(...); returns the pre-division
// sum. Requires at least one finite entry.
using ExpNormalizeFn = double (*)(std::span<const double> logw,
                                  std::span<double> probs);

// Number of entries with u[i] < p.
using CountBelowFn = size_t (*)(std::span<const double> u, double p);

struct Kernels {
  const char* name;
  PhiloxBulkFn philox_bulk;
  DotFn dot;
  SumFn sum;
  MaxFn max;
  ScaledSubFn scaled_sub;
  ExpNormalizeFn exp_normalize;
  CountBelowFn count_below;
};

const Kernels& scalar();

// Resolved once per process: IFL_KERNEL override, else best supported.
const Kernels& active();

// Variant lookup for equivalence tests; nullptr if the name is unknown or
// the variant is not compiled in / not supported on this CPU.
const Kernels* by_name(std::string_view name);

// All variants usable on this machine (scalar first).
std::span<const Kernels* const> available();

}  // namespace ifl::kernels
