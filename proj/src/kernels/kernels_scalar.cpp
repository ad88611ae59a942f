#include "ifl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ifl/detail/philox.hpp"

namespace ifl::kernels {
namespace {

void philox_bulk_scalar(uint32_t k0, uint32_t k1, uint32_t c2, uint32_t c3,
                        uint64_t c01_start, std::span<uint64_t> out) {
  const size_t nblocks = out.size() / 2;
  for (size_t b = 0; b < nblocks; ++b) {
    const uint64_t c01 = c01_start + b;
    const auto w = detail::philox4x32(k0, k1, uint32_t(c01),
                                      uint32_t(c01 >> 32), c2, c3);
    out[2 * b] = uint64_t(w[1]) << 32 | w[0];
    out[2 * b + 1] = uint64_t(w[3]) << 32 | w[2];
  }
}

double dot_scalar(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

double max_scalar(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  return m;
}

void scaled_sub_scalar(std::span<double> w, double eta,
                       std::span<const double> est, double lo, double hi) {
  for (size_t i = 0; i < w.size(); ++i) {
    const double t = std::min(std::max(eta * est[i], lo), hi);
    w[i] = w[i] - t;
  }
}

double exp_normalize_scalar(std::span<const double> logw,
                            std::span<double> probs) {
  const double m = max_scalar(logw);
  double s = 0.0;
  for (size_t i = 0; i < logw.size(); ++i) {
    probs[i] = std::exp(logw[i] - m);
    s += probs[i];
  }
  const double inv = 1.0 / s;
  for (double& p : probs) p *= inv;
  return s;
}

size_t count_below_scalar(std::span<const double> u, double p) {
  size_t n = 0;
  for (double x : u) n += x < p ? 1 : 0;
  return n;
}

}  // namespace

const Kernels& scalar() {
  static const Kernels k{"scalar",           philox_bulk_scalar,
                         dot_scalar,         sum_scalar,
                         max_scalar,         scaled_sub_scalar,
                         exp_normalize_scalar, count_below_scalar};
  return k;
}

}  // namespace ifl::kernels
