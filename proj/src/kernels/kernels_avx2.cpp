// AVX2 variants. Compiled with -mavx2 -mfma in its own translation unit;
// only dispatched to after a runtime cpuid check.

#include "ifl/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "ifl/detail/philox.hpp"

namespace ifl::kernels {
namespace {

// hi/lo 32-bit halves of lane-wise u32 products against a broadcast constant.
inline void mul_hilo_u32(__m256i x, __m256i m, __m256i& hi, __m256i& lo) {
  const __m256i even = _mm256_mul_epu32(x, m);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(x, 32), m);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0b10101010);
  lo = _mm256_mullo_epi32(x, m);
}

void philox_bulk_avx2(uint32_t k0, uint32_t k1, uint32_t c2, uint32_t c3,
                      uint64_t c01_start, std::span<uint64_t> out) {
  const __m256i mul0 = _mm256_set1_epi32(int(0xD2511F53u));
  const __m256i mul1 = _mm256_set1_epi32(int(0xCD9E8D57u));
  const __m256i weyl0 = _mm256_set1_epi32(int(0x9E3779B9u));
  const __m256i weyl1 = _mm256_set1_epi32(int(0xBB67AE85u));

  const size_t nblocks = out.size() / 2;
  size_t b = 0;
  for (; b + 8 <= nblocks; b += 8) {
    alignas(32) uint32_t lo32[8], hi32[8];
    for (int lane = 0; lane < 8; ++lane) {
      const uint64_t c = c01_start + b + uint64_t(lane);
      lo32[lane] = uint32_t(c);
      hi32[lane] = uint32_t(c >> 32);
    }
    __m256i x0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lo32));
    __m256i x1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(hi32));
    __m256i x2 = _mm256_set1_epi32(int(c2));
    __m256i x3 = _mm256_set1_epi32(int(c3));
    __m256i key0 = _mm256_set1_epi32(int(k0));
    __m256i key1 = _mm256_set1_epi32(int(k1));

    for (int round = 0; round < 10; ++round) {
      __m256i p0hi, p0lo, p1hi, p1lo;
      mul_hilo_u32(x0, mul0, p0hi, p0lo);
      mul_hilo_u32(x2, mul1, p1hi, p1lo);
      x0 = _mm256_xor_si256(_mm256_xor_si256(p1hi, x1), key0);
      x1 = p1lo;
      x2 = _mm256_xor_si256(_mm256_xor_si256(p0hi, x3), key1);
      x3 = p0lo;
      key0 = _mm256_add_epi32(key0, weyl0);
      key1 = _mm256_add_epi32(key1, weyl1);
    }

    alignas(32) uint32_t w0[8], w1[8], w2[8], w3[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(w0), x0);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w1), x1);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w2), x2);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w3), x3);
    for (int lane = 0; lane < 8; ++lane) {
      out[2 * (b + lane)] = uint64_t(w1[lane]) << 32 | w0[lane];
      out[2 * (b + lane) + 1] = uint64_t(w3[lane]) << 32 | w2[lane];
    }
  }
  for (; b < nblocks; ++b) {
    const uint64_t c = c01_start + b;
    const auto w =
        detail::philox4x32(k0, k1, uint32_t(c), uint32_t(c >> 32), c2, c3);
    out[2 * b] = uint64_t(w[1]) << 32 | w[0];
    out[2 * b + 1] = uint64_t(w[3]) << 32 | w[2];
  }
}

double dot_avx2(std::span<const double> a, std::span<const double> b) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= a.size(); i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i),
                          _mm256_loadu_pd(b.data() + i), acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double r = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < a.size(); ++i) r += a[i] * b[i];
  return r;
}

double sum_avx2(std::span<const double> v) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= v.size(); i += 4)
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(v.data() + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double r = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < v.size(); ++i) r += v[i];
  return r;
}

double max_avx2(std::span<const double> v) {
  double r = -std::numeric_limits<double>::infinity();
  __m256d acc = _mm256_set1_pd(r);
  size_t i = 0;
  for (; i + 4 <= v.size(); i += 4)
    acc = _mm256_max_pd(acc, _mm256_loadu_pd(v.data() + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < v.size(); ++i) r = std::max(r, v[i]);
  return r;
}

// No FMA here: must stay bit-identical to the scalar reference.
void scaled_sub_avx2(std::span<double> w, double eta,
                     std::span<const double> est, double lo, double hi) {
  const __m256d veta = _mm256_set1_pd(eta);
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  size_t i = 0;
  for (; i + 4 <= w.size(); i += 4) {
    __m256d t = _mm256_mul_pd(veta, _mm256_loadu_pd(est.data() + i));
    t = _mm256_min_pd(_mm256_max_pd(t, vlo), vhi);
    _mm256_storeu_pd(w.data() + i,
                     _mm256_sub_pd(_mm256_loadu_pd(w.data() + i), t));
  }
  for (; i < w.size(); ++i) {
    const double t = std::min(std::max(eta * est[i], lo), hi);
    w[i] = w[i] - t;
  }
}

// exp for x <= 0 (post max-subtraction), Cody-Waite reduction plus a
// degree-11 Taylor polynomial on |r| <= ln2/2, two-step 2^n scaling so
// deep underflow stays finite.
inline __m256d exp_nonpos_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

  x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));
  const __m256d n = _mm256_round_pd(
      _mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  __m256d p = _mm256_set1_pd(2.50521083854417187751e-8);  // 1/11!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.75573192239858906526e-7));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.75573192239858906526e-6));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.48015873015873015873e-5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.98412698412698412698e-4));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.38888888888888888889e-3));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(8.33333333333333333333e-3));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(4.16666666666666666667e-2));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.66666666666666666667e-1));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(5.0e-1));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  const __m128i ni = _mm256_cvtpd_epi32(n);
  const __m128i n1 = _mm_srai_epi32(ni, 1);
  const __m128i n2 = _mm_sub_epi32(ni, n1);
  const __m128i bias = _mm_set1_epi32(1023);
  const __m256d s1 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_cvtepi32_epi64(_mm_add_epi32(n1, bias)), 52));
  const __m256d s2 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_cvtepi32_epi64(_mm_add_epi32(n2, bias)), 52));
  return _mm256_mul_pd(_mm256_mul_pd(p, s1), s2);
}

double exp_normalize_avx2(std::span<const double> logw,
                          std::span<double> probs) {
  const double m = max_avx2(logw);
  const __m256d vm = _mm256_set1_pd(m);
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= logw.size(); i += 4) {
    const __m256d e =
        exp_nonpos_pd(_mm256_sub_pd(_mm256_loadu_pd(logw.data() + i), vm));
    _mm256_storeu_pd(probs.data() + i, e);
    acc = _mm256_add_pd(acc, e);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < logw.size(); ++i) {
    probs[i] = std::exp(logw[i] - m);
    s += probs[i];
  }
  const double inv = 1.0 / s;
  for (double& p : probs) p *= inv;
  return s;
}

size_t count_below_avx2(std::span<const double> u, double p) {
  const __m256d vp = _mm256_set1_pd(p);
  size_t n = 0;
  size_t i = 0;
  for (; i + 4 <= u.size(); i += 4) {
    const __m256d cmp =
        _mm256_cmp_pd(_mm256_loadu_pd(u.data() + i), vp, _CMP_LT_OQ);
    n += size_t(__builtin_popcount(unsigned(_mm256_movemask_pd(cmp))));
  }
  for (; i < u.size(); ++i) n += u[i] < p ? 1 : 0;
  return n;
}

}  // namespace

const Kernels* avx2_variant() {
  static const Kernels k{"avx2",         philox_bulk_avx2,
                         dot_avx2,       sum_avx2,
                         max_avx2,       scaled_sub_avx2,
                         exp_normalize_avx2, count_below_avx2};
  return &k;
}

}  // namespace ifl::kernels

#else

namespace ifl::kernels {
const Kernels* avx2_variant() { return nullptr; }
}  // namespace ifl::kernels

#endif
