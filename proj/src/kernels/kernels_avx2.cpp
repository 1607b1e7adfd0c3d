// SPDX-License-Identifier: MIT
//
// AVX2 kernel variants.  This translation unit is compiled with
// -mavx2 -mfma and must only be entered after a runtime CPU check.
// Eight Philox lanes run in parallel (structure-of-arrays across the
// counter words); the Bernoulli output is assembled so the byte stream is
// identical to the scalar implementation's.

#include <cmath>
#include <cstdint>

#include "caltest/kernels.hpp"
#include "kernels_detail.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace caltest::kernels {

namespace {

// 32x32 -> 64 unsigned multiply of every lane against a broadcast constant;
// hi/lo receive the high/low halves lane-aligned with the input.
inline void mulhilo8(__m256i mul, __m256i x, __m256i& hi, __m256i& lo) {
  const __m256i even = _mm256_mul_epu32(x, mul);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(x, 32), mul);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
}

struct Lanes {
  __m256i c0, c1, c2, c3;
};

inline void round8(Lanes& st, __m256i k0, __m256i k1) {
  __m256i hi0, lo0, hi1, lo1;
  mulhilo8(_mm256_set1_epi32(static_cast<int>(detail::kMul0)), st.c0, hi0,
           lo0);
  mulhilo8(_mm256_set1_epi32(static_cast<int>(detail::kMul1)), st.c2, hi1,
           lo1);
  const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, st.c1), k0);
  const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, st.c3), k1);
  st.c0 = n0;
  st.c1 = lo1;
  st.c2 = n2;
  st.c3 = lo0;
}

inline Lanes philox8(Lanes st, std::uint64_t key) {
  __m256i k0 = _mm256_set1_epi32(static_cast<int>(key & 0xffffffffu));
  __m256i k1 = _mm256_set1_epi32(static_cast<int>(key >> 32));
  round8(st, k0, k1);
  for (int r = 1; r < 10; ++r) {
    k0 = _mm256_add_epi32(k0,
                          _mm256_set1_epi32(static_cast<int>(detail::kWeyl0)));
    k1 = _mm256_add_epi32(k1,
                          _mm256_set1_epi32(static_cast<int>(detail::kWeyl1)));
    round8(st, k0, k1);
  }
  return st;
}

// v < thr, unsigned: bias both operands into signed range.
inline __m256i less_u32(__m256i v, __m256i thr) {
  const __m256i bias = _mm256_set1_epi32(static_cast<int>(0x80000000u));
  return _mm256_cmpgt_epi32(_mm256_xor_si256(thr, bias),
                            _mm256_xor_si256(v, bias));
}

void bernoulli_avx2(const BernoulliBatch& batch, std::span<std::uint8_t> out) {
  const std::size_t n = batch.obligors.size();
  const __m256i one = _mm256_set1_epi32(1);
  std::size_t e = 0;
  for (; e + 8 <= n; e += 8) {
    Lanes st;
    st.c0 = _mm256_set1_epi32(static_cast<int>(batch.replication));
    st.c1 = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(batch.obligors.data() + e));
    st.c2 = _mm256_set1_epi32(static_cast<int>(batch.stream));
    st.c3 = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(batch.blocks.data() + e));
    st = philox8(st, batch.key);

    const __m256i thr = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(batch.thresholds.data() + e));
    const __m256i b0 = _mm256_and_si256(less_u32(st.c0, thr), one);
    const __m256i b1 = _mm256_and_si256(less_u32(st.c1, thr), one);
    const __m256i b2 = _mm256_and_si256(less_u32(st.c2, thr), one);
    const __m256i b3 = _mm256_and_si256(less_u32(st.c3, thr), one);

    // Little-endian store: lane j's word becomes out[4(e+j) .. 4(e+j)+3]
    // in subperiod order, matching the scalar byte layout.
    const __m256i packed = _mm256_or_si256(
        _mm256_or_si256(b0, _mm256_slli_epi32(b1, 8)),
        _mm256_or_si256(_mm256_slli_epi32(b2, 16), _mm256_slli_epi32(b3, 24)));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out.data() + 4 * e),
                        packed);
  }
  for (; e < n; ++e) {
    const Block blk = philox4x32(
        {batch.replication, batch.obligors[e], batch.stream, batch.blocks[e]},
        batch.key);
    const std::uint32_t thr = batch.thresholds[e];
    for (int s = 0; s < 4; ++s) {
      out[4 * e + s] = blk.v[s] < thr ? 1 : 0;
    }
  }
}

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// Four independent Neumaier accumulators; lanes and corrections are folded
// with a final scalar compensated pass.
struct VecAccum {
  __m256d sum = _mm256_setzero_pd();
  __m256d comp = _mm256_setzero_pd();

  inline void add(__m256d term) {
    const __m256d next = _mm256_add_pd(sum, term);
    const __m256d big = _mm256_add_pd(_mm256_sub_pd(sum, next), term);
    const __m256d small = _mm256_add_pd(_mm256_sub_pd(term, next), sum);
    const __m256d mask = _mm256_cmp_pd(abs_pd(sum), abs_pd(term), _CMP_GE_OQ);
    comp = _mm256_add_pd(comp, _mm256_blendv_pd(small, big, mask));
    sum = next;
  }

  double fold(double tail_sum, double tail_comp) const {
    alignas(32) double s[4];
    alignas(32) double c[4];
    _mm256_store_pd(s, sum);
    _mm256_store_pd(c, comp);
    double total = tail_sum;
    double corr = tail_comp;
    for (double v : s) {
      const double next = total + v;
      if (std::fabs(total) >= std::fabs(v)) {
        corr += (total - next) + v;
      } else {
        corr += (v - next) + total;
      }
      total = next;
    }
    for (double v : c) {
      corr += v;
    }
    return total + corr;
  }
};

double pq_avx2(std::span<const double> p) {
  VecAccum acc;
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t j = 0;
  for (; j + 4 <= p.size(); j += 4) {
    const __m256d x = _mm256_loadu_pd(p.data() + j);
    acc.add(_mm256_mul_pd(x, _mm256_sub_pd(one, x)));
  }
  double tail = 0.0;
  double tail_comp = 0.0;
  for (; j < p.size(); ++j) {
    const double term = p[j] * (1.0 - p[j]);
    const double next = tail + term;
    if (std::fabs(tail) >= std::fabs(term)) {
      tail_comp += (tail - next) + term;
    } else {
      tail_comp += (term - next) + tail;
    }
    tail = next;
  }
  return acc.fold(tail, tail_comp);
}

double cross_avx2(std::span<const double> early, std::span<const double> late) {
  VecAccum acc;
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t j = 0;
  for (; j + 4 <= early.size(); j += 4) {
    const __m256d pe = _mm256_loadu_pd(early.data() + j);
    const __m256d pl = _mm256_loadu_pd(late.data() + j);
    acc.add(_mm256_mul_pd(pl, _mm256_sub_pd(one, pe)));
  }
  double tail = 0.0;
  double tail_comp = 0.0;
  for (; j < early.size(); ++j) {
    const double term = late[j] * (1.0 - early[j]);
    const double next = tail + term;
    if (std::fabs(tail) >= std::fabs(term)) {
      tail_comp += (tail - next) + term;
    } else {
      tail_comp += (term - next) + tail;
    }
    tail = next;
  }
  return acc.fold(tail, tail_comp);
}

}  // namespace

const Ops& avx2_ops_impl() {
  static const Ops ops{"avx2", &bernoulli_avx2, &pq_avx2, &cross_avx2};
  return ops;
}

}  // namespace caltest::kernels

#endif  // __AVX2__
