// SPDX-License-Identifier: MIT

#include <cassert>
#include <cmath>
#include <cstdint>

#include "caltest/kernels.hpp"
#include "kernels_detail.hpp"

namespace caltest::kernels {

namespace {

inline void philox_round(std::uint32_t& c0, std::uint32_t& c1,
                         std::uint32_t& c2, std::uint32_t& c3,
                         std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = std::uint64_t(detail::kMul0) * c0;
  const std::uint64_t p1 = std::uint64_t(detail::kMul1) * c2;
  const std::uint32_t n0 =
      static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
  const std::uint32_t n1 = static_cast<std::uint32_t>(p1);
  const std::uint32_t n2 =
      static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
  const std::uint32_t n3 = static_cast<std::uint32_t>(p0);
  c0 = n0;
  c1 = n1;
  c2 = n2;
  c3 = n3;
}

void bernoulli_scalar(const BernoulliBatch& batch,
                      std::span<std::uint8_t> out) {
  const std::size_t n = batch.obligors.size();
  assert(batch.blocks.size() == n && batch.thresholds.size() == n);
  assert(out.size() >= 4 * n);
  for (std::size_t e = 0; e < n; ++e) {
    const Block blk = philox4x32(
        {batch.replication, batch.obligors[e], batch.stream, batch.blocks[e]},
        batch.key);
    const std::uint32_t thr = batch.thresholds[e];
    out[4 * e + 0] = blk.v[0] < thr ? 1 : 0;
    out[4 * e + 1] = blk.v[1] < thr ? 1 : 0;
    out[4 * e + 2] = blk.v[2] < thr ? 1 : 0;
    out[4 * e + 3] = blk.v[3] < thr ? 1 : 0;
  }
}

// Neumaier's variant of compensated summation: the correction also captures
// the case where the incoming term dominates the running sum.
double pq_scalar(std::span<const double> p) {
  double sum = 0.0;
  double comp = 0.0;
  for (const double x : p) {
    const double term = x * (1.0 - x);
    const double next = sum + term;
    if (std::fabs(sum) >= std::fabs(term)) {
      comp += (sum - next) + term;
    } else {
      comp += (term - next) + sum;
    }
    sum = next;
  }
  return sum + comp;
}

double cross_scalar(std::span<const double> early,
                    std::span<const double> late) {
  assert(early.size() == late.size());
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t j = 0; j < early.size(); ++j) {
    const double term = late[j] * (1.0 - early[j]);
    const double next = sum + term;
    if (std::fabs(sum) >= std::fabs(term)) {
      comp += (sum - next) + term;
    } else {
      comp += (term - next) + sum;
    }
    sum = next;
  }
  return sum + comp;
}

}  // namespace

Block philox4x32(Counter ctr, std::uint64_t key) {
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  std::uint32_t c0 = ctr.c0;
  std::uint32_t c1 = ctr.c1;
  std::uint32_t c2 = ctr.c2;
  std::uint32_t c3 = ctr.c3;
  philox_round(c0, c1, c2, c3, k0, k1);
  for (int r = 1; r < 10; ++r) {
    k0 += detail::kWeyl0;
    k1 += detail::kWeyl1;
    philox_round(c0, c1, c2, c3, k0, k1);
  }
  return Block{{c0, c1, c2, c3}};
}

const Ops& scalar_ops() {
  static const Ops ops{"scalar", &bernoulli_scalar, &pq_scalar, &cross_scalar};
  return ops;
}

}  // namespace caltest::kernels
