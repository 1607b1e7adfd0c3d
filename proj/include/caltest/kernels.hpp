// SPDX-License-Identifier: MIT
//
// Low-level compute kernels: a counter-based generator, batched Bernoulli
// indicator generation, and the compensated reductions used by the moment
// formulas.  Every kernel has a scalar reference implementation and, on
// x86-64 hardware with AVX2, a vector variant.  The Bernoulli kernel is
// bit-identical across implementations; the reductions agree to accumulation
// tolerance (both are compensated, they differ only in association order).

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace caltest::kernels {

// 128-bit counter / 64-bit key block cipher (Philox 4x32, 10 rounds).
// Distinct counters give independent uniform 32-bit outputs, so draws can be
// keyed by (replication, obligor, stream, block) and evaluated in any order.
struct Counter {
  std::uint32_t c0 = 0;
  std::uint32_t c1 = 0;
  std::uint32_t c2 = 0;
  std::uint32_t c3 = 0;
};

struct Block {
  std::uint32_t v[4] = {0, 0, 0, 0};
};

Block philox4x32(Counter ctr, std::uint64_t key);

// One batch entry covers four consecutive subperiods of one obligor:
// entry e yields indicators for subperiods 4*blocks[e]+1 .. 4*blocks[e]+4,
// written to out[4e .. 4e+3] as 0/1 bytes.  An indicator fires when the
// uniform 32-bit draw is strictly below thresholds[e], so the hit
// probability is thresholds[e] / 2^32.
struct BernoulliBatch {
  std::uint64_t key = 0;
  std::uint32_t replication = 0;
  std::uint32_t stream = 0;
  std::span<const std::uint32_t> obligors;    // per entry
  std::span<const std::uint32_t> blocks;      // per entry
  std::span<const std::uint32_t> thresholds;  // per entry
};

// sum_pq:    sum of p*(1-p) over the span.
// sum_cross: sum of late[j]*(1-early[j]); spans must have equal length.
// Both use compensated accumulation; relative error stays near epsilon even
// for panels with 10^6+ terms.
struct Ops {
  const char* name;
  void (*bernoulli)(const BernoulliBatch&, std::span<std::uint8_t> out);
  double (*pq)(std::span<const double> p);
  double (*cross)(std::span<const double> early, std::span<const double> late);
};

const Ops& scalar_ops();
bool avx2_available();     // compiled in and supported by the running CPU
const Ops& avx2_ops();     // pre: avx2_available()

// Dispatch order: CALTEST_KERNEL={scalar|avx2} wins, otherwise the widest
// implementation the CPU supports.  Selection happens once.
const Ops& active_ops();

// Worker count for replication loops: CALTEST_THREADS when set to a
// positive integer, otherwise hardware concurrency; clamped to [1, 64].
int thread_budget();

}  // namespace caltest::kernels
