// SPDX-License-Identifier: MIT

#pragma once

#include <cstdint>

namespace caltest::kernels::detail {

// Multiplier and key-schedule constants of the Philox 4x32 round function.
inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

}  // namespace caltest::kernels::detail
