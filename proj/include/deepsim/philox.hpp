#pragma once
// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw,
// "Parallel Random Numbers: As Easy as 1, 2, 3", SC 2011). The block
// function is pure, so distinct counters can be evaluated in any order on
// any thread with identical results. Verified at compile time against the
// known-answer vectors published with the reference Random123 distribution.

#include <array>
#include <cstdint>

namespace deepsim {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

namespace detail {

inline constexpr std::uint32_t philox_mult0 = 0xD2511F53u;
inline constexpr std::uint32_t philox_mult1 = 0xCD9E8D57u;
inline constexpr std::uint32_t philox_weyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t philox_weyl1 = 0xBB67AE85u;

constexpr PhiloxCounter philox_round(const PhiloxCounter& ctr,
                                     const PhiloxKey& key) {
  const std::uint64_t prod0 = std::uint64_t{philox_mult0} * ctr[0];
  const std::uint64_t prod1 = std::uint64_t{philox_mult1} * ctr[2];
  return {static_cast<std::uint32_t>(prod1 >> 32) ^ ctr[1] ^ key[0],
          static_cast<std::uint32_t>(prod1),
          static_cast<std::uint32_t>(prod0 >> 32) ^ ctr[3] ^ key[1],
          static_cast<std::uint32_t>(prod0)};
}

}  // namespace detail

// Ten rounds; the first round uses the caller's key, then the key advances
// by the Weyl constants between rounds.
constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    ctr = detail::philox_round(ctr, key);
    key = {key[0] + detail::philox_weyl0, key[1] + detail::philox_weyl1};
  }
  return ctr;
}

static_assert(philox4x32_10({0u, 0u, 0u, 0u}, {0u, 0u}) ==
                  PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu,
                                0x9b00dbd8u},
              "Philox KAT: zero counter and key");
static_assert(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu,
                             0xffffffffu},
                            {0xffffffffu, 0xffffffffu}) ==
                  PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u,
                                0x6d5451fdu},
              "Philox KAT: all-ones counter and key");
static_assert(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                             0x03707344u},
                            {0xa4093822u, 0x299f31d0u}) ==
                  PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u,
                                0x24126ea1u},
              "Philox KAT: pi-digit counter and key");

}  // namespace deepsim
