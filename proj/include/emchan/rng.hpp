// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <cstdint>
#include <random>

namespace emchan {

/// Deterministic child stream derived from (seed, tag, index). Used to give
/// every Monte-Carlo realization its own stream so parallel layout cannot
/// change results.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t tag,
                                   std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Stream tags per purpose; keeping them fixed makes matched-seed comparisons
// (with vs without scattering, precoder A vs B) consume identical draws.
namespace stream_tag {
inline constexpr std::uint64_t scene = 0x5cee;
inline constexpr std::uint64_t users = 0x05e5;
inline constexpr std::uint64_t symbols = 0x57b0;
inline constexpr std::uint64_t currents = 0xc44e;
}  // namespace stream_tag

}  // namespace emchan
