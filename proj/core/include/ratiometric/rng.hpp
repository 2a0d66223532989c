#pragma once

#include <cstdint>
#include <random>

namespace ratiometric {

using RngStream = std::mt19937_64;

/// Purposes of the independent streams derived from one master seed.
enum class StreamTag : std::uint32_t {
  kCell = 1,
  kInitialConditions = 2,
  kController = 3,
  kActuation = 4,
  kFlush = 5,
  kTrial = 6,
};

/// Deterministic stream for (master seed, purpose, id, generation). Distinct
/// tuples give statistically independent streams; the mapping never depends on
/// thread scheduling or call order.
[[nodiscard]] inline RngStream derive_stream(std::uint64_t master_seed, StreamTag tag,
                                             std::uint64_t id = 0, std::uint64_t generation = 0) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master_seed), hi(master_seed), static_cast<std::uint32_t>(tag),
                    lo(id),          hi(id),          lo(generation),
                    hi(generation)};
  return RngStream(seq);
}

}  // namespace ratiometric
