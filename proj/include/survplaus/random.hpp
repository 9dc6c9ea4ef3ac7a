#pragma once

#include <cstdint>
#include <random>

namespace survplaus {

// splitmix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic substream derivation: the generator for (stream, replicate)
// depends only on the master seed and the two indices, never on worker
// scheduling. This is what makes results independent of thread count.
inline std::mt19937_64 make_stream(std::uint64_t master_seed,
                                   std::uint64_t stream,
                                   std::uint64_t replicate) {
  std::uint64_t s = mix64(master_seed ^ mix64(stream ^ mix64(replicate)));
  return std::mt19937_64(s);
}

// Derive a child master seed (for nested layers like per-replication
// engine configs in the simulation harness).
inline std::uint64_t derive_seed(std::uint64_t master_seed,
                                 std::uint64_t tag,
                                 std::uint64_t index) {
  return mix64(master_seed ^ mix64(tag) ^ mix64(index + 0x632be59bd9b4e019ull));
}

// Uniform deviate strictly inside (0,1): 53-bit midpoint grid. Avoids the
// endpoints so inverse-CDF transforms never hit log(0).
inline double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace survplaus
