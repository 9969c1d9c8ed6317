#pragma once

#include <cstdint>

#include "astarcode/distributions.hpp"

namespace astarcode {

/// Which draw of a node a uniform feeds. The numeric values are part of the
/// wire format: changing them breaks decoding of existing messages.
enum class DrawSlot : std::uint32_t {
  kGumbel = 0,
  kSample = 1,
  kExtraRootGumbel = 2,
  kExtraRootSample = 3,
};

/// Address of one public uniform. Identical keys give identical uniforms on
/// every platform.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t node_index = 0;
  DrawSlot slot = DrawSlot::kGumbel;
  std::uint32_t counter = 0;
};

/// SplitMix64 finalizer (Steele, Lea, Flood). Normative.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// 64-bit hash of a stream key:
///   h = mix64(seed ^ 0x243F6A8885A308D3)
///   h = mix64(h ^ node_index)
///   h = mix64(h ^ (slot << 32 | counter))
std::uint64_t hash_key(const StreamKey& key);

/// Uniform in the open interval (0,1): ((hash >> 11) + 0.5) * 2^-53.
double keyed_uniform(const StreamKey& key);

/// Seed for an independent sub-stream (a coordinate of a vector, a trial of
/// a benchmark): mix64(seed ^ mix64(index + 0x6A09E667F3BCC909)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct GumbelValue {
  double value = 0.0;
  double location = 0.0;
  double truncation = kInf;
};

/// location - log(-log u).
GumbelValue gumbel(double u, double location);

/// Gumbel(location) conditioned on value <= bound, by inversion of
/// F(g) = exp(exp(-(bound - location)) - exp(-(g - location))).
GumbelValue trunc_gumbel(double u, double location, double bound);

/// Arrival time of the exponential race corresponding to Gumbel value g.
double gumbel_to_arrival(double g);

}  // namespace astarcode
