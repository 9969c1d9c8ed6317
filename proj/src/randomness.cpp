#include "astarcode/randomness.hpp"

#include <cmath>
#include <string>

namespace astarcode {

std::uint64_t hash_key(const StreamKey& key) {
  std::uint64_t h = mix64(key.seed ^ 0x243F6A8885A308D3ULL);
  h = mix64(h ^ key.node_index);
  const std::uint64_t tail =
      (static_cast<std::uint64_t>(key.slot) << 32) | static_cast<std::uint64_t>(key.counter);
  return mix64(h ^ tail);
}

double keyed_uniform(const StreamKey& key) {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(hash_key(key) >> 11) + 0.5) * kScale;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + 0x6A09E667F3BCC909ULL));
}

namespace {
void check_u(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("gumbel: uniform must lie in (0,1), got " + std::to_string(u));
  }
}
}  // namespace

GumbelValue gumbel(double u, double location) {
  check_u(u);
  return {location - std::log(-std::log(u)), location, kInf};
}

GumbelValue trunc_gumbel(double u, double location, double bound) {
  check_u(u);
  if (bound == kInf) return gumbel(u, location);
  const double e = -std::log(u);  // standard exponential
  const double z = bound - location;
  double value;
  if (z <= 0.0) {
    // bound - log1p(e * exp(z)); no overflow when the bound sits far below
    // the location.
    value = bound - std::log1p(e * std::exp(z));
  } else {
    value = location - std::log(std::exp(-z) + e);
  }
  return {std::min(value, bound), location, bound};
}

double gumbel_to_arrival(double g) {
  if (!std::isfinite(g)) throw DomainError("gumbel_to_arrival: value must be finite");
  return std::exp(-g);
}

}  // namespace astarcode
