#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

#include "astarcode/distributions.hpp"
#include "astarcode/tree.hpp"

namespace astarcode {

/// Coder variants. The numeric values are the 3-bit wire tags.
enum class CoderVariant : std::uint8_t {
  kAS = 0,   // exact, sample-split partition
  kAD = 1,   // exact, dyadic partition
  kDAD = 2,  // depth-limited dyadic, fixed budget, two root candidates
  kPFR = 3,  // Poisson functional representation (global bound)
  kMRC = 4,  // minimal random coding
};

std::string_view variant_name(CoderVariant v);
CoderVariant parse_variant(std::string_view name);

/// An encoded sample.
///
/// AS/AD: payload is the heap index, depth_or_budget its depth.
/// DAD/MRC: payload is a codeword below 2^budget.
/// PFR: payload is the 1-based arrival index K; depth_or_budget its bit width.
struct Code {
  CoderVariant variant = CoderVariant::kAD;
  unsigned depth_or_budget = 1;
  std::uint64_t payload = 1;

  bool operator==(const Code&) const = default;
};

/// Throws InvalidCodeError when the fields violate the variant's invariant.
void validate_code(const Code& code);

struct TrialStats {
  std::uint64_t steps = 0;  // priority-queue pops (arrivals for PFR, draws for MRC)
  unsigned returned_depth = 0;
  unsigned payload_bits = 0;
  unsigned overhead_bits = 0;
  double lower_bound = -kInf;
};

struct EncodeResult {
  Code code;
  double sample = 0.0;
  TrialStats stats;
};

using NodeTrace = std::function<void(const NodeRecord&)>;

struct SearchOptions {
  PartitionKind kind = PartitionKind::kDyadic;
  /// Nodes at this depth are scored but not expanded. nullopt = unlimited.
  std::optional<unsigned> depth_limit;
  /// Adds a second full-space candidate at the root (index 0).
  bool extra_root_candidate = false;
  /// 0 = unlimited; otherwise BudgetExhaustedError once exceeded.
  std::uint64_t max_steps = 0;
  /// Called on every popped node.
  NodeTrace trace;
};

struct SearchResult {
  std::uint64_t index = 1;  // 0 when the extra root candidate wins
  unsigned depth = 1;
  double sample = 0.0;
  double lower_bound = -kInf;
  std::uint64_t steps = 0;
};

/// Branch-and-bound A* search over the proposal's Gumbel process: returns
/// the node maximizing G + log r(X) among the nodes the options allow.
SearchResult astar_search(const PairSpec& pair, std::uint64_t seed, const SearchOptions& options);

/// Exact A* coding. With depth_limit = nullopt the pair must have finite
/// D-infinity (UnboundedRatioError otherwise). kGlobalBound yields a PFR code.
EncodeResult encode_astar(const PairSpec& pair, PartitionKind kind, std::uint64_t seed,
                          std::optional<unsigned> depth_limit = std::nullopt);
double decode_astar(const Distribution1D& proposal, PartitionKind kind, const Code& code,
                    std::uint64_t seed);

/// Depth-limited dyadic coding with budget D bits (codeword 0 is the extra
/// root candidate).
EncodeResult encode_dad(const PairSpec& pair, std::uint64_t seed, unsigned budget);
double decode_dad(const Distribution1D& proposal, const Code& code, std::uint64_t seed);

/// Exponential-race coding of the arrival index.
EncodeResult encode_pfr(const PairSpec& pair, std::uint64_t seed, std::uint64_t max_steps = 0);
double decode_pfr(const Distribution1D& proposal, const Code& code, std::uint64_t seed);

/// Importance-weighted selection among 2^n_bits shared proposal draws.
EncodeResult encode_mrc(const PairSpec& pair, std::uint64_t seed, unsigned n_bits);
double decode_mrc(const Distribution1D& proposal, const Code& code, std::uint64_t seed);

/// Dispatches on code.variant.
double decode(const Distribution1D& proposal, const Code& code, std::uint64_t seed);

/// Largest accepted MRC / DAD budget.
inline constexpr unsigned kMaxBudget = 40;
inline constexpr unsigned kMaxMrcBits = 24;

}  // namespace astarcode
