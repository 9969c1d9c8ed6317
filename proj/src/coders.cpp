#include "astarcode/coders.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include "astarcode/bitstream.hpp"

namespace astarcode {

std::string_view variant_name(CoderVariant v) {
  switch (v) {
    case CoderVariant::kAS: return "as";
    case CoderVariant::kAD: return "ad";
    case CoderVariant::kDAD: return "dad";
    case CoderVariant::kPFR: return "pfr";
    case CoderVariant::kMRC: return "mrc";
  }
  return "?";
}

CoderVariant parse_variant(std::string_view name) {
  for (auto v : {CoderVariant::kAS, CoderVariant::kAD, CoderVariant::kDAD, CoderVariant::kPFR,
                 CoderVariant::kMRC}) {
    if (variant_name(v) == name) return v;
  }
  throw ConfigError("unknown coder variant '" + std::string(name) + "'");
}

void validate_code(const Code& code) {
  switch (code.variant) {
    case CoderVariant::kAS:
    case CoderVariant::kAD:
      if (code.payload == 0) throw InvalidCodeError("exact code: heap index 0 is reserved");
      if (depth_of(code.payload) != code.depth_or_budget) {
        throw InvalidCodeError("exact code: depth does not match heap index");
      }
      return;
    case CoderVariant::kDAD:
    case CoderVariant::kMRC:
      if (code.depth_or_budget < 1 || code.depth_or_budget > kMaxBudget) {
        throw InvalidCodeError("budgeted code: budget out of range");
      }
      if (code.payload >> code.depth_or_budget) {
        throw InvalidCodeError("budgeted code: codeword does not fit the budget");
      }
      return;
    case CoderVariant::kPFR:
      if (code.payload == 0) throw InvalidCodeError("pfr code: index must be >= 1");
      return;
  }
  throw InvalidCodeError("unknown coder variant");
}

namespace {

struct QueueEntry {
  double priority;
  double bound;  // M of the node's region
  NodeRecord node;
};

// Max-heap on priority; ties go to the smaller index.
struct QueueLower {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.node.index > b.node.index;
  }
};

CoderVariant exact_variant(PartitionKind kind) {
  switch (kind) {
    case PartitionKind::kSampleSplit: return CoderVariant::kAS;
    case PartitionKind::kDyadic: return CoderVariant::kAD;
    case PartitionKind::kGlobalBound: return CoderVariant::kPFR;
  }
  return CoderVariant::kAD;
}

unsigned bit_width_u(std::uint64_t v) { return static_cast<unsigned>(std::bit_width(v)); }

void check_finite_dinf(const PairSpec& pair, const char* who) {
  if (!std::isfinite(pair.analytic_dinf())) {
    throw UnboundedRatioError(std::string(who) +
                              ": exact coding needs a bounded density ratio");
  }
}

}  // namespace

SearchResult astar_search(const PairSpec& pair, std::uint64_t seed, const SearchOptions& options) {
  const Distribution1D& proposal = pair.proposal();
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueLower> queue;

  double lower_bound = -kInf;
  bool have_incumbent = false;
  SearchResult best;

  NodeRecord root = make_root(proposal, seed);
  const double root_bound = pair.bound_M(root.region);
  queue.push({root.gumbel.value + root_bound, root_bound, root});

  std::uint64_t steps = 0;
  while (!queue.empty() && lower_bound < queue.top().priority) {
    if (options.max_steps != 0 && steps >= options.max_steps) {
      throw BudgetExhaustedError("search exceeded " + std::to_string(options.max_steps) +
                                 " steps");
    }
    QueueEntry entry = queue.top();
    queue.pop();
    ++steps;
    const NodeRecord& node = entry.node;
    if (options.trace) options.trace(node);

    const double score = node.gumbel.value + pair.log_ratio(node.sample);
    if (lower_bound < score) {
      lower_bound = score;
      have_incumbent = true;
      best.index = node.index;
      best.depth = node.depth;
      best.sample = node.sample;
    }

    NodeRecord parent = node;
    if (options.extra_root_candidate && node.index == 1 && node.depth == 1) {
      // Second arrival of the race over the whole line; a leaf. Every later
      // arrival lies below it, so the root's children are truncated there.
      const double x = proposal.sample_restricted(
          Region::full(), node_uniform(seed, 0, DrawSlot::kExtraRootSample));
      const GumbelValue g =
          trunc_gumbel(node_uniform(seed, 0, DrawSlot::kExtraRootGumbel), 0.0, node.gumbel.value);
      const double extra_score = g.value + pair.log_ratio(x);
      if (lower_bound < extra_score) {
        lower_bound = extra_score;
        have_incumbent = true;
        best.index = 0;
        best.depth = 1;
        best.sample = x;
      }
      parent.gumbel.value = g.value;
    }

    if (options.depth_limit && node.depth >= *options.depth_limit) continue;
    for (auto& child : expand(parent, options.kind, proposal, seed)) {
      if (!(lower_bound < child.gumbel.value + entry.bound)) continue;
      const double child_bound = pair.bound_M(child.region);
      const double priority = child.gumbel.value + child_bound;
      if (lower_bound < priority) queue.push({priority, child_bound, std::move(child)});
    }
  }

  if (!have_incumbent) {
    throw DegenerateTargetError("search found no point with positive target density");
  }
  best.lower_bound = lower_bound;
  best.steps = steps;
  return best;
}

EncodeResult encode_astar(const PairSpec& pair, PartitionKind kind, std::uint64_t seed,
                          std::optional<unsigned> depth_limit) {
  if (!depth_limit) check_finite_dinf(pair, "encode_astar");
  if (depth_limit && *depth_limit < 1) throw DomainError("encode_astar: depth limit must be >= 1");
  SearchOptions options;
  options.kind = kind;
  options.depth_limit = depth_limit;
  const SearchResult found = astar_search(pair, seed, options);

  EncodeResult out;
  out.sample = found.sample;
  out.code.variant = exact_variant(kind);
  out.code.payload = found.index;
  out.stats.steps = found.steps;
  out.stats.lower_bound = found.lower_bound;
  out.stats.returned_depth = found.depth;
  if (kind == PartitionKind::kGlobalBound) {
    const unsigned width = bit_width_u(found.index);
    out.code.depth_or_budget = width;
    out.stats.payload_bits = width - 1;
    out.stats.overhead_bits = elias_delta_length(found.index) - (width - 1);
  } else {
    out.code.depth_or_budget = found.depth;
    out.stats.payload_bits = found.depth;
    out.stats.overhead_bits = elias_gamma_length(found.depth) - 1;
  }
  return out;
}

double decode_astar(const Distribution1D& proposal, PartitionKind kind, const Code& code,
                    std::uint64_t seed) {
  validate_code(code);
  if (code.variant != exact_variant(kind)) {
    throw InvalidCodeError("decode_astar: code variant does not match the partition");
  }
  return locate_node(code.payload, kind, proposal, seed).second;
}

EncodeResult encode_dad(const PairSpec& pair, std::uint64_t seed, unsigned budget) {
  if (budget < 1 || budget > kMaxBudget) {
    throw DomainError("encode_dad: budget must lie in [1, " + std::to_string(kMaxBudget) + "]");
  }
  SearchOptions options;
  options.kind = PartitionKind::kDyadic;
  options.depth_limit = budget;
  options.extra_root_candidate = true;
  const SearchResult found = astar_search(pair, seed, options);

  EncodeResult out;
  out.sample = found.sample;
  out.code = {CoderVariant::kDAD, budget, found.index};
  out.stats.steps = found.steps;
  out.stats.lower_bound = found.lower_bound;
  out.stats.returned_depth = found.depth;
  out.stats.payload_bits = budget;
  out.stats.overhead_bits = elias_gamma_length(budget);
  return out;
}

double decode_dad(const Distribution1D& proposal, const Code& code, std::uint64_t seed) {
  validate_code(code);
  if (code.variant != CoderVariant::kDAD) throw InvalidCodeError("decode_dad: not a DAD code");
  if (code.payload == 0) {
    return proposal.sample_restricted(Region::full(),
                                      node_uniform(seed, 0, DrawSlot::kExtraRootSample));
  }
  return locate_node(code.payload, PartitionKind::kDyadic, proposal, seed).second;
}

EncodeResult encode_pfr(const PairSpec& pair, std::uint64_t seed, std::uint64_t max_steps) {
  check_finite_dinf(pair, "encode_pfr");
  const Distribution1D& proposal = pair.proposal();
  const double log_ratio_max = pair.bound_M(Region::full());

  // Arrival times T_k = E_1 + ... + E_k; the winner minimizes T_k / r(X_k),
  // i.e. maximizes -log T_k + log r(X_k).
  double arrival = 0.0;
  double best_score = -kInf;
  std::uint64_t best_index = 0;
  double best_sample = 0.0;
  std::uint64_t k = 0;
  for (;;) {
    const std::uint64_t next = k + 1;
    const double e = -std::log(node_uniform(seed, next, DrawSlot::kGumbel));
    const double next_arrival = arrival + e;
    if (!(best_score < -std::log(next_arrival) + log_ratio_max)) break;
    if (max_steps != 0 && k >= max_steps) {
      throw BudgetExhaustedError("encode_pfr exceeded " + std::to_string(max_steps) +
                                 " arrivals");
    }
    k = next;
    arrival = next_arrival;
    const double x =
        proposal.sample_restricted(Region::full(), node_uniform(seed, k, DrawSlot::kSample));
    const double score = -std::log(arrival) + pair.log_ratio(x);
    if (best_score < score) {
      best_score = score;
      best_index = k;
      best_sample = x;
    }
  }

  EncodeResult out;
  const unsigned width = bit_width_u(best_index);
  out.sample = best_sample;
  out.code = {CoderVariant::kPFR, width, best_index};
  out.stats.steps = k;
  out.stats.returned_depth = width;
  out.stats.payload_bits = width - 1;
  out.stats.overhead_bits = elias_delta_length(best_index) - (width - 1);
  out.stats.lower_bound = best_score;
  return out;
}

double decode_pfr(const Distribution1D& proposal, const Code& code, std::uint64_t seed) {
  validate_code(code);
  if (code.variant != CoderVariant::kPFR) throw InvalidCodeError("decode_pfr: not a PFR code");
  return locate_node(code.payload, PartitionKind::kGlobalBound, proposal, seed).second;
}

EncodeResult encode_mrc(const PairSpec& pair, std::uint64_t seed, unsigned n_bits) {
  if (n_bits < 1 || n_bits > kMaxMrcBits) {
    throw DomainError("encode_mrc: n_bits must lie in [1, " + std::to_string(kMaxMrcBits) + "]");
  }
  const Distribution1D& proposal = pair.proposal();
  const std::size_t n = std::size_t{1} << n_bits;
  std::vector<double> log_w(n);
  std::vector<double> xs(n);
  double max_log_w = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = proposal.sample_restricted(Region::full(),
                                       node_uniform(seed, i + 1, DrawSlot::kSample));
    log_w[i] = pair.log_ratio(xs[i]);
    max_log_w = std::max(max_log_w, log_w[i]);
  }
  if (!std::isfinite(max_log_w)) {
    throw DegenerateTargetError("encode_mrc: every importance weight is zero");
  }
  std::vector<double> cumulative(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += std::exp(log_w[i] - max_log_w);
    cumulative[i] = total;
  }
  const double u = node_uniform(seed, 0, DrawSlot::kGumbel) * total;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  std::size_t j = static_cast<std::size_t>(it - cumulative.begin());
  if (j >= n) j = n - 1;
  // Skip zero-weight atoms that upper_bound can land on through rounding.
  while (j > 0 && !std::isfinite(log_w[j])) --j;
  while (!std::isfinite(log_w[j])) ++j;

  EncodeResult out;
  out.sample = xs[j];
  out.code = {CoderVariant::kMRC, n_bits, j};
  out.stats.steps = n;
  out.stats.returned_depth = n_bits;
  out.stats.payload_bits = n_bits;
  out.stats.overhead_bits = elias_gamma_length(n_bits);
  out.stats.lower_bound = log_w[j];
  return out;
}

double decode_mrc(const Distribution1D& proposal, const Code& code, std::uint64_t seed) {
  validate_code(code);
  if (code.variant != CoderVariant::kMRC) throw InvalidCodeError("decode_mrc: not an MRC code");
  return proposal.sample_restricted(Region::full(),
                                    node_uniform(seed, code.payload + 1, DrawSlot::kSample));
}

double decode(const Distribution1D& proposal, const Code& code, std::uint64_t seed) {
  switch (code.variant) {
    case CoderVariant::kAS: return decode_astar(proposal, PartitionKind::kSampleSplit, code, seed);
    case CoderVariant::kAD: return decode_astar(proposal, PartitionKind::kDyadic, code, seed);
    case CoderVariant::kDAD: return decode_dad(proposal, code, seed);
    case CoderVariant::kPFR: return decode_pfr(proposal, code, seed);
    case CoderVariant::kMRC: return decode_mrc(proposal, code, seed);
  }
  throw InvalidCodeError("decode: unknown variant");
}

}  // namespace astarcode
