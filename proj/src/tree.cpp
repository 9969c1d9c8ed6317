#include "astarcode/tree.hpp"

#include <bit>
#include <cmath>

namespace astarcode {

std::pair<std::uint64_t, std::uint64_t> heap_children(std::uint64_t heap_index) {
  if (heap_index == 0) throw DomainError("heap_children: heap index 0 is reserved");
  if (heap_index >= (std::uint64_t{1} << 63)) {
    throw DepthExceededError("heap_children: child index exceeds 64 bits");
  }
  return {2 * heap_index, 2 * heap_index + 1};
}

unsigned depth_of(std::uint64_t heap_index) {
  if (heap_index == 0) throw DomainError("depth_of: heap index 0 is reserved");
  return static_cast<unsigned>(std::bit_width(heap_index));
}

Split partition(PartitionKind kind, const Region& region, double sample,
                const Distribution1D& proposal) {
  switch (kind) {
    case PartitionKind::kGlobalBound:
      return {std::nullopt, region};
    case PartitionKind::kSampleSplit: {
      if (!region.contains(sample)) {
        throw DomainError("partition: sample must lie inside the region");
      }
      return {Region{region.low, sample}, Region{sample, region.high}};
    }
    case PartitionKind::kDyadic: {
      const double gamma = proposal.mass_median(region);
      return {Region{region.low, gamma}, Region{gamma, region.high}};
    }
  }
  throw DomainError("partition: unknown kind");
}

double node_uniform(std::uint64_t seed, std::uint64_t index, DrawSlot slot) {
  return keyed_uniform({seed, index, slot, 0});
}

NodeRecord make_root(const Distribution1D& proposal, std::uint64_t seed) {
  NodeRecord root;
  root.index = 1;
  root.depth = 1;
  root.region = Region::full();
  root.gumbel = gumbel(node_uniform(seed, 1, DrawSlot::kGumbel), 0.0);
  root.sample =
      proposal.sample_restricted(root.region, node_uniform(seed, 1, DrawSlot::kSample));
  root.parent_gumbel = kInf;
  return root;
}

std::optional<NodeRecord> make_child(const NodeRecord& parent, std::uint64_t index,
                                     const Region& region, const Distribution1D& proposal,
                                     std::uint64_t seed) {
  const double mass = proposal.mass(region);
  if (!(mass > 0.0)) return std::nullopt;
  NodeRecord child;
  child.index = index;
  child.depth = parent.depth + 1;
  child.region = region;
  child.parent_gumbel = parent.gumbel.value;
  child.gumbel = trunc_gumbel(node_uniform(seed, index, DrawSlot::kGumbel), std::log(mass),
                              parent.gumbel.value);
  child.sample = proposal.sample_restricted(region, node_uniform(seed, index, DrawSlot::kSample));
  return child;
}

std::vector<NodeRecord> expand(const NodeRecord& node, PartitionKind kind,
                               const Distribution1D& proposal, std::uint64_t seed) {
  std::vector<NodeRecord> children;
  const Split split = partition(kind, node.region, node.sample, proposal);
  if (kind == PartitionKind::kGlobalBound) {
    if (auto c = make_child(node, node.index + 1, split.right, proposal, seed)) {
      children.push_back(std::move(*c));
    }
    return children;
  }
  if (node.depth >= kMaxDepth) {
    throw DepthExceededError("expand: tree depth limit of 62 reached");
  }
  const auto [left_index, right_index] = heap_children(node.index);
  if (auto c = make_child(node, left_index, *split.left, proposal, seed)) {
    children.push_back(std::move(*c));
  }
  if (auto c = make_child(node, right_index, split.right, proposal, seed)) {
    children.push_back(std::move(*c));
  }
  return children;
}

std::pair<Region, double> locate_node(std::uint64_t index, PartitionKind kind,
                                      const Distribution1D& proposal, std::uint64_t seed) {
  if (index == 0) throw DomainError("locate_node: index 0 is reserved");
  if (kind == PartitionKind::kGlobalBound) {
    const Region full = Region::full();
    return {full, proposal.sample_restricted(full, node_uniform(seed, index, DrawSlot::kSample))};
  }
  const unsigned depth = depth_of(index);
  Region region = Region::full();
  double sample = 0.0;
  const bool need_samples = kind == PartitionKind::kSampleSplit;
  if (need_samples) {
    sample = proposal.sample_restricted(region, node_uniform(seed, 1, DrawSlot::kSample));
  }
  for (unsigned level = 1; level < depth; ++level) {
    const bool right = (index >> (depth - 1 - level)) & 1U;
    const std::uint64_t prefix = index >> (depth - 1 - level);
    const Split split = partition(kind, region, sample, proposal);
    region = right ? split.right : *split.left;
    if (need_samples) {
      sample = proposal.sample_restricted(region, node_uniform(seed, prefix, DrawSlot::kSample));
    }
  }
  if (!need_samples) {
    sample = proposal.sample_restricted(region, node_uniform(seed, index, DrawSlot::kSample));
  }
  return {region, sample};
}

TopDownProcess::TopDownProcess(Distribution1D proposal, PartitionKind kind, std::uint64_t seed,
                               std::optional<unsigned> depth_limit)
    : proposal_(std::move(proposal)), kind_(kind), seed_(seed), depth_limit_(depth_limit) {
  NodeRecord root = make_root(proposal_, seed_);
  queue_.push({root.gumbel.value, std::move(root)});
}

std::optional<NodeRecord> TopDownProcess::next() {
  if (queue_.empty()) return std::nullopt;
  NodeRecord node = queue_.top().node;
  queue_.pop();
  if (!depth_limit_ || node.depth < *depth_limit_) {
    for (auto& child : expand(node, kind_, proposal_, seed_)) {
      const double g = child.gumbel.value;
      queue_.push({g, std::move(child)});
    }
  }
  return node;
}

std::vector<NodeRecord> top_down_process(const Distribution1D& proposal, std::size_t count,
                                         std::optional<unsigned> depth_limit,
                                         PartitionKind kind, std::uint64_t seed) {
  if (count == 0) throw DomainError("top_down_process: count must be at least 1");
  TopDownProcess process(proposal, kind, seed, depth_limit);
  std::vector<NodeRecord> out;
  out.reserve(count);
  while (out.size() < count) {
    auto node = process.next();
    if (!node) break;
    out.push_back(std::move(*node));
  }
  return out;
}

}  // namespace astarcode
