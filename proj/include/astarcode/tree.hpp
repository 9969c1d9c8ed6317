#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "astarcode/distributions.hpp"
#include "astarcode/randomness.hpp"

namespace astarcode {

enum class PartitionKind {
  kGlobalBound,  // no refinement: one child holding the whole parent region
  kSampleSplit,  // AS*: split at the node's sample
  kDyadic,       // AD*: split at the proposal-mass median of the region
};

/// Deepest depth whose heap indices fit in 64 bits with room for children.
inline constexpr unsigned kMaxDepth = 62;

/// One node of the Gumbel-process search tree.
///
/// For kSampleSplit and kDyadic, `index` is the heap index (root 1, children
/// 2H and 2H+1) and depth = floor(log2 index) + 1. Global-bound trees are a
/// chain, so there `index` is the 1-based arrival position and depth equals
/// it; the heap index 2^K - 1 would overflow long before a race ends.
struct NodeRecord {
  std::uint64_t index = 1;
  unsigned depth = 1;
  Region region;
  double sample = 0.0;
  GumbelValue gumbel;
  double parent_gumbel = kInf;
};

std::pair<std::uint64_t, std::uint64_t> heap_children(std::uint64_t heap_index);
unsigned depth_of(std::uint64_t heap_index);

struct Split {
  std::optional<Region> left;
  Region right;
};

/// Child regions of `region`. kGlobalBound returns (none, region).
Split partition(PartitionKind kind, const Region& region, double sample,
                const Distribution1D& proposal);

/// Uniform feeding the `slot` draw of node `index`.
double node_uniform(std::uint64_t seed, std::uint64_t index, DrawSlot slot);

/// Root node: whole line, G ~ Gumbel(0), X ~ P.
NodeRecord make_root(const Distribution1D& proposal, std::uint64_t seed);

/// Builds the child node with the given index and region below `parent`.
/// Returns nullopt when the region carries no proposal mass.
std::optional<NodeRecord> make_child(const NodeRecord& parent, std::uint64_t index,
                                     const Region& region, const Distribution1D& proposal,
                                     std::uint64_t seed);

/// Children of `node` in (left, right) order; zero-mass children are skipped.
std::vector<NodeRecord> expand(const NodeRecord& node, PartitionKind kind,
                               const Distribution1D& proposal, std::uint64_t seed);

/// Region of the node with the given index, rebuilt from the root using only
/// proposal arithmetic and public randomness. Also returns that node's
/// sample.
std::pair<Region, double> locate_node(std::uint64_t index, PartitionKind kind,
                                      const Distribution1D& proposal, std::uint64_t seed);

/// Priority-queue top-down construction of a Gumbel process over the
/// proposal. Nodes come out in strictly decreasing Gumbel order. With a depth
/// limit d, nodes at depth d are yielded but not expanded.
class TopDownProcess {
 public:
  TopDownProcess(Distribution1D proposal, PartitionKind kind, std::uint64_t seed,
                 std::optional<unsigned> depth_limit = std::nullopt);

  std::optional<NodeRecord> next();

 private:
  struct Entry {
    double priority;
    NodeRecord node;
  };
  struct Lower {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.priority != b.priority) return a.priority < b.priority;
      return a.node.index > b.node.index;
    }
  };

  Distribution1D proposal_;
  PartitionKind kind_;
  std::uint64_t seed_;
  std::optional<unsigned> depth_limit_;
  std::priority_queue<Entry, std::vector<Entry>, Lower> queue_;
};

/// First `count` nodes of the process (fewer if the depth limit exhausts it).
std::vector<NodeRecord> top_down_process(const Distribution1D& proposal, std::size_t count,
                                         std::optional<unsigned> depth_limit,
                                         PartitionKind kind, std::uint64_t seed);

}  // namespace astarcode
