#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "astarcode/bench.hpp"
#include "astarcode/distributions.hpp"
#include "astarcode/isokl.hpp"
#include "astarcode/tree.hpp"

namespace astarcode {

using Json = nlohmann::json;

/// {"family": "gaussian", "mean", "variance"} |
/// {"family": "uniform", "center", "width"} |
/// {"family": "uniform_mixture", "components": [{"weight", "low", "high"}]}
Json distribution_to_json(const Distribution1D& d);
Distribution1D distribution_from_json(const Json& j);

/// {"target": ..., "proposal": ...}
Json pair_to_json(const PairSpec& pair);
PairSpec pair_from_json(const Json& j);

/// A pair model file holds either one pair object or {"pairs": [...]}.
std::vector<PairSpec> pairs_from_json(const Json& j);

/// Block model:
///   {"block_kappa": [k0, k1, ...],
///    "coordinates": [{"prior_mean", "prior_std", "target_mean", "block_id"}, ...]}
/// Coordinates keep file order inside their block.
bool is_block_model(const Json& j);
std::vector<IsoKLGaussianBlock> blocks_from_json(const Json& j);
std::vector<GaussianPriorBlock> block_priors_from_json(const Json& j);

/// Experiment config (schema version 1). Unknown keys are rejected.
ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& config);

/// One JSON object per popped node.
Json node_to_json(const NodeRecord& node);

/// Reads and parses a JSON file; ConfigError on I/O or syntax errors.
Json read_json_file(const std::string& path);

}  // namespace astarcode
