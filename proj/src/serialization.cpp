#include "astarcode/serialization.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace astarcode {

namespace {

double number(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing numeric field '") + key + "'");
  }
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

Json finite_or_string(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : "-inf";
}

template <class T>
std::vector<T> array_of(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(std::string("field '") + key + "' must be an array");
  try {
    return v.get<std::vector<T>>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has elements of the wrong type");
  }
}

}  // namespace

Json distribution_to_json(const Distribution1D& d) {
  if (d.is_gaussian()) {
    return {{"family", "gaussian"}, {"mean", d.gaussian().mean}, {"variance", d.gaussian().variance}};
  }
  if (d.is_uniform()) {
    return {{"family", "uniform"}, {"center", d.uniform().center}, {"width", d.uniform().width}};
  }
  Json comps = Json::array();
  for (const auto& c : d.mixture().components) {
    comps.push_back({{"weight", c.weight}, {"low", c.low}, {"high", c.high}});
  }
  return {{"family", "uniform_mixture"}, {"components", comps}};
}

Distribution1D distribution_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw ConfigError("distribution needs a string 'family'");
  }
  const auto family = j.at("family").get<std::string>();
  if (family == "gaussian") return Distribution1D(Gaussian{number(j, "mean"), number(j, "variance")});
  if (family == "uniform") return Distribution1D(Uniform{number(j, "center"), number(j, "width")});
  if (family == "uniform_mixture") {
    if (!j.contains("components") || !j.at("components").is_array()) {
      throw ConfigError("uniform_mixture needs a 'components' array");
    }
    UniformMixture m;
    for (const auto& c : j.at("components")) {
      m.components.push_back({number(c, "weight"), number(c, "low"), number(c, "high")});
    }
    return Distribution1D(std::move(m));
  }
  throw ConfigError("unknown distribution family '" + family + "'");
}

Json pair_to_json(const PairSpec& pair) {
  return {{"target", distribution_to_json(pair.target())},
          {"proposal", distribution_to_json(pair.proposal())}};
}

PairSpec pair_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("target") || !j.contains("proposal")) {
    throw ConfigError("pair needs 'target' and 'proposal'");
  }
  return PairSpec(distribution_from_json(j.at("target")), distribution_from_json(j.at("proposal")));
}

std::vector<PairSpec> pairs_from_json(const Json& j) {
  std::vector<PairSpec> out;
  if (j.is_object() && j.contains("pairs")) {
    if (!j.at("pairs").is_array()) throw ConfigError("'pairs' must be an array");
    for (const auto& p : j.at("pairs")) out.push_back(pair_from_json(p));
    return out;
  }
  out.push_back(pair_from_json(j));
  return out;
}

bool is_block_model(const Json& j) {
  return j.is_object() && j.contains("coordinates");
}

namespace {

struct BlockCoordinates {
  std::vector<double> kappa;
  std::vector<std::vector<const Json*>> members;
};

BlockCoordinates group_coordinates(const Json& j) {
  if (!is_block_model(j) || !j.at("coordinates").is_array()) {
    throw ConfigError("block model needs a 'coordinates' array");
  }
  BlockCoordinates g;
  if (!j.contains("block_kappa")) throw ConfigError("block model needs 'block_kappa'");
  g.kappa = array_of<double>(j, "block_kappa");
  g.members.resize(g.kappa.size());
  for (const auto& c : j.at("coordinates")) {
    if (!c.contains("block_id") || !c.at("block_id").is_number_unsigned()) {
      throw ConfigError("coordinate needs a nonnegative integer 'block_id'");
    }
    const auto id = c.at("block_id").get<std::size_t>();
    if (id >= g.kappa.size()) throw ConfigError("block_id out of range of block_kappa");
    g.members[id].push_back(&c);
  }
  return g;
}

}  // namespace

std::vector<IsoKLGaussianBlock> blocks_from_json(const Json& j) {
  const BlockCoordinates g = group_coordinates(j);
  std::vector<IsoKLGaussianBlock> blocks(g.kappa.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    blocks[b].kappa = g.kappa[b];
    for (const Json* c : g.members[b]) {
      blocks[b].prior_mean.push_back(number(*c, "prior_mean"));
      blocks[b].prior_std.push_back(number(*c, "prior_std"));
      blocks[b].target_mean.push_back(number(*c, "target_mean"));
    }
  }
  return blocks;
}

std::vector<GaussianPriorBlock> block_priors_from_json(const Json& j) {
  const BlockCoordinates g = group_coordinates(j);
  std::vector<GaussianPriorBlock> priors(g.kappa.size());
  for (std::size_t b = 0; b < priors.size(); ++b) {
    for (const Json* c : g.members[b]) {
      priors[b].prior_mean.push_back(number(*c, "prior_mean"));
      priors[b].prior_std.push_back(number(*c, "prior_std"));
    }
  }
  return priors;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
      "version",  "algorithms", "gaussian_cells", "uniform_kappas", "mixture_dinf",
      "mixture_modes", "trials", "seed", "extra_bits", "repeats", "batch_size",
      "pfr_max_dinf", "threads", "description"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  if (j.contains("version") && j.at("version") != 1) {
    throw ConfigError("unsupported config version");
  }
  ExperimentConfig c;
  try {
    if (j.contains("algorithms")) c.algorithms = array_of<std::string>(j, "algorithms");
    if (j.contains("gaussian_cells")) {
      if (!j.at("gaussian_cells").is_array()) throw ConfigError("'gaussian_cells' must be an array");
      for (const auto& cell : j.at("gaussian_cells")) {
        c.gaussian_cells.push_back({number(cell, "kl"), number(cell, "dinf")});
      }
    }
    if (j.contains("uniform_kappas")) c.uniform_kappas = array_of<double>(j, "uniform_kappas");
    if (j.contains("mixture_dinf")) c.mixture_dinf = number(j, "mixture_dinf");
    if (j.contains("mixture_modes")) c.mixture_modes = array_of<unsigned>(j, "mixture_modes");
    if (j.contains("trials")) c.trials = j.at("trials").get<unsigned>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("extra_bits")) c.extra_bits = array_of<unsigned>(j, "extra_bits");
    if (j.contains("repeats")) c.repeats = j.at("repeats").get<unsigned>();
    if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<unsigned>();
    if (j.contains("pfr_max_dinf")) c.pfr_max_dinf = number(j, "pfr_max_dinf");
    if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json cells = Json::array();
  for (const auto& g : c.gaussian_cells) cells.push_back({{"kl", g.kl}, {"dinf", g.dinf}});
  return {{"version", 1},
          {"algorithms", c.algorithms},
          {"gaussian_cells", cells},
          {"uniform_kappas", c.uniform_kappas},
          {"mixture_dinf", c.mixture_dinf},
          {"mixture_modes", c.mixture_modes},
          {"trials", c.trials},
          {"seed", c.seed},
          {"extra_bits", c.extra_bits},
          {"repeats", c.repeats},
          {"batch_size", c.batch_size},
          {"pfr_max_dinf", c.pfr_max_dinf},
          {"threads", c.threads}};
}

Json node_to_json(const NodeRecord& n) {
  return {{"index", n.index},
          {"depth", n.depth},
          {"low", finite_or_string(n.region.low)},
          {"high", finite_or_string(n.region.high)},
          {"sample", n.sample},
          {"gumbel", n.gumbel.value},
          {"location", n.gumbel.location},
          {"truncation", finite_or_string(n.gumbel.truncation)}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

}  // namespace astarcode
