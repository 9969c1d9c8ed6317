#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace astarcode {

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

/// Property oracles run by `astarcode verify`. Suites: shrinkage, isokl,
/// bounds, roundtrip, gumbel, all. ConfigError on an unknown suite.
std::vector<CheckResult> run_verify_suite(std::string_view suite, std::uint64_t seed = 1);

}  // namespace astarcode
