#include "astarcode/verify.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "astarcode/bench.hpp"
#include "astarcode/bitstream.hpp"
#include "astarcode/coders.hpp"
#include "astarcode/isokl.hpp"
#include "astarcode/stats.hpp"

namespace astarcode {

namespace {

std::string str(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::vector<CheckResult> shrinkage_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  for (auto kind : {PartitionKind::kSampleSplit, PartitionKind::kDyadic}) {
    const auto report = verify_shrinkage(kind, 10, 10'000, seed);
    CheckResult r{kind == PartitionKind::kDyadic ? "shrinkage/dyadic" : "shrinkage/sample_split",
                  report.pass, ""};
    const auto& last = report.levels.back();
    r.detail = "depth 10 mean mass " + str(last.mean_mass) + " bound " + str(last.bound);
    out.push_back(r);
  }
  return out;
}

double gaussian_kl(double mu, double s2, double nu, double r2) {
  return 0.5 * (s2 / r2 - 1.0 - std::log(s2 / r2) + (mu - nu) * (mu - nu) / r2);
}

std::vector<CheckResult> isokl_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_kl = 0.0, worst_pair = 0.0, worst_uniform = 0.0, worst_w = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double nu = 4.0 * unit(rng) - 2.0;
    const double rho = 0.1 + 3.0 * unit(rng);
    const double kappa = 1e-3 + 8.0 * unit(rng);
    const double mu = nu + rho * std::sqrt(2.0 * kappa) * (1.9 * unit(rng) - 0.95);
    const double s2 = gaussian_from_mean_kl(nu, rho, mu, kappa);
    worst_kl = std::max(worst_kl, std::abs(gaussian_kl(mu, s2, nu, rho * rho) - kappa));

    const double dinf = 0.05 + 8.0 * unit(rng);
    const double kl = max_kl_for_dinf(dinf) * unit(rng);
    const PairSpec p = gaussian_cell_pair({kl, dinf});
    worst_pair = std::max({worst_pair, std::abs(p.analytic_kl() - kl), std::abs(p.analytic_dinf() - dinf)});

    const Uniform u = uniform_from_mean_kl(nu, rho, kappa, 6.0 * unit(rng) - 3.0);
    const PairSpec up(Distribution1D(u), Distribution1D(Uniform{nu, rho}));
    worst_uniform = std::max(worst_uniform, std::abs(up.analytic_kl() - kappa));

    const double x = -std::exp(-1.0) + std::exp(20.0 * unit(rng) - 10.0) * (unit(rng) < 0.5 ? 1e-6 : 1.0);
    const double w = lambert_w0(x);
    worst_w = std::max(worst_w, std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x)));
  }
  return {{"isokl/mean_kl", worst_kl <= 1e-9, "max |kl - kappa| = " + str(worst_kl)},
          {"isokl/kl_dinf", worst_pair <= 1e-9, "max error = " + str(worst_pair)},
          {"isokl/uniform", worst_uniform <= 1e-9, "max error = " + str(worst_uniform)},
          {"isokl/lambert_w0", worst_w <= 1e-12, "max residual = " + str(worst_w)}};
}

std::vector<CheckResult> bounds_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int below = 0;
  double worst_gap = 0.0;
  for (int i = 0; i < 300; ++i) {
    const PairSpec pair(Gaussian{2.0 * unit(rng) - 1.0, 0.05 + 2.0 * unit(rng)},
                        Gaussian{2.0 * unit(rng) - 1.0, 0.2 + 2.0 * unit(rng)});
    const double a = 6.0 * unit(rng) - 3.0;
    const double b = a + 3.0 * unit(rng) + 1e-3;
    const double m = pair.bound_M({a, b});
    double grid = -kInf;
    constexpr int n = 20'000;
    for (int k = 0; k <= n; ++k) grid = std::max(grid, pair.log_ratio(a + (b - a) * k / n));
    if (grid > m + 1e-12 * (1.0 + std::abs(m))) ++below;
    worst_gap = std::max(worst_gap, m - grid);
  }
  return {{"bounds/sup_dominates", below == 0, std::to_string(below) + " regions where a point exceeds M"},
          {"bounds/sup_tight", worst_gap <= 1e-4, "max M - grid max = " + str(worst_gap)}};
}

std::vector<CheckResult> roundtrip_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int failures = 0;
  int cycles = 0;
  const CoderVariant variants[] = {CoderVariant::kAS, CoderVariant::kAD, CoderVariant::kDAD,
                                   CoderVariant::kPFR, CoderVariant::kMRC};
  for (int i = 0; i < 200; ++i) {
    const double dinf = 0.1 + 3.0 * unit(rng);
    const PairSpec pair = gaussian_cell_pair({max_kl_for_dinf(dinf) * unit(rng), dinf});
    for (CoderVariant v : variants) {
      const std::uint64_t s = rng();
      EncodeResult enc;
      switch (v) {
        case CoderVariant::kAS: enc = encode_astar(pair, PartitionKind::kSampleSplit, s); break;
        case CoderVariant::kAD: enc = encode_astar(pair, PartitionKind::kDyadic, s); break;
        case CoderVariant::kDAD: enc = encode_dad(pair, s, 1 + static_cast<unsigned>(rng() % 12)); break;
        case CoderVariant::kPFR: enc = encode_pfr(pair, s); break;
        case CoderVariant::kMRC: enc = encode_mrc(pair, s, 1 + static_cast<unsigned>(rng() % 10)); break;
      }
      Message msg;
      msg.variant = v;
      msg.symbols.push_back(enc.code);
      const Message back = deserialize_message(serialize_message(msg));
      const double x = decode(pair.proposal(), back.symbols.at(0), s);
      ++cycles;
      if (!(back == msg) || std::memcmp(&x, &enc.sample, sizeof x) != 0) ++failures;
    }
  }
  return {{"roundtrip/codecs", failures == 0,
           std::to_string(failures) + " of " + std::to_string(cycles) + " cycles differ"}};
}

std::vector<CheckResult> gumbel_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  const PairSpec pair(Gaussian{0.7, 0.3}, Gaussian{0.0, 1.0});
  const auto& q = pair.target();
  for (auto kind : {PartitionKind::kSampleSplit, PartitionKind::kDyadic, PartitionKind::kGlobalBound}) {
    std::vector<double> xs;
    for (std::uint64_t t = 0; t < 2000; ++t) {
      xs.push_back(encode_astar(pair, kind, derive_seed(seed, t)).sample);
    }
    const auto ks = stats::ks_test(xs, [&](double x) { return q.cdf(x); });
    const char* name = kind == PartitionKind::kDyadic        ? "gumbel/ad_exact"
                       : kind == PartitionKind::kSampleSplit ? "gumbel/as_exact"
                                                             : "gumbel/global_bound_exact";
    out.push_back({name, ks.p_value > 1e-3, "KS p = " + str(ks.p_value)});
  }
  // The process's first arrival is distributed as the proposal.
  std::vector<double> first;
  int order_violations = 0;
  for (std::uint64_t t = 0; t < 2000; ++t) {
    const auto nodes = top_down_process(pair.proposal(), 20, std::nullopt, PartitionKind::kDyadic,
                                        derive_seed(seed ^ 0x5a5a, t));
    first.push_back(nodes.front().sample);
    for (std::size_t k = 1; k < nodes.size(); ++k) {
      if (!(nodes[k].gumbel.value <= nodes[k - 1].gumbel.value)) ++order_violations;
    }
  }
  const auto ks = stats::ks_test(first, [&](double x) { return pair.proposal().cdf(x); });
  out.push_back({"gumbel/first_arrival", ks.p_value > 1e-3, "KS p = " + str(ks.p_value)});
  out.push_back({"gumbel/decreasing", order_violations == 0,
                 std::to_string(order_violations) + " order violations"});
  return out;
}

}  // namespace

std::vector<CheckResult> run_verify_suite(std::string_view suite, std::uint64_t seed) {
  if (suite == "shrinkage") return shrinkage_suite(seed);
  if (suite == "isokl") return isokl_suite(seed);
  if (suite == "bounds") return bounds_suite(seed);
  if (suite == "roundtrip") return roundtrip_suite(seed);
  if (suite == "gumbel") return gumbel_suite(seed);
  if (suite == "all") {
    std::vector<CheckResult> out;
    for (const char* s : {"shrinkage", "isokl", "bounds", "roundtrip", "gumbel"}) {
      auto part = run_verify_suite(s, seed);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  throw ConfigError("unknown verify suite '" + std::string(suite) + "'");
}

}  // namespace astarcode
