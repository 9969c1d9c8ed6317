#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "astarcode/bench.hpp"
#include "astarcode/isokl.hpp"
#include "astarcode/stats.hpp"

using namespace astarcode;
using doctest::Approx;

namespace {

double mean_estimate(double mu, double sigma, int n, int repeats, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> p(mu, sigma), q(0.0, 1.0);
  double sum = 0.0;
  for (int r = 0; r < repeats; ++r) {
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = p(rng);
    for (auto& x : b) x = q(rng);
    sum += knn_kl_estimate(a, b);
  }
  return sum / repeats;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("knn estimator") {
  CHECK(std::abs(mean_estimate(0.0, 1.0, 1000, 100, 1)) < 0.05);
  CHECK(mean_estimate(1.0, 1.0, 5000, 100, 2) == Approx(0.5).epsilon(0.2));
  // Calibration on pairs with known KL 0, 0.25, 0.5, 1 (mean shifts).
  for (double kl : {0.0, 0.25, 0.5, 1.0}) {
    CHECK(std::abs(mean_estimate(std::sqrt(2 * kl), 1.0, 5000, 100, 3) - kl) < 0.1);
  }
  std::vector<double> a{1, 2, 3}, b{1, 2, 3};
  CHECK_THROWS_AS(knn_kl_estimate(a, b, 2), DomainError);
  CHECK_THROWS_AS(knn_kl_estimate(a, b, 0), DomainError);
  std::vector<double> dup{1, 1, 2, 3}, other{0.5, 1.5, 2.5};
  CHECK(std::isfinite(knn_kl_estimate(dup, other)));
}

TEST_CASE("csv header") {
  CHECK(result_csv_header() ==
        "algorithm,family,d_kl_nats,d_inf_nats,n_modes,t_extra_bits,trial_index,steps,depth,"
        "payload_bits,kl_bias_estimate,error");
  std::ostringstream os;
  ResultRow r;
  r.algorithm = "ad";
  r.family = "gaussian";
  r.d_kl_nats = 0.5;
  r.d_inf_nats = 1;
  r.steps = 3;
  r.depth = 2;
  r.payload_bits = 2;
  r.error = "a,b";
  write_csv(os, std::vector<ResultRow>{r});
  CHECK(os.str().substr(result_csv_header().size() + 2) == "ad,gaussian,0.5,1,1,,0,3,2,2,,\"a,b\"\r\n");
}

TEST_CASE("runtime grid") {
  ExperimentConfig c;
  c.algorithms = {"pfr", "as", "ad"};
  c.gaussian_cells = {{0.0, 0.0}, {0.5 * max_kl_for_dinf(std::log(4.0)), std::log(4.0)}};
  c.trials = 1000;
  c.threads = 1;
  const auto rows = run_runtime_grid(c);
  CHECK(rows.size() == 2 * 3 * 1000);
  const auto cells = summarize(rows);
  REQUIRE(cells.size() == 6);
  for (const auto& s : cells) {
    CHECK(s.count == 1000);
    CHECK(s.errors == 0);
    if (s.d_inf_nats == 0.0) CHECK(s.steps_mean == 1.0);
    if (s.algorithm == "pfr" && s.d_inf_nats > 0) {
      CHECK(s.steps_mean >= 2.0);
      CHECK(s.steps_mean <= 8.0);
    }
  }
}

TEST_CASE("output does not depend on thread count") {
  ExperimentConfig c;
  c.gaussian_cells = {{0.3, 1.0}, {1.0, 2.0}};
  c.uniform_kappas = {0.5, 2.0};
  c.trials = 40;
  std::ostringstream a, b;
  c.threads = 1;
  write_csv(a, run_runtime_grid(c));
  c.threads = 4;
  write_csv(b, run_runtime_grid(c));
  CHECK(a.str() == b.str());
}

TEST_CASE("bias grid") {
  ExperimentConfig c;
  c.algorithms = {"dad", "mrc", "ad"};
  c.gaussian_cells = {{0.0, 0.0}, {1.0, 2.0}};
  c.extra_bits = {0, 2};
  c.repeats = 3;
  c.batch_size = 50;
  c.threads = 1;
  const auto rows = run_bias_grid(c);
  CHECK(rows.size() == 2 * (2 * 3 + 2 * 3 + 3));
  for (const auto& r : rows) {
    CHECK(r.error.empty());
    REQUIRE(r.kl_bias_estimate.has_value());
    if (r.algorithm == "mrc") CHECK(r.steps == std::exp2(r.payload_bits));
    if (r.d_inf_nats == 0.0) CHECK(std::abs(*r.kl_bias_estimate) < 1.0);
  }
}

TEST_CASE("mode sweep") {
  ExperimentConfig c;
  c.mixture_modes = {1, 2, 4};
  c.trials = 30;
  c.threads = 1;
  const auto rows = run_mode_sweep(c);
  CHECK(rows.size() == 3 * 3 * 30);
  for (const auto& r : rows) CHECK(r.d_inf_nats == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("pair builders") {
  const PairSpec g = gaussian_cell_pair({0.4, 1.5});
  CHECK(g.analytic_kl() == Approx(0.4).epsilon(1e-10));
  CHECK(g.analytic_dinf() == Approx(1.5).epsilon(1e-10));
  for (unsigned m : {1u, 3u, 16u}) {
    const PairSpec p = mixture_pair(m, 2.0);
    CHECK(p.analytic_dinf() == Approx(2.0).epsilon(1e-12));
    CHECK(p.target().mixture().components.size() == m);
  }
  CHECK(uniform_pair(1.3).analytic_kl() == Approx(1.3).epsilon(1e-12));
}

TEST_CASE("shrinkage") {
  const auto d = verify_shrinkage(PartitionKind::kDyadic, 6, 1000);
  CHECK(d.pass);
  CHECK(d.levels[3].mean_mass == 0.125);
  const auto s = verify_shrinkage(PartitionKind::kSampleSplit, 6, 5000);
  CHECK(s.pass);
  CHECK(s.levels[0].mean_mass == 1.0);
  CHECK(s.levels[5].mean_mass <= std::pow(0.75, 5) + 3 * s.levels[5].standard_error);
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  c.trials = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  ExperimentConfig d;
  d.gaussian_cells = {{2.0, 1.0}};
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<int> hits(1000);
  parallel_for(hits.size(), 3, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS(parallel_for(10, 2, [](std::size_t i) {
    if (i == 7) throw ConfigError("boom");
  }));
}

}  // TEST_SUITE

TEST_SUITE("stats") {

TEST_CASE("descriptive statistics") {
  std::vector<double> x{1, 2, 3, 4};
  CHECK(stats::mean(x) == 2.5);
  CHECK(stats::quantile(x, 0.25) == Approx(1.75));
  CHECK(stats::standard_error(x) == Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  std::vector<double> y{2, 4, 6, 8};
  const auto f = stats::linear_fit(x, y);
  CHECK(f.slope == Approx(2.0));
  CHECK(f.r_squared == Approx(1.0));
  CHECK(stats::spearman(x, std::vector<double>{1, 3, 2, 4}) == Approx(0.8));
  CHECK(stats::kolmogorov_sf(1.36) == Approx(0.0505).epsilon(0.01));
}

}  // TEST_SUITE
