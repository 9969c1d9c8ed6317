#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "astarcode/coders.hpp"
#include "astarcode/distributions.hpp"
#include "astarcode/stats.hpp"
#include "astarcode/tree.hpp"

namespace astarcode {

/// 1-D k-nearest-neighbour estimate of KL(P || Q) from samples of P and Q.
/// Requires k >= 1, samples_p.size() >= k + 2 and samples_q.size() >= k + 1.
/// Zero neighbour distances are replaced by 1e-12 (with a warning on stderr).
double knn_kl_estimate(std::span<const double> samples_p, std::span<const double> samples_q,
                       unsigned k = 1);

struct GaussianCell {
  double kl = 0.0;    // nats
  double dinf = 0.0;  // nats
};

struct ExperimentConfig {
  std::vector<std::string> algorithms{"pfr", "as", "ad"};
  std::vector<GaussianCell> gaussian_cells;
  std::vector<double> uniform_kappas;
  double mixture_dinf = 2.0;
  std::vector<unsigned> mixture_modes;
  unsigned trials = 100;
  std::uint64_t seed = 1;
  std::vector<unsigned> extra_bits{0, 1, 2, 3, 4};
  unsigned repeats = 50;
  unsigned batch_size = 100;
  double pfr_max_dinf = 7.0;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct ResultRow {
  std::string algorithm;
  std::string family;
  double d_kl_nats = 0.0;
  double d_inf_nats = 0.0;
  unsigned n_modes = 1;
  std::optional<unsigned> t_extra_bits;
  unsigned trial_index = 0;
  double steps = 0.0;
  double depth = 0.0;
  double payload_bits = 0.0;
  std::optional<double> kl_bias_estimate;
  std::string error;
};

/// CSV header, pinned by a golden test.
std::string_view result_csv_header();
void write_csv(std::ostream& out, std::span<const ResultRow> rows);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots so output stays independent of scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Gaussian pair against N(0, 1) with the cell's (KL, D-infinity).
PairSpec gaussian_cell_pair(const GaussianCell& cell);
/// m disjoint equal-mass uniforms inside Uniform(0.5, 1) with D-infinity
/// fixed at `dinf`.
PairSpec mixture_pair(unsigned modes, double dinf);
/// Uniform target with KL kappa inside Uniform(0.5, 1).
PairSpec uniform_pair(double kappa);

/// One row per (cell, algorithm, trial): an exact encode with step counts.
std::vector<ResultRow> run_runtime_grid(const ExperimentConfig& config);

/// Per (Gaussian cell, extra bits t, algorithm, repeat): batch_size encodes
/// with budget floor(KL bits) + t, compared to batch_size fresh target draws
/// through the k-NN estimator. Algorithms: "dad", "mrc" and the exact "ad"
/// control (emitted without t).
std::vector<ResultRow> run_bias_grid(const ExperimentConfig& config);

/// Steps versus mode count at fixed D-infinity.
std::vector<ResultRow> run_mode_sweep(const ExperimentConfig& config);

struct CellSummary {
  std::string algorithm;
  std::string family;
  double d_kl_nats = 0.0;
  double d_inf_nats = 0.0;
  unsigned n_modes = 1;
  std::optional<unsigned> t_extra_bits;
  std::size_t count = 0;
  std::size_t errors = 0;
  double steps_mean = 0.0;
  double steps_se = 0.0;
  stats::Quartiles steps_quartiles;
  double depth_mean = 0.0;
  double depth_se = 0.0;
  stats::Quartiles depth_quartiles;
  double payload_bits_mean = 0.0;
  std::optional<double> bias_mean;
  std::optional<double> bias_se;
};

/// Groups rows by cell (everything but trial_index) in first-seen order.
std::vector<CellSummary> summarize(std::span<const ResultRow> rows);
std::string_view summary_csv_header();
void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells);

struct ShrinkageLevel {
  unsigned depth = 1;
  double mean_mass = 0.0;
  double standard_error = 0.0;
  double bound = 1.0;  // (3/4)^(d-1) for sample split, 2^-(d-1) for dyadic
  bool pass = true;
};

struct ShrinkageReport {
  PartitionKind kind = PartitionKind::kSampleSplit;
  std::vector<ShrinkageLevel> levels;
  bool pass = true;
};

/// Monte-Carlo mean proposal mass of the region at each depth along descent
/// paths that always enter the heavier child (the worst case for shrinkage).
/// Sample split passes when mean <= (3/4)^(d-1) + 3 SE; dyadic requires
/// exactly 2^-(d-1).
ShrinkageReport verify_shrinkage(PartitionKind kind, unsigned depth_max, unsigned trials,
                                 std::uint64_t seed = 1);

}  // namespace astarcode
