#include "astarcode/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <iostream>
#include <map>
#include <numbers>
#include <thread>
#include <tuple>

#include "astarcode/isokl.hpp"
#include "astarcode/randomness.hpp"

namespace astarcode {

// ---------------------------------------------------------------------------
// k-NN divergence estimator

namespace {

// Distance from sorted[pos] (or from x, when skip_self is false) to its k-th
// nearest neighbour in `sorted`. `pos` is the insertion/self position.
double kth_neighbour_distance(const std::vector<double>& sorted, double x, std::size_t pos,
                              bool skip_self, unsigned k) {
  // Two cursors walking outwards from x.
  std::ptrdiff_t left = static_cast<std::ptrdiff_t>(pos) - 1;
  std::size_t right = skip_self ? pos + 1 : pos;
  double d = 0.0;
  for (unsigned found = 0; found < k; ++found) {
    const double dl = left >= 0 ? x - sorted[static_cast<std::size_t>(left)] : kInf;
    const double dr = right < sorted.size() ? sorted[right] - x : kInf;
    if (dl <= dr) {
      d = dl;
      --left;
    } else {
      d = dr;
      ++right;
    }
  }
  return d;
}

constexpr double kDistanceFloor = 1e-12;

}  // namespace

double knn_kl_estimate(std::span<const double> samples_p, std::span<const double> samples_q,
                       unsigned k) {
  if (k < 1) throw DomainError("knn_kl_estimate: k must be >= 1");
  if (samples_p.size() < static_cast<std::size_t>(k) + 2 ||
      samples_q.size() < static_cast<std::size_t>(k) + 1) {
    throw DomainError("knn_kl_estimate: need at least k+2 samples from P and k+1 from Q");
  }
  std::vector<double> p(samples_p.begin(), samples_p.end());
  std::vector<double> q(samples_q.begin(), samples_q.end());
  std::sort(p.begin(), p.end());
  std::sort(q.begin(), q.end());
  const double n = static_cast<double>(p.size());
  const double m = static_cast<double>(q.size());

  bool floored = false;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = p[i];
    double rho = kth_neighbour_distance(p, x, i, true, k);
    const auto qpos = static_cast<std::size_t>(std::lower_bound(q.begin(), q.end(), x) - q.begin());
    double nu = kth_neighbour_distance(q, x, qpos, false, k);
    if (rho <= 0.0) {
      rho = kDistanceFloor;
      floored = true;
    }
    if (nu <= 0.0) {
      nu = kDistanceFloor;
      floored = true;
    }
    sum += std::log(nu / rho);
  }
  if (floored) {
    std::cerr << "warning: knn_kl_estimate: duplicate points, zero distances floored at 1e-12\n";
  }
  return sum / n + std::log(m / (n - 1.0));
}

// ---------------------------------------------------------------------------
// Configuration and rows

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (repeats < 1) throw ConfigError("config: repeats must be >= 1");
  if (batch_size < 3) throw ConfigError("config: batch_size must be >= 3");
  if (algorithms.empty()) throw ConfigError("config: algorithms must not be empty");
  for (const auto& c : gaussian_cells) {
    if (!(c.kl >= 0.0) || !(c.dinf >= c.kl)) {
      throw ConfigError("config: gaussian cells need 0 <= kl <= dinf");
    }
    try {
      gaussian_from_kl_dinf(c.kl, c.dinf);
    } catch (const InfeasibleError& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
}

std::string_view result_csv_header() {
  return "algorithm,family,d_kl_nats,d_inf_nats,n_modes,t_extra_bits,trial_index,steps,depth,"
         "payload_bits,kl_bias_estimate,error";
}

namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << result_csv_header() << "\r\n";
  for (const auto& r : rows) {
    out << csv_field(r.algorithm) << ',' << csv_field(r.family) << ',' << fmt(r.d_kl_nats) << ','
        << fmt(r.d_inf_nats) << ',' << r.n_modes << ','
        << (r.t_extra_bits ? std::to_string(*r.t_extra_bits) : "") << ',' << r.trial_index
        << ',' << fmt(r.steps) << ',' << fmt(r.depth) << ',' << fmt(r.payload_bits) << ','
        << (r.kl_bias_estimate ? fmt(*r.kl_bias_estimate) : "") << ',' << csv_field(r.error)
        << "\r\n";
  }
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  unsigned workers = threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < n; i = next++) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// Problem families

PairSpec gaussian_cell_pair(const GaussianCell& cell) {
  const GaussianParams q = gaussian_from_kl_dinf(cell.kl, cell.dinf);
  return PairSpec(Gaussian{q.mean, q.variance}, Gaussian{0.0, 1.0});
}

PairSpec mixture_pair(unsigned modes, double dinf) {
  if (modes < 1) throw ConfigError("mixture_pair: need at least one mode");
  if (!(dinf >= 0.0)) throw ConfigError("mixture_pair: dinf must be >= 0");
  const double width = std::exp(-dinf) / modes;
  UniformMixture mix;
  for (unsigned j = 0; j < modes; ++j) {
    const double c = (j + 0.5) / modes;
    mix.components.push_back({1.0 / modes, c - 0.5 * width, c + 0.5 * width});
  }
  return PairSpec(Distribution1D(std::move(mix)), Distribution1D(Uniform{0.5, 1.0}));
}

PairSpec uniform_pair(double kappa) {
  return PairSpec(Distribution1D(uniform_from_mean_kl(0.5, 1.0, kappa, 0.5)),
                  Distribution1D(Uniform{0.5, 1.0}));
}

namespace {

struct Cell {
  std::string family;
  PairSpec pair;
  unsigned modes = 1;
  std::uint64_t seed = 0;
};

EncodeResult run_exact(const std::string& algorithm, const PairSpec& pair, std::uint64_t seed) {
  if (algorithm == "as") return encode_astar(pair, PartitionKind::kSampleSplit, seed);
  if (algorithm == "ad") return encode_astar(pair, PartitionKind::kDyadic, seed);
  if (algorithm == "gb") return encode_astar(pair, PartitionKind::kGlobalBound, seed);
  if (algorithm == "pfr") return encode_pfr(pair, seed, 100'000'000);
  throw ConfigError("unknown exact algorithm '" + algorithm + "'");
}

double codelength_bits(const std::string& algorithm, const EncodeResult& enc) {
  // PFR's codelength without overhead is log2 K.
  if (algorithm == "pfr" || algorithm == "gb") return std::log2(static_cast<double>(enc.code.payload));
  return enc.stats.payload_bits;
}

std::vector<ResultRow> run_exact_cells(const ExperimentConfig& config,
                                       const std::vector<Cell>& cells) {
  struct Job {
    std::size_t cell;
    std::string algorithm;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (const auto& a : config.algorithms) {
      if ((a == "pfr" || a == "gb") && cells[c].pair.analytic_dinf() > config.pfr_max_dinf) {
        continue;
      }
      jobs.push_back({c, a});
    }
  }
  std::vector<ResultRow> rows(jobs.size() * config.trials);
  parallel_for(rows.size(), config.threads, [&](std::size_t i) {
    const Job& job = jobs[i / config.trials];
    const Cell& cell = cells[job.cell];
    const auto trial = static_cast<unsigned>(i % config.trials);
    ResultRow& row = rows[i];
    row.algorithm = job.algorithm;
    row.family = cell.family;
    row.d_kl_nats = cell.pair.analytic_kl();
    row.d_inf_nats = cell.pair.analytic_dinf();
    row.n_modes = cell.modes;
    row.trial_index = trial;
    try {
      const EncodeResult enc = run_exact(job.algorithm, cell.pair, derive_seed(cell.seed, trial));
      row.steps = static_cast<double>(enc.stats.steps);
      row.depth = enc.stats.returned_depth;
      row.payload_bits = codelength_bits(job.algorithm, enc);
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  return rows;
}

}  // namespace

std::vector<ResultRow> run_runtime_grid(const ExperimentConfig& config) {
  config.validate();
  std::vector<Cell> cells;
  std::uint64_t id = 0;
  for (const auto& g : config.gaussian_cells) {
    cells.push_back({"gaussian", gaussian_cell_pair(g), 1, derive_seed(config.seed, id++)});
  }
  for (double kappa : config.uniform_kappas) {
    cells.push_back({"uniform", uniform_pair(kappa), 1, derive_seed(config.seed, id++)});
  }
  return run_exact_cells(config, cells);
}

std::vector<ResultRow> run_mode_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.mixture_modes.empty()) throw ConfigError("config: mixture_modes must not be empty");
  std::vector<Cell> cells;
  // All mode counts share trial seeds so differences come from the target.
  const std::uint64_t seed = derive_seed(config.seed, 0x6d6f646573ULL);
  for (unsigned m : config.mixture_modes) {
    cells.push_back({"mixture", mixture_pair(m, config.mixture_dinf), m, seed});
  }
  return run_exact_cells(config, cells);
}

std::vector<ResultRow> run_bias_grid(const ExperimentConfig& config) {
  config.validate();
  if (config.gaussian_cells.empty()) throw ConfigError("config: bias grid needs gaussian_cells");
  struct Job {
    std::size_t cell;
    std::string algorithm;
    std::optional<unsigned> t;
    unsigned repeat;
  };
  std::vector<PairSpec> pairs;
  for (const auto& g : config.gaussian_cells) pairs.push_back(gaussian_cell_pair(g));

  std::vector<Job> jobs;
  for (std::size_t c = 0; c < pairs.size(); ++c) {
    for (const auto& a : config.algorithms) {
      if (a == "ad") {
        for (unsigned r = 0; r < config.repeats; ++r) jobs.push_back({c, a, std::nullopt, r});
      } else if (a == "dad" || a == "mrc") {
        for (unsigned t : config.extra_bits) {
          for (unsigned r = 0; r < config.repeats; ++r) jobs.push_back({c, a, t, r});
        }
      } else {
        throw ConfigError("bias grid supports algorithms dad, mrc and ad");
      }
    }
  }

  std::vector<ResultRow> rows(jobs.size());
  parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    const PairSpec& pair = pairs[job.cell];
    const std::uint64_t cell_seed = derive_seed(config.seed, job.cell);
    const double kl_bits = pair.analytic_kl() / std::numbers::ln2;
    const unsigned base_bits = static_cast<unsigned>(std::floor(kl_bits));

    ResultRow& row = rows[j];
    row.algorithm = job.algorithm;
    row.family = "gaussian";
    row.d_kl_nats = pair.analytic_kl();
    row.d_inf_nats = pair.analytic_dinf();
    row.t_extra_bits = job.t;
    row.trial_index = job.repeat;
    try {
      const unsigned budget = job.t ? std::max(1U, base_bits + *job.t) : 0;
      std::vector<double> encoded(config.batch_size);
      std::vector<double> reference(config.batch_size);
      double steps = 0.0;
      double depth = 0.0;
      double bits = 0.0;
      for (unsigned i = 0; i < config.batch_size; ++i) {
        // Seeds depend on (cell, repeat, i) only: every budget and coder
        // sees the same public randomness.
        const std::uint64_t index = static_cast<std::uint64_t>(job.repeat) * config.batch_size + i;
        const std::uint64_t s = derive_seed(cell_seed, index);
        EncodeResult enc;
        if (job.algorithm == "dad") {
          enc = encode_dad(pair, s, budget);
        } else if (job.algorithm == "mrc") {
          enc = encode_mrc(pair, s, budget);
        } else {
          enc = encode_astar(pair, PartitionKind::kDyadic, s);
        }
        encoded[i] = enc.sample;
        steps += static_cast<double>(enc.stats.steps);
        depth += enc.stats.returned_depth;
        bits += enc.stats.payload_bits;
        const double u = keyed_uniform({derive_seed(cell_seed, 0x7265666572656e63ULL), index,
                                        DrawSlot::kSample, 1});
        reference[i] = pair.target().inv_cdf(u);
      }
      const double n = config.batch_size;
      row.steps = steps / n;
      row.depth = depth / n;
      row.payload_bits = bits / n;
      row.kl_bias_estimate = knn_kl_estimate(encoded, reference);
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Summaries

std::vector<CellSummary> summarize(std::span<const ResultRow> rows) {
  using Key = std::tuple<std::string, std::string, double, double, unsigned, int>;
  std::map<Key, std::size_t> index;
  std::vector<CellSummary> cells;
  std::vector<std::vector<const ResultRow*>> members;
  for (const auto& r : rows) {
    const Key key{r.algorithm, r.family, r.d_kl_nats, r.d_inf_nats, r.n_modes,
                  r.t_extra_bits ? static_cast<int>(*r.t_extra_bits) : -1};
    auto [it, inserted] = index.try_emplace(key, cells.size());
    if (inserted) {
      CellSummary s;
      s.algorithm = r.algorithm;
      s.family = r.family;
      s.d_kl_nats = r.d_kl_nats;
      s.d_inf_nats = r.d_inf_nats;
      s.n_modes = r.n_modes;
      s.t_extra_bits = r.t_extra_bits;
      cells.push_back(s);
      members.emplace_back();
    }
    members[it->second].push_back(&r);
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> steps, depth, bits, bias;
    for (const ResultRow* r : members[c]) {
      if (!r->error.empty()) {
        ++cells[c].errors;
        continue;
      }
      steps.push_back(r->steps);
      depth.push_back(r->depth);
      bits.push_back(r->payload_bits);
      if (r->kl_bias_estimate) bias.push_back(*r->kl_bias_estimate);
    }
    CellSummary& s = cells[c];
    s.count = steps.size();
    if (steps.empty()) continue;
    s.steps_mean = stats::mean(steps);
    s.steps_se = stats::standard_error(steps);
    s.steps_quartiles = stats::quartiles(steps);
    s.depth_mean = stats::mean(depth);
    s.depth_se = stats::standard_error(depth);
    s.depth_quartiles = stats::quartiles(depth);
    s.payload_bits_mean = stats::mean(bits);
    if (!bias.empty()) {
      s.bias_mean = stats::mean(bias);
      s.bias_se = stats::standard_error(bias);
    }
  }
  return cells;
}

std::string_view summary_csv_header() {
  return "algorithm,family,d_kl_nats,d_inf_nats,n_modes,t_extra_bits,count,errors,steps_mean,"
         "steps_se,steps_q1,steps_median,steps_q3,depth_mean,depth_se,depth_q1,depth_median,"
         "depth_q3,payload_bits_mean,kl_bias_mean,kl_bias_se";
}

void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells) {
  out << summary_csv_header() << "\r\n";
  for (const auto& s : cells) {
    out << csv_field(s.algorithm) << ',' << csv_field(s.family) << ',' << fmt(s.d_kl_nats) << ','
        << fmt(s.d_inf_nats) << ',' << s.n_modes << ','
        << (s.t_extra_bits ? std::to_string(*s.t_extra_bits) : "") << ',' << s.count << ','
        << s.errors << ',' << fmt(s.steps_mean) << ',' << fmt(s.steps_se) << ','
        << fmt(s.steps_quartiles.q1) << ',' << fmt(s.steps_quartiles.median) << ','
        << fmt(s.steps_quartiles.q3) << ',' << fmt(s.depth_mean) << ',' << fmt(s.depth_se) << ','
        << fmt(s.depth_quartiles.q1) << ',' << fmt(s.depth_quartiles.median) << ','
        << fmt(s.depth_quartiles.q3) << ',' << fmt(s.payload_bits_mean) << ','
        << (s.bias_mean ? fmt(*s.bias_mean) : "") << ',' << (s.bias_se ? fmt(*s.bias_se) : "")
        << "\r\n";
  }
}

// ---------------------------------------------------------------------------
// Shrinkage

ShrinkageReport verify_shrinkage(PartitionKind kind, unsigned depth_max, unsigned trials,
                                 std::uint64_t seed) {
  if (kind == PartitionKind::kGlobalBound) {
    throw ConfigError("verify_shrinkage: global bound never shrinks");
  }
  if (depth_max < 1 || depth_max > kMaxDepth) throw ConfigError("verify_shrinkage: bad depth");
  if (trials < 2) throw ConfigError("verify_shrinkage: need at least 2 trials");
  const Distribution1D proposal(Uniform{0.5, 1.0});
  std::vector<std::vector<double>> masses(depth_max, std::vector<double>(trials));
  for (unsigned t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, t);
    NodeRecord node = make_root(proposal, s);
    masses[0][t] = proposal.mass(node.region);
    for (unsigned d = 1; d < depth_max; ++d) {
      const auto children = expand(node, kind, proposal, s);
      const NodeRecord* next = &children.front();
      if (children.size() == 2) {
        const double ml = proposal.mass(children[0].region);
        const double mr = proposal.mass(children[1].region);
        if (mr > ml || (mr == ml && (mix64(s + d) & 1U))) next = &children[1];
      }
      node = *next;
      masses[d][t] = proposal.mass(node.region);
    }
  }
  ShrinkageReport report;
  report.kind = kind;
  for (unsigned d = 0; d < depth_max; ++d) {
    ShrinkageLevel level;
    level.depth = d + 1;
    level.mean_mass = stats::mean(masses[d]);
    level.standard_error = stats::standard_error(masses[d]);
    if (kind == PartitionKind::kDyadic) {
      level.bound = std::ldexp(1.0, -static_cast<int>(d));
      level.pass = std::all_of(masses[d].begin(), masses[d].end(),
                               [&](double m) { return m == level.bound; });
    } else {
      level.bound = std::pow(0.75, d);
      level.pass = level.mean_mass <= level.bound + 3.0 * level.standard_error;
    }
    report.pass = report.pass && level.pass;
    report.levels.push_back(level);
  }
  return report;
}

}  // namespace astarcode
