// astarcode: encode/decode samples, run benchmark grids and property checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "astarcode/bench.hpp"
#include "astarcode/bitstream.hpp"
#include "astarcode/coders.hpp"
#include "astarcode/isokl.hpp"
#include "astarcode/randomness.hpp"
#include "astarcode/serialization.hpp"
#include "astarcode/verify.hpp"

using namespace astarcode;

namespace {

constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::string format_samples(const std::vector<double>& xs) {
  std::string s;
  char buf[40];
  for (double x : xs) {
    std::snprintf(buf, sizeof buf, "%.17g\n", x);
    s += buf;
  }
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

// ---------------------------------------------------------------------------

struct EncodeArgs {
  std::string model, out, samples, trace;
  std::uint64_t seed = 0;
  std::string exact;
  std::optional<unsigned> dad, mrc;
  unsigned extra_bits = 2;
  bool tied = false;
};

int run_encode(const EncodeArgs& a) {
  const Json model = read_json_file(a.model);
  std::vector<double> samples;
  std::vector<std::uint8_t> bytes;

  if (is_block_model(model)) {
    if (!a.exact.empty() || a.dad || a.mrc) {
      throw UsageError("block models are coded with DAD; use --extra-bits only");
    }
    const auto blocks = blocks_from_json(model);
    const auto res = encode_block_vector(blocks, BlockCodecConfig{a.extra_bits}, a.seed);
    bytes = res.message;
    for (const auto& b : res.samples) samples.insert(samples.end(), b.begin(), b.end());
    std::cerr << "block message: " << res.message_bits << " bits, " << res.total_steps << " steps\n";
  } else {
    const int chosen = !a.exact.empty() + a.dad.has_value() + a.mrc.has_value();
    if (chosen != 1) throw UsageError("choose exactly one of --exact, --dad, --mrc");
    const auto pairs = pairs_from_json(model);
    Message msg;
    msg.mode = a.tied ? FrameMode::kBlockTied : FrameMode::kExactPerSymbol;
    if (!a.exact.empty()) {
      msg.variant = parse_variant(a.exact);
      if (msg.variant == CoderVariant::kDAD || msg.variant == CoderVariant::kMRC) {
        throw UsageError("--exact takes as, ad or pfr");
      }
      if (a.tied) throw UsageError("--tied applies to --dad and --mrc only");
    } else {
      msg.variant = a.dad ? CoderVariant::kDAD : CoderVariant::kMRC;
    }
    std::ofstream trace;
    if (!a.trace.empty()) {
      trace.open(a.trace);
      if (!trace) throw UsageError("cannot write '" + a.trace + "'");
    }
    CodeBlock block;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::uint64_t s = derive_seed(a.seed, i);
      EncodeResult enc;
      switch (msg.variant) {
        case CoderVariant::kAS:
        case CoderVariant::kAD: {
          SearchOptions opt;
          opt.kind = msg.variant == CoderVariant::kAS ? PartitionKind::kSampleSplit
                                                      : PartitionKind::kDyadic;
          if (trace.is_open()) {
            opt.trace = [&](const NodeRecord& n) {
              Json j = node_to_json(n);
              j["symbol"] = i;
              trace << j.dump() << '\n';
            };
            (void)astar_search(pairs[i], s, opt);
          }
          enc = encode_astar(pairs[i], opt.kind, s);
          break;
        }
        case CoderVariant::kPFR: enc = encode_pfr(pairs[i], s); break;
        case CoderVariant::kDAD: enc = encode_dad(pairs[i], s, *a.dad); break;
        case CoderVariant::kMRC: enc = encode_mrc(pairs[i], s, *a.mrc); break;
      }
      samples.push_back(enc.sample);
      if (a.tied) {
        block.budget = enc.code.depth_or_budget;
        block.codewords.push_back(enc.code.payload);
      } else {
        msg.symbols.push_back(enc.code);
      }
    }
    if (a.tied) msg.blocks.push_back(block);
    bytes = serialize_message(msg);
  }
  write_bytes(a.out, bytes);
  if (!a.samples.empty()) write_text(a.samples, format_samples(samples));
  return 0;
}

int run_decode(const std::string& model_path, const std::string& in_path,
               const std::string& out_path, std::uint64_t seed) {
  const Json model = read_json_file(model_path);
  const auto bytes = read_bytes(in_path);
  std::vector<double> samples;
  if (is_block_model(model)) {
    for (const auto& b : decode_block_vector(block_priors_from_json(model), bytes, seed)) {
      samples.insert(samples.end(), b.begin(), b.end());
    }
  } else {
    const auto pairs = pairs_from_json(model);
    const Message msg = deserialize_message(bytes);
    std::vector<Code> codes = msg.symbols;
    for (const auto& b : msg.blocks) {
      for (auto w : b.codewords) codes.push_back({msg.variant, b.budget, w});
    }
    if (codes.size() != pairs.size()) {
      throw MalformedMessageError("message holds " + std::to_string(codes.size()) +
                                  " symbols but the model has " + std::to_string(pairs.size()));
    }
    for (std::size_t i = 0; i < codes.size(); ++i) {
      samples.push_back(decode(pairs[i].proposal(), codes[i], derive_seed(seed, i)));
    }
  }
  write_text(out_path, format_samples(samples));
  return 0;
}

enum class Bench { kRuntime, kBias, kModes };

int run_bench(Bench which, const std::string& config_path, const std::string& out,
              const std::string& summary, std::optional<unsigned> threads) {
  ExperimentConfig config = config_from_json(read_json_file(config_path));
  if (threads) config.threads = *threads;
  std::vector<ResultRow> rows;
  switch (which) {
    case Bench::kRuntime: rows = run_runtime_grid(config); break;
    case Bench::kBias: rows = run_bias_grid(config); break;
    case Bench::kModes: rows = run_mode_sweep(config); break;
  }
  std::ostringstream csv;
  write_csv(csv, rows);
  write_text(out, csv.str());
  if (!summary.empty()) {
    std::ostringstream s;
    write_summary_csv(s, summarize(rows));
    write_text(summary, s.str());
  }
  return 0;
}

int run_verify(const std::string& suite, std::uint64_t seed) {
  bool ok = true;
  for (const auto& r : run_verify_suite(suite, seed)) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.pass;
  }
  return ok ? 0 : kExitVerify;
}

struct IsoklArgs {
  std::optional<double> prior_mean, prior_std, mean, kappa, beta, kl, dinf;
  bool uniform = false;
};

int run_isokl(const IsoklArgs& a) {
  Json out;
  if (a.kl || a.dinf) {
    if (!a.kl || !a.dinf) throw UsageError("--kl and --dinf go together");
    out = pair_to_json(gaussian_cell_pair({*a.kl, *a.dinf}));
  } else if (a.uniform) {
    if (!a.prior_mean || !a.prior_std || !a.kappa) {
      throw UsageError("uniform mode needs --prior-mean (center), --prior-std (width), --kappa");
    }
    const Uniform q = uniform_from_mean_kl(*a.prior_mean, *a.prior_std, *a.kappa, a.beta.value_or(0.0));
    out = pair_to_json(PairSpec(Distribution1D(q), Distribution1D(Uniform{*a.prior_mean, *a.prior_std})));
  } else {
    if (!a.prior_mean || !a.prior_std || !a.kappa) {
      throw UsageError("need --prior-mean, --prior-std, --kappa and one of --mean / --beta");
    }
    double mu = 0.0;
    double var = 0.0;
    if (a.mean) {
      mu = *a.mean;
      var = gaussian_from_mean_kl(*a.prior_mean, *a.prior_std, mu, *a.kappa);
    } else {
      const auto g = gaussian_unconstrained(*a.prior_mean, *a.prior_std, std::log(*a.kappa),
                                            a.beta.value_or(0.0));
      mu = g.mean;
      var = g.variance;
    }
    out = pair_to_json(PairSpec(Gaussian{mu, var},
                                Gaussian{*a.prior_mean, *a.prior_std * *a.prior_std}));
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"A* coding: relative entropy coding by branch-and-bound Gumbel search"};
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "encode samples of a model's targets");
  encode->add_option("--model", enc.model, "pair or block model JSON")->required();
  encode->add_option("--seed", enc.seed, "shared seed")->required();
  encode->add_option("--exact", enc.exact, "exact coder: as, ad or pfr");
  encode->add_option("--dad", enc.dad, "DAD budget in bits")->check(CLI::Range(1U, kMaxBudget));
  encode->add_option("--mrc", enc.mrc, "MRC budget in bits")->check(CLI::Range(1U, kMaxMrcBits));
  encode->add_flag("--tied", enc.tied, "frame DAD/MRC codes as one block");
  encode->add_option("--extra-bits", enc.extra_bits, "block models: budget slack t");
  encode->add_option("--out", enc.out, "message file")->required();
  encode->add_option("--samples", enc.samples, "write encoded samples (one per line)");
  encode->add_option("--trace", enc.trace, "AS/AD: JSON lines of popped nodes");

  std::string dec_model, dec_in, dec_out = "-";
  std::uint64_t dec_seed = 0;
  auto* decode_cmd = app.add_subcommand("decode", "decode a message into samples");
  decode_cmd->add_option("--model", dec_model, "model JSON (proposals are used)")->required();
  decode_cmd->add_option("--seed", dec_seed, "shared seed")->required();
  decode_cmd->add_option("--in", dec_in, "message file")->required();
  decode_cmd->add_option("--out", dec_out, "samples file, '-' for stdout");

  std::string cfg, bench_out = "-", bench_summary;
  std::optional<unsigned> bench_threads;
  auto add_bench = [&](const char* name, const char* help) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("--config", cfg, "experiment config JSON")->required();
    c->add_option("--out", bench_out, "per-trial CSV, '-' for stdout");
    c->add_option("--summary", bench_summary, "per-cell summary CSV");
    c->add_option("--threads", bench_threads, "worker threads (0 = all cores)");
    return c;
  };
  auto* bench_runtime = add_bench("bench-runtime", "steps and codelength grid");
  auto* bench_bias = add_bench("bench-bias", "bias versus extra bits for DAD and MRC");
  auto* bench_modes = add_bench("bench-modes", "steps versus mixture mode count");

  std::string suite = "all";
  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "run property checks");
  verify->add_option("--suite", suite, "shrinkage, isokl, bounds, roundtrip, gumbel or all")
      ->check(CLI::IsMember({"shrinkage", "isokl", "bounds", "roundtrip", "gumbel", "all"}));
  verify->add_option("--seed", verify_seed);

  IsoklArgs iso;
  auto* isokl = app.add_subcommand("isokl", "print a target/proposal pair as JSON");
  isokl->add_option("--prior-mean", iso.prior_mean);
  isokl->add_option("--prior-std", iso.prior_std);
  isokl->add_option("--mean", iso.mean);
  isokl->add_option("--kappa", iso.kappa);
  isokl->add_option("--beta", iso.beta);
  isokl->add_flag("--uniform", iso.uniform, "uniform family (prior mean = center, std = width)");
  isokl->add_option("--kl", iso.kl, "KL to N(0,1) in nats");
  isokl->add_option("--dinf", iso.dinf, "D-infinity to N(0,1) in nats");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*encode) return run_encode(enc);
    if (*decode_cmd) return run_decode(dec_model, dec_in, dec_out, dec_seed);
    if (*bench_runtime) return run_bench(Bench::kRuntime, cfg, bench_out, bench_summary, bench_threads);
    if (*bench_bias) return run_bench(Bench::kBias, cfg, bench_out, bench_summary, bench_threads);
    if (*bench_modes) return run_bench(Bench::kModes, cfg, bench_out, bench_summary, bench_threads);
    if (*verify) return run_verify(suite, verify_seed);
    if (*isokl) return run_isokl(iso);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
