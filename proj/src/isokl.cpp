#include "astarcode/isokl.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "astarcode/bitstream.hpp"
#include "astarcode/randomness.hpp"

namespace astarcode {

namespace {

constexpr double kE = std::numbers::e;
// e = kE + kELow to about 32 significant digits.
constexpr double kELow = 1.4456468917292502e-16;
constexpr double kMinusInvE = -1.0 / std::numbers::e;

// Series of W0 about the branch point in p = sqrt(2 (1 + e x)).
double branch_series(double p) {
  return -1.0 +
         p * (1.0 +
              p * (-1.0 / 3.0 +
                   p * (11.0 / 72.0 +
                        p * (-43.0 / 540.0 + p * (769.0 / 17280.0 + p * (-221.0 / 8505.0))))));
}

double initial_guess(double x, double p) {
  if (p < 0.6) return branch_series(p);
  if (x < 3.0) {
    const double l = std::log1p(x);
    return l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  const double l1 = std::log(x);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

// W0(x) given t = 1 + e x computed by the caller without cancellation.
double w0_with_offset(double x, double t) {
  if (t <= 0.0) return -1.0;
  const double p = std::sqrt(2.0 * t);
  if (p < 1e-3) return branch_series(p);
  if (x == 0.0) return 0.0;
  double w = initial_guess(x, p);
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) break;
  }
  return w;
}

double branch_offset(double x) {
  // 1 + e x with the product rounded once.
  return std::fma(kE, x, 1.0) + kELow * x;
}

// sigma^2 / rho^2 for a KL gap g = 2 kappa - Delta^2 > 0:
// s = -W0(-exp(-g - 1)), with 1 + e x = -expm1(-g).
double variance_ratio_from_gap(double gap) {
  const double x = -std::exp(-gap - 1.0);
  const double t = -std::expm1(-gap);
  return -w0_with_offset(x, t);
}

}  // namespace

double lambert_w0(double x) {
  if (std::isnan(x)) throw DomainError("lambert_w0: NaN argument");
  const double t = branch_offset(x);
  if (x < kMinusInvE && t < -1e-15) {
    throw DomainError("lambert_w0: argument below -1/e");
  }
  if (x == kInf) return kInf;
  return w0_with_offset(x, t);
}

double gaussian_from_mean_kl(double prior_mean, double prior_std, double mean, double kappa) {
  if (!(prior_std > 0.0)) throw ConstraintError("gaussian_from_mean_kl: prior std must be > 0");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw ConstraintError("gaussian_from_mean_kl: kappa must be finite and >= 0");
  }
  const double delta = (mean - prior_mean) / prior_std;
  if (kappa == 0.0) {
    if (delta != 0.0) throw ConstraintError("gaussian_from_mean_kl: kappa = 0 forces mean = prior mean");
    return prior_std * prior_std;
  }
  const double gap = 2.0 * kappa - delta * delta;
  if (!(gap > 0.0)) {
    throw ConstraintError("gaussian_from_mean_kl: |mean - prior mean| must be below prior_std * sqrt(2 kappa)");
  }
  const double s = variance_ratio_from_gap(gap);
  if (!(s > 0.0)) throw ConstraintError("gaussian_from_mean_kl: kappa too large for double precision");
  return prior_std * prior_std * s;
}

GaussianParams gaussian_unconstrained(double prior_mean, double prior_std, double alpha,
                                      double beta) {
  if (!(prior_std > 0.0)) throw ConstraintError("gaussian_unconstrained: prior std must be > 0");
  const double kappa = std::exp(alpha);
  const double mean = prior_mean + prior_std * std::sqrt(2.0 * kappa) * std::tanh(beta);
  // 2 kappa - Delta^2 = 2 kappa sech^2(beta) stays positive even where tanh
  // rounds to 1.
  const double sech = 1.0 / std::cosh(beta);
  const double gap = 2.0 * kappa * sech * sech;
  if (!(gap > 0.0)) throw ConstraintError("gaussian_unconstrained: |beta| too large");
  return {mean, prior_std * prior_std * variance_ratio_from_gap(gap)};
}

double max_kl_for_dinf(double dinf) {
  if (!(dinf >= 0.0)) throw DomainError("max_kl_for_dinf: dinf must be >= 0");
  // Zero-mean target with sigma = exp(-dinf).
  return 0.5 * (std::expm1(-2.0 * dinf) + 2.0 * dinf);
}

GaussianParams gaussian_from_kl_dinf(double kl, double dinf) {
  if (!(kl >= 0.0) || !(dinf >= kl) || !std::isfinite(dinf)) {
    throw InfeasibleError("gaussian_from_kl_dinf: need 0 <= kl <= dinf < inf");
  }
  if (dinf == 0.0) return {0.0, 1.0};
  const double a = 2.0 * dinf - 2.0 * kl - 1.0;
  const double b = 2.0 * dinf - 1.0;
  const double x = a * std::exp(b);
  // 1 + e x = -expm1(2R) + (2R - 2K) e^{2R}.
  const double e2r = std::exp(2.0 * dinf);
  const double t = -std::expm1(2.0 * dinf) + (2.0 * dinf - 2.0 * kl) * e2r;
  if (t < -1e-12 * e2r) {
    throw InfeasibleError("gaussian_from_kl_dinf: kl too large for this dinf");
  }
  const double w = w0_with_offset(x, std::max(t, 0.0));
  const double log_var = w - b;
  const double var_minus_one = std::expm1(log_var);
  double mean_sq = 2.0 * kl - (var_minus_one - log_var);
  if (mean_sq < 0.0) {
    if (mean_sq < -1e-12) {
      throw InfeasibleError("gaussian_from_kl_dinf: no Gaussian attains this (kl, dinf)");
    }
    mean_sq = 0.0;
  }
  // W0 lands on the trivial root sigma^2 = 1 when no Gaussian has this pair.
  if (!(log_var < 0.0)) {
    throw InfeasibleError("gaussian_from_kl_dinf: no Gaussian attains this (kl, dinf)");
  }
  return {std::sqrt(mean_sq), std::exp(log_var)};
}

Uniform uniform_from_mean_kl(double prior_center, double prior_width, double kappa, double beta) {
  if (!(prior_width > 0.0)) throw ConstraintError("uniform_from_mean_kl: prior width must be > 0");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw ConstraintError("uniform_from_mean_kl: kappa must be finite and >= 0");
  }
  const double width = prior_width * std::exp(-kappa);
  double center = prior_center + 0.5 * (prior_width - width) * std::tanh(beta);
  // Keep the support inside the prior despite rounding.
  const double lo = prior_center - 0.5 * prior_width;
  const double hi = prior_center + 0.5 * prior_width;
  while (center - 0.5 * width < lo) center = std::nextafter(center, kInf);
  while (center + 0.5 * width > hi) center = std::nextafter(center, -kInf);
  return {center, width};
}

void IsoKLGaussianBlock::validate() const {
  if (prior_std.size() != prior_mean.size() || target_mean.size() != prior_mean.size()) {
    throw ConstraintError("isokl block: coordinate vectors differ in length");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    gaussian_from_mean_kl(prior_mean[i], prior_std[i], target_mean[i], kappa);
  }
}

std::vector<double> IsoKLGaussianBlock::target_variance() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    out[i] = gaussian_from_mean_kl(prior_mean[i], prior_std[i], target_mean[i], kappa);
  }
  return out;
}

PairSpec IsoKLGaussianBlock::pair(std::size_t i) const {
  const double var = gaussian_from_mean_kl(prior_mean[i], prior_std[i], target_mean[i], kappa);
  return PairSpec(Gaussian{target_mean[i], var},
                  Gaussian{prior_mean[i], prior_std[i] * prior_std[i]});
}

unsigned block_budget(double kappa, unsigned extra_bits) {
  if (!(kappa >= 0.0)) throw ConstraintError("block_budget: kappa must be >= 0");
  const double bits = std::ceil(kappa / std::numbers::ln2);
  const double budget = bits + extra_bits;
  if (budget < 1.0 || budget > kMaxBudget) {
    throw ConstraintError("block_budget: budget must lie in [1, " + std::to_string(kMaxBudget) +
                          "]");
  }
  return static_cast<unsigned>(budget);
}

BlockEncodeResult encode_block_vector(const std::vector<IsoKLGaussianBlock>& blocks,
                                      const BlockCodecConfig& config, std::uint64_t seed) {
  Message message;
  message.mode = FrameMode::kBlockTied;
  message.variant = CoderVariant::kDAD;
  BlockEncodeResult result;
  std::uint64_t coordinate = 0;
  for (const auto& block : blocks) {
    block.validate();
    CodeBlock framed;
    framed.budget = block_budget(block.kappa, config.extra_bits);
    std::vector<double> samples;
    samples.reserve(block.size());
    for (std::size_t i = 0; i < block.size(); ++i, ++coordinate) {
      const EncodeResult enc = encode_dad(block.pair(i), derive_seed(seed, coordinate), framed.budget);
      framed.codewords.push_back(enc.code.payload);
      samples.push_back(enc.sample);
      result.total_steps += enc.stats.steps;
    }
    message.blocks.push_back(std::move(framed));
    result.samples.push_back(std::move(samples));
  }
  BitWriter out;
  write_message(out, message);
  result.message_bits = out.bit_count();
  result.message = out.bytes();
  return result;
}

std::vector<std::vector<double>> decode_block_vector(const std::vector<GaussianPriorBlock>& priors,
                                                     std::span<const std::uint8_t> bytes,
                                                     std::uint64_t seed) {
  const Message message = deserialize_message(bytes);
  if (message.mode != FrameMode::kBlockTied || message.variant != CoderVariant::kDAD) {
    throw MalformedMessageError("decode_block_vector: expected a block-tied DAD message");
  }
  if (message.blocks.size() != priors.size()) {
    throw MalformedMessageError("decode_block_vector: block count does not match the priors");
  }
  std::vector<std::vector<double>> out;
  std::uint64_t coordinate = 0;
  for (std::size_t b = 0; b < priors.size(); ++b) {
    const auto& prior = priors[b];
    const auto& block = message.blocks[b];
    if (block.codewords.size() != prior.prior_mean.size() ||
        prior.prior_std.size() != prior.prior_mean.size()) {
      throw MalformedMessageError("decode_block_vector: block size does not match the priors");
    }
    std::vector<double> samples;
    samples.reserve(block.codewords.size());
    for (std::size_t i = 0; i < block.codewords.size(); ++i, ++coordinate) {
      const Distribution1D proposal(
          Gaussian{prior.prior_mean[i], prior.prior_std[i] * prior.prior_std[i]});
      const Code code{CoderVariant::kDAD, block.budget, block.codewords[i]};
      samples.push_back(decode_dad(proposal, code, derive_seed(seed, coordinate)));
    }
    out.push_back(std::move(samples));
  }
  return out;
}

}  // namespace astarcode
