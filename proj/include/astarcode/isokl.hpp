#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "astarcode/coders.hpp"
#include "astarcode/distributions.hpp"

namespace astarcode {

/// Principal branch of the Lambert W function on [-1/e, inf).
/// |w e^w - x| <= 1e-12 max(1, |x|). Throws DomainError below -1/e.
double lambert_w0(double x);

/// Target variance with KL(N(mu, s2) || N(nu, rho^2)) = kappa and s2 < rho^2.
/// Requires kappa >= 0 and |mu - nu| < rho sqrt(2 kappa) (mu = nu when
/// kappa = 0); ConstraintError otherwise.
double gaussian_from_mean_kl(double prior_mean, double prior_std, double mean, double kappa);

struct GaussianParams {
  double mean = 0.0;
  double variance = 1.0;
};

/// Unconstrained reparameterization: kappa = exp(alpha),
/// mu = nu + rho sqrt(2 kappa) tanh(beta), variance from the mean-KL map.
GaussianParams gaussian_unconstrained(double prior_mean, double prior_std, double alpha,
                                      double beta);

/// Target against the standard normal with KL = kl and D-infinity = dinf
/// (both nats). The mean is returned nonnegative; its sign is free.
/// InfeasibleError when no Gaussian attains the pair.
GaussianParams gaussian_from_kl_dinf(double kl, double dinf);

/// Largest KL attainable together with D-infinity `dinf` (zero-mean target).
double max_kl_for_dinf(double dinf);

/// Uniform target of width rho e^-kappa centred at
/// nu + (rho - width)/2 tanh(beta), inside Uniform(nu, rho).
Uniform uniform_from_mean_kl(double prior_center, double prior_width, double kappa, double beta);

/// Coordinates sharing one KL budget.
struct IsoKLGaussianBlock {
  std::vector<double> prior_mean;
  std::vector<double> prior_std;
  std::vector<double> target_mean;
  double kappa = 0.0;

  std::size_t size() const { return prior_mean.size(); }
  /// Throws ConstraintError on mismatched sizes or violated mean bounds.
  void validate() const;
  /// Derived target variances.
  std::vector<double> target_variance() const;
  PairSpec pair(std::size_t i) const;
};

struct BlockCodecConfig {
  unsigned extra_bits = 2;
};

/// D = ceil(kappa / ln 2) + extra_bits.
unsigned block_budget(double kappa, unsigned extra_bits);

struct BlockEncodeResult {
  std::vector<std::uint8_t> message;
  std::size_t message_bits = 0;
  std::vector<std::vector<double>> samples;  // per block, per coordinate
  std::uint64_t total_steps = 0;
};

/// DAD-codes every coordinate with its block's budget and frames the result
/// as one block-tied message. Coordinate g (counted across blocks) draws its
/// randomness from derive_seed(seed, g).
BlockEncodeResult encode_block_vector(const std::vector<IsoKLGaussianBlock>& blocks,
                                      const BlockCodecConfig& config, std::uint64_t seed);

/// Prior of one block as seen by the decoder.
struct GaussianPriorBlock {
  std::vector<double> prior_mean;
  std::vector<double> prior_std;
};

/// The budget of each block travels in the message header.
std::vector<std::vector<double>> decode_block_vector(const std::vector<GaussianPriorBlock>& priors,
                                                     std::span<const std::uint8_t> message,
                                                     std::uint64_t seed);

}  // namespace astarcode
