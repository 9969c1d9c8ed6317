#pragma once

#include <limits>
#include <variant>
#include <vector>

#include "astarcode/errors.hpp"

namespace astarcode {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Open interval (low, high) of the extended real line.
struct Region {
  double low = -kInf;
  double high = kInf;

  static Region full() { return {}; }
  bool contains(double x) const { return low < x && x < high; }
  bool operator==(const Region&) const = default;
};

struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;
  double stddev() const;
};

struct Uniform {
  double center = 0.0;
  double width = 1.0;
  double low() const { return center - 0.5 * width; }
  double high() const { return center + 0.5 * width; }
};

struct MixtureComponent {
  double weight = 1.0;
  double low = 0.0;
  double high = 1.0;
};

/// Finite mixture of uniforms on pairwise-disjoint intervals. Components are
/// kept sorted by `low`.
struct UniformMixture {
  std::vector<MixtureComponent> components;
};

/// A one-dimensional continuous distribution. Parameters are validated on
/// construction; the object is immutable afterwards.
class Distribution1D {
 public:
  using Family = std::variant<Gaussian, Uniform, UniformMixture>;

  Distribution1D(Gaussian g);
  Distribution1D(Uniform u);
  Distribution1D(UniformMixture m);

  const Family& family() const { return family_; }
  bool is_gaussian() const { return std::holds_alternative<Gaussian>(family_); }
  bool is_uniform() const { return std::holds_alternative<Uniform>(family_); }
  bool is_mixture() const { return std::holds_alternative<UniformMixture>(family_); }
  const Gaussian& gaussian() const { return std::get<Gaussian>(family_); }
  const Uniform& uniform() const { return std::get<Uniform>(family_); }
  const UniformMixture& mixture() const { return std::get<UniformMixture>(family_); }

  double cdf(double x) const;
  /// 1 - cdf(x), computed without cancellation in the upper tail.
  double sf(double x) const;
  /// Requires u in (0,1); throws DomainError otherwise.
  double inv_cdf(double u) const;
  /// Inverse of sf: the x with sf(x) = p. Requires p in (0,1).
  double inv_sf(double p) const;
  double log_pdf(double x) const;
  double median() const;

  /// Closed support interval; (-inf, inf) for Gaussians.
  Region support() const;
  bool in_support(double x) const;

  /// P(region), computed in whichever tail keeps precision.
  double mass(const Region& region) const;

  /// Point of `region` with conditional CDF u, i.e. a draw from the
  /// distribution restricted to `region` when u is uniform. The result is
  /// clamped into the open region.
  double sample_restricted(const Region& region, double u) const;

  /// Splits `region` at the point leaving equal mass on both sides.
  double mass_median(const Region& region) const;

  bool operator==(const Distribution1D& other) const;

 private:
  Family family_;
};

double standard_normal_cdf(double z);
double standard_normal_sf(double z);
/// Inverse standard normal CDF; |cdf(result) - p| is at rounding level.
double standard_normal_quantile(double p);

/// Target/proposal pair with density-ratio utilities.
///
/// Supported shapes: Gaussian target with Gaussian proposal, and uniform or
/// uniform-mixture target with a uniform proposal whose support covers it.
class PairSpec {
 public:
  PairSpec(Distribution1D target, Distribution1D proposal);

  const Distribution1D& target() const { return target_; }
  const Distribution1D& proposal() const { return proposal_; }
  bool absolutely_continuous() const { return absolutely_continuous_; }

  /// log q(x) - log p(x); -inf where q vanishes inside the proposal support.
  double log_ratio(double x) const;
  /// Exact supremum of log_ratio over the open region.
  double bound_M(const Region& region) const;
  double ratio_mode() const;
  double analytic_kl() const;
  /// +inf when the ratio is unbounded.
  double analytic_dinf() const;

 private:
  enum class Shape { kGaussianGaussian, kPiecewiseUniform };

  double gaussian_log_ratio(double x) const;
  double piecewise_log_ratio(double x) const;

  Distribution1D target_;
  Distribution1D proposal_;
  Shape shape_;
  bool absolutely_continuous_ = true;
  // Piecewise-uniform targets: per-component log density ratio.
  std::vector<double> component_log_ratio_;
};

}  // namespace astarcode
