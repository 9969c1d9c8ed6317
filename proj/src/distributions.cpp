#include "astarcode/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace astarcode {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))

// Acklam's rational approximation of the normal quantile; relative error
// about 1e-9 before refinement.
double acklam_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - kLow) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double standard_normal_log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

void check_unit_open(double u, const char* what) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError(std::string(what) + ": argument must lie in (0,1), got " +
                      std::to_string(u));
  }
}

UniformMixture normalized(UniformMixture m) {
  if (m.components.empty()) throw DomainError("uniform mixture: no components");
  std::sort(m.components.begin(), m.components.end(),
            [](const auto& a, const auto& b) { return a.low < b.low; });
  double total = 0.0;
  for (std::size_t i = 0; i < m.components.size(); ++i) {
    const auto& c = m.components[i];
    if (!(c.weight > 0.0) || !std::isfinite(c.low) || !std::isfinite(c.high) ||
        !(c.low < c.high)) {
      throw DomainError("uniform mixture: component needs weight > 0 and low < high");
    }
    if (i > 0 && m.components[i - 1].high > c.low) {
      throw DomainError("uniform mixture: component intervals overlap");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("uniform mixture: weights must sum to 1");
  }
  return m;
}

// Mixture CDF at x.
double mixture_cdf(const UniformMixture& m, double x) {
  double acc = 0.0;
  for (const auto& c : m.components) {
    if (x >= c.high) {
      acc += c.weight;
    } else if (x > c.low) {
      acc += c.weight * (x - c.low) / (c.high - c.low);
      break;
    } else {
      break;
    }
  }
  return std::min(acc, 1.0);
}

double mixture_inv_cdf(const UniformMixture& m, double u) {
  double acc = 0.0;
  for (const auto& c : m.components) {
    if (u <= acc + c.weight) {
      const double frac = std::clamp((u - acc) / c.weight, 0.0, 1.0);
      return c.low + frac * (c.high - c.low);
    }
    acc += c.weight;
  }
  return m.components.back().high;
}

}  // namespace

double Gaussian::stddev() const { return std::sqrt(variance); }

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double standard_normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double standard_normal_quantile(double p) {
  check_unit_open(p, "standard_normal_quantile");
  // Work on the smaller tail so the Halley correction sees full precision.
  const bool upper = p > 0.5;
  const double tail = upper ? 1.0 - p : p;
  double z = acklam_quantile(tail);
  // One Halley step on tail(z) = cdf(z) - tail (z <= 0 here).
  const double err = standard_normal_cdf(z) - tail;
  const double step = err * std::exp(-standard_normal_log_pdf(z));
  z = z - step / (1.0 + 0.5 * z * step);
  return upper ? -z : z;
}

Distribution1D::Distribution1D(Gaussian g) : family_(g) {
  if (!std::isfinite(g.mean) || !(g.variance > 0.0) || !std::isfinite(g.variance)) {
    throw DomainError("gaussian: mean must be finite and variance > 0");
  }
}

Distribution1D::Distribution1D(Uniform u) : family_(u) {
  if (!std::isfinite(u.center) || !(u.width > 0.0) || !std::isfinite(u.width)) {
    throw DomainError("uniform: center must be finite and width > 0");
  }
}

Distribution1D::Distribution1D(UniformMixture m) : family_(normalized(std::move(m))) {}

double Distribution1D::cdf(double x) const {
  if (std::isnan(x)) throw DomainError("cdf: NaN argument");
  return std::visit(
      [x](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Gaussian>) {
          return standard_normal_cdf((x - f.mean) / f.stddev());
        } else if constexpr (std::is_same_v<F, Uniform>) {
          return std::clamp((x - f.low()) / f.width, 0.0, 1.0);
        } else {
          return mixture_cdf(f, x);
        }
      },
      family_);
}

double Distribution1D::sf(double x) const {
  if (const auto* g = std::get_if<Gaussian>(&family_)) {
    return standard_normal_sf((x - g->mean) / g->stddev());
  }
  if (const auto* u = std::get_if<Uniform>(&family_)) {
    return std::clamp((u->high() - x) / u->width, 0.0, 1.0);
  }
  return 1.0 - cdf(x);
}

double Distribution1D::inv_cdf(double u) const {
  check_unit_open(u, "inv_cdf");
  return std::visit(
      [u](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Gaussian>) {
          return f.mean + f.stddev() * standard_normal_quantile(u);
        } else if constexpr (std::is_same_v<F, Uniform>) {
          return f.low() + u * f.width;
        } else {
          return mixture_inv_cdf(f, u);
        }
      },
      family_);
}

double Distribution1D::inv_sf(double p) const {
  check_unit_open(p, "inv_sf");
  if (const auto* g = std::get_if<Gaussian>(&family_)) {
    return g->mean - g->stddev() * standard_normal_quantile(p);
  }
  if (const auto* u = std::get_if<Uniform>(&family_)) {
    return u->high() - p * u->width;
  }
  return inv_cdf(1.0 - p);
}

double Distribution1D::log_pdf(double x) const {
  return std::visit(
      [x](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Gaussian>) {
          const double s = f.stddev();
          return standard_normal_log_pdf((x - f.mean) / s) - std::log(s);
        } else if constexpr (std::is_same_v<F, Uniform>) {
          return (x >= f.low() && x <= f.high()) ? -std::log(f.width) : -kInf;
        } else {
          for (const auto& c : f.components) {
            if (x >= c.low && x <= c.high) return std::log(c.weight / (c.high - c.low));
          }
          return -kInf;
        }
      },
      family_);
}

double Distribution1D::median() const {
  if (const auto* g = std::get_if<Gaussian>(&family_)) return g->mean;
  if (const auto* u = std::get_if<Uniform>(&family_)) return u->center;
  return inv_cdf(0.5);
}

Region Distribution1D::support() const {
  if (is_gaussian()) return Region::full();
  if (const auto* u = std::get_if<Uniform>(&family_)) return {u->low(), u->high()};
  const auto& cs = mixture().components;
  return {cs.front().low, cs.back().high};
}

bool Distribution1D::in_support(double x) const {
  const Region s = support();
  return x >= s.low && x <= s.high;
}

double Distribution1D::mass(const Region& region) const {
  if (!(region.low < region.high)) return 0.0;
  // In the upper half the survival function keeps relative precision.
  if (region.low >= median()) return std::max(0.0, sf(region.low) - sf(region.high));
  return std::max(0.0, cdf(region.high) - cdf(region.low));
}

double Distribution1D::sample_restricted(const Region& region, double u) const {
  check_unit_open(u, "sample_restricted");
  double x;
  if (region.low >= median()) {
    const double a = sf(region.low);
    const double b = sf(region.high);
    if (!(a > b)) throw DegenerateRegionError("sample_restricted: zero-mass region");
    const double p = a - u * (a - b);
    x = (p > 0.0 && p < 1.0) ? inv_sf(p) : (p <= 0.0 ? region.high : region.low);
  } else {
    const double a = cdf(region.low);
    const double b = cdf(region.high);
    if (!(b > a)) throw DegenerateRegionError("sample_restricted: zero-mass region");
    const double p = a + u * (b - a);
    x = (p > 0.0 && p < 1.0) ? inv_cdf(p) : (p <= 0.0 ? region.low : region.high);
  }
  if (!(x > region.low)) x = std::nextafter(region.low, kInf);
  if (!(x < region.high)) x = std::nextafter(region.high, -kInf);
  if (!region.contains(x)) {
    throw DegenerateRegionError("sample_restricted: region holds no representable point");
  }
  return x;
}

double Distribution1D::mass_median(const Region& region) const {
  double x;
  if (region.low >= median()) {
    const double a = sf(region.low);
    const double b = sf(region.high);
    if (!(a > b)) throw DegenerateRegionError("mass_median: zero-mass region");
    x = inv_sf(0.5 * (a + b));
  } else {
    const double a = cdf(region.low);
    const double b = cdf(region.high);
    if (!(b > a)) throw DegenerateRegionError("mass_median: zero-mass region");
    x = inv_cdf(0.5 * (a + b));
  }
  if (!(x > region.low && x < region.high)) {
    throw DegenerateRegionError("mass_median: split point collapsed onto a region endpoint");
  }
  return x;
}

bool Distribution1D::operator==(const Distribution1D& other) const {
  if (family_.index() != other.family_.index()) return false;
  if (is_gaussian()) {
    return gaussian().mean == other.gaussian().mean &&
           gaussian().variance == other.gaussian().variance;
  }
  if (is_uniform()) {
    return uniform().center == other.uniform().center &&
           uniform().width == other.uniform().width;
  }
  const auto& a = mixture().components;
  const auto& b = other.mixture().components;
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].weight != b[i].weight || a[i].low != b[i].low || a[i].high != b[i].high) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// PairSpec

PairSpec::PairSpec(Distribution1D target, Distribution1D proposal)
    : target_(std::move(target)), proposal_(std::move(proposal)) {
  if (target_.is_gaussian() && proposal_.is_gaussian()) {
    shape_ = Shape::kGaussianGaussian;
    return;
  }
  if (!target_.is_gaussian() && proposal_.is_uniform()) {
    shape_ = Shape::kPiecewiseUniform;
    const Uniform& p = proposal_.uniform();
    const Region ps = proposal_.support();
    const Region qs = target_.support();
    absolutely_continuous_ = qs.low >= ps.low && qs.high <= ps.high;
    if (target_.is_mixture() && !absolutely_continuous_) {
      throw AbsoluteContinuityError("mixture target must lie inside the uniform proposal");
    }
    if (target_.is_uniform()) {
      component_log_ratio_.push_back(std::log(p.width / target_.uniform().width));
    } else {
      for (const auto& c : target_.mixture().components) {
        component_log_ratio_.push_back(std::log(c.weight * p.width / (c.high - c.low)));
      }
    }
    return;
  }
  throw UnsupportedPairError(
      "supported pairs: gaussian/gaussian and uniform-or-mixture/uniform");
}

double PairSpec::gaussian_log_ratio(double x) const {
  const Gaussian& q = target_.gaussian();
  const Gaussian& p = proposal_.gaussian();
  const double dq = x - q.mean;
  const double dp = x - p.mean;
  return 0.5 * std::log(p.variance / q.variance) - 0.5 * dq * dq / q.variance +
         0.5 * dp * dp / p.variance;
}

double PairSpec::piecewise_log_ratio(double x) const {
  if (target_.is_uniform()) {
    const Uniform& q = target_.uniform();
    return (x >= q.low() && x <= q.high()) ? component_log_ratio_[0] : -kInf;
  }
  const auto& cs = target_.mixture().components;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (x >= cs[i].low && x <= cs[i].high) return component_log_ratio_[i];
  }
  return -kInf;
}

double PairSpec::log_ratio(double x) const {
  if (!proposal_.in_support(x) || std::isnan(x)) {
    throw DomainError("log_ratio: point outside the proposal support");
  }
  if (shape_ == Shape::kGaussianGaussian) {
    if (target_ == proposal_) return 0.0;
    return gaussian_log_ratio(x);
  }
  return piecewise_log_ratio(x);
}

double PairSpec::bound_M(const Region& region) const {
  if (shape_ == Shape::kGaussianGaussian) {
    if (target_ == proposal_) return 0.0;
    const Gaussian& q = target_.gaussian();
    const Gaussian& p = proposal_.gaussian();
    // Endpoint limit of the quadratic log ratio; infinite endpoints give the
    // limit at infinity.
    auto at = [&](double x) {
      if (std::isinf(x)) {
        if (q.variance < p.variance) return -kInf;
        if (q.variance > p.variance) return kInf;
        const double slope = (q.mean - p.mean) / q.variance;
        if (slope == 0.0) return 0.5 * std::log(p.variance / q.variance);
        return (slope > 0.0) == (x > 0.0) ? kInf : -kInf;
      }
      return gaussian_log_ratio(x);
    };
    const double edge = std::max(at(region.low), at(region.high));
    if (q.variance < p.variance) {
      const double mode = ratio_mode();
      if (region.contains(mode)) return gaussian_log_ratio(mode);
    }
    // Concave with the mode outside, linear, or convex: the sup sits on an
    // endpoint.
    return edge;
  }
  const Region ps = proposal_.support();
  const double lo = std::max(region.low, ps.low);
  const double hi = std::min(region.high, ps.high);
  double best = -kInf;
  if (target_.is_uniform()) {
    const Uniform& q = target_.uniform();
    if (std::max(lo, q.low()) < std::min(hi, q.high())) best = component_log_ratio_[0];
    return best;
  }
  const auto& cs = target_.mixture().components;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (std::max(lo, cs[i].low) < std::min(hi, cs[i].high)) {
      best = std::max(best, component_log_ratio_[i]);
    }
  }
  return best;
}

double PairSpec::ratio_mode() const {
  if (target_ == proposal_) return proposal_.median();
  if (shape_ == Shape::kGaussianGaussian) {
    const Gaussian& q = target_.gaussian();
    const Gaussian& p = proposal_.gaussian();
    if (!(q.variance < p.variance)) {
      throw UnboundedRatioError("ratio_mode: target variance must be below proposal variance");
    }
    return (q.mean * p.variance - p.mean * q.variance) / (p.variance - q.variance);
  }
  if (target_.is_uniform()) return target_.uniform().center;
  const auto& cs = target_.mixture().components;
  std::size_t best = 0;
  for (std::size_t i = 1; i < cs.size(); ++i) {
    if (component_log_ratio_[i] > component_log_ratio_[best]) best = i;
  }
  return 0.5 * (cs[best].low + cs[best].high);
}

double PairSpec::analytic_kl() const {
  if (shape_ == Shape::kGaussianGaussian) {
    const Gaussian& q = target_.gaussian();
    const Gaussian& p = proposal_.gaussian();
    const double d = q.mean - p.mean;
    const double s2 = q.variance / p.variance;
    // log(rho/sigma) + (sigma^2 + d^2) / (2 rho^2) - 1/2, written to stay exact at Q = P.
    return 0.5 * ((s2 - 1.0 - std::log(s2)) + d * d / p.variance);
  }
  if (!absolutely_continuous_) {
    throw AbsoluteContinuityError("analytic_kl: target support exceeds proposal support");
  }
  if (target_.is_uniform()) return component_log_ratio_[0];
  double kl = 0.0;
  const auto& cs = target_.mixture().components;
  for (std::size_t i = 0; i < cs.size(); ++i) kl += cs[i].weight * component_log_ratio_[i];
  return kl;
}

double PairSpec::analytic_dinf() const {
  if (shape_ == Shape::kGaussianGaussian) {
    const Gaussian& q = target_.gaussian();
    const Gaussian& p = proposal_.gaussian();
    if (target_ == proposal_) return 0.0;
    if (!(q.variance < p.variance)) return kInf;
    // Standardize by the proposal: mu' = (mu - nu)/rho, s^2 = sigma^2/rho^2.
    const double m = (q.mean - p.mean) / p.stddev();
    const double s2 = q.variance / p.variance;
    return m * m / (2.0 * (1.0 - s2)) - 0.5 * std::log(s2);
  }
  if (!absolutely_continuous_) return kInf;
  return *std::max_element(component_log_ratio_.begin(), component_log_ratio_.end());
}

}  // namespace astarcode
