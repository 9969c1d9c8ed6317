#pragma once

#include <functional>
#include <span>
#include <vector>

namespace astarcode::stats {

double mean(std::span<const double> xs);
/// Standard error of the mean (sample stddev / sqrt(n)).
double standard_error(std::span<const double> xs);
/// Linear-interpolation quantile (R type 7) of unsorted data.
double quantile(std::span<const double> xs, double q);

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};
Quartiles quartiles(std::span<const double> xs);

/// Survival function of the Kolmogorov distribution.
double kolmogorov_sf(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample KS test against a continuous CDF (Stephens' small-sample
/// correction on the asymptotic law).
KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

double spearman(std::span<const double> x, std::span<const double> y);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace astarcode::stats
