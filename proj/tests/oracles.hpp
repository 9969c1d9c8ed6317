// Independent numerical references for the unit tests. Nothing here calls the
// library's own numerics.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline double normal_pdf(double x, double mean = 0.0, double var = 1.0) {
  const double z = x - mean;
  return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Standard normal CDF by quadrature from -12.
inline double normal_cdf(double x) {
  if (x < -12.0) return 0.0;
  return simpson([](double t) { return normal_pdf(t); }, -12.0, x, 40000);
}

// Root of a monotone increasing f on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double normal_quantile(double p) {
  return bisect([p](double x) { return normal_cdf(x) - p; }, -12.0, 12.0, 80);
}

// W0 by bisection on w e^w = x over [-1, hi].
inline double lambert_w0(double x) {
  const double hi = std::max(1.0, std::log1p(std::max(x, 0.0)) + 1.0);
  return bisect([x](double w) { return w * std::exp(w) - x; }, -1.0, hi);
}

// max of f over [a, b] on a uniform grid.
inline double grid_max(const std::function<double(double)>& f, double a, double b,
                       int n = 200000) {
  double m = -INFINITY;
  for (int i = 0; i <= n; ++i) m = std::max(m, f(a + (b - a) * i / n));
  return m;
}

// Gaussian KL by quadrature of q log(q/p).
inline double gaussian_kl_numeric(double mu, double s2, double nu, double r2) {
  const double s = std::sqrt(s2);
  return simpson(
      [&](double x) {
        const double q = normal_pdf(x, mu, s2);
        if (q == 0.0) return 0.0;
        return q * (std::log(q) - std::log(normal_pdf(x, nu, r2)));
      },
      mu - 14.0 * s, mu + 14.0 * s, 40000);
}

// log(q/p) of two Gaussians straight from the densities.
inline double gaussian_log_ratio(double x, double mu, double s2, double nu, double r2) {
  return std::log(normal_pdf(x, mu, s2)) - std::log(normal_pdf(x, nu, r2));
}

}  // namespace oracle
