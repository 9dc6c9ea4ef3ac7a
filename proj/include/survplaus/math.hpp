#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace survplaus {

inline constexpr double kHalfLog2Pi = 0.91893853320467274178;  // log(2*pi)/2
inline constexpr double kSqrt2 = 1.4142135623730950488;

// Standard normal CDF via erfc; accurate in both tails.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

// log of the standard normal survival function, log(1 - Phi(z)).
// erfc covers |z| <= 36 without cancellation; beyond that the usual
// asymptotic expansion of Mills' ratio takes over (erfc underflows
// to subnormals near z ~ 37).
inline double normal_log_sf(double z) {
  if (z > 36.0) {
    const double z2 = z * z;
    const double series = -1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return -0.5 * z2 - kHalfLog2Pi - std::log(z) + std::log1p(series);
  }
  if (z < -36.0) {
    // 1 - Phi(z) = 1 - eps; log(1 - eps) = -eps to double precision.
    return -0.5 * std::erfc(-z / kSqrt2);
  }
  return std::log(0.5 * std::erfc(z / kSqrt2));
}

// log Phi(z), by symmetry.
inline double normal_log_cdf(double z) { return normal_log_sf(-z); }

// Inverse standard normal CDF. Acklam's rational approximation polished
// with one Halley step, good to ~1e-15 over (0,1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::domain_error("normal_quantile: p outside [0,1]");
  }
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against the forward CDF; skipped in the far tails
  // where exp(x^2/2) overflows and the rational approximation is already
  // accurate relative to |x|.
  if (std::fabs(x) < 8.0) {
    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
  }
  return x;
}

// One-sample Kolmogorov-Smirnov distance of a sample against Unif(0,1).
inline double ks_distance_uniform(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("ks_distance_uniform: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(sample[i] - lo, hi - sample[i]));
  }
  return d;
}

// Asymptotic Kolmogorov distribution tail, P(D > d), with the usual
// small-sample correction factor.
inline double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double x = (sn + 0.12 + 0.11 / sn) * d;
  if (x < 1e-6) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace survplaus
