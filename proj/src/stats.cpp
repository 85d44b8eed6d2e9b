#include "hitstat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hitstat/error.hpp"

namespace hitstat {

KsResult ks_unit_exponential(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "KS statistic needs at least one sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  std::size_t finite = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (std::isinf(sorted[i])) break;
    const double cdf = -std::expm1(-std::max(sorted[i], 0.0));
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
    finite = i + 1;
  }
  // Censored mass sits beyond every finite sample; the reference CDF tends
  // to 1 while the empirical one stays at finite / n.
  d = std::max(d, 1.0 - static_cast<double>(finite) / n);
  return KsResult{std::clamp(d, 0.0, 1.0), sorted.size(), "exp(1)"};
}

double dkw_half_width(std::size_t sample_count, double alpha) {
  if (sample_count == 0 || !(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "DKW band needs N >= 1 and alpha in (0,1)");
  }
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(sample_count)));
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return std::nan("");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) {
    s.mean = s.stddev = s.median = s.q05 = s.q25 = s.q75 = s.q95 = std::nan("");
    return s;
  }
  std::sort(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  s.median = quantile_sorted(values, 0.5);
  s.q05 = quantile_sorted(values, 0.05);
  s.q25 = quantile_sorted(values, 0.25);
  s.q75 = quantile_sorted(values, 0.75);
  s.q95 = quantile_sorted(values, 0.95);
  return s;
}

}  // namespace hitstat
