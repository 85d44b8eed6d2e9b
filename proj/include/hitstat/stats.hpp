#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hitstat {

struct KsResult {
  double statistic = 0.0;
  std::size_t sample_count = 0;
  std::string reference = "exp(1)";
};

/// One-sample Kolmogorov-Smirnov distance between the empirical law of
/// `values` and the unit exponential. +inf entries (censored draws) count
/// toward the sample size but never enter the empirical CDF.
KsResult ks_unit_exponential(std::span<const double> values);

/// Half-width of the Dvoretzky-Kiefer-Wolfowitz band: with probability at
/// least 1 - alpha, sup |F_N - F| <= sqrt(log(2 / alpha) / (2N)).
double dkw_half_width(std::size_t sample_count, double alpha);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double median = 0.0;
  double q05 = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double q95 = 0.0;
};

/// Order statistics use linear interpolation between closest ranks.
Summary summarize(std::vector<double> values);

double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace hitstat
