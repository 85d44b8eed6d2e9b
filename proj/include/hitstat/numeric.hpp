#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace hitstat {

/// Streaming log-sum-exp. Keeps sum exp(x_i) as exp(max) * scaled so that
/// sums of equal terms stay exact (e.g. adding log 1 = 0 repeatedly counts
/// integers without rounding).
class LogSumExp {
 public:
  void add(double log_term) noexcept {
    if (std::isinf(log_term) && log_term < 0) return;
    if (scaled_ == 0.0) {
      max_ = log_term;
      scaled_ = 1.0;
    } else if (log_term <= max_) {
      scaled_ += std::exp(log_term - max_);
    } else {
      scaled_ = scaled_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }

  void merge(const LogSumExp& other) noexcept {
    if (other.scaled_ == 0.0) return;
    if (scaled_ == 0.0) {
      *this = other;
    } else if (other.max_ <= max_) {
      scaled_ += other.scaled_ * std::exp(other.max_ - max_);
    } else {
      scaled_ = scaled_ * std::exp(max_ - other.max_) + other.scaled_;
      max_ = other.max_;
    }
  }

  bool empty() const noexcept { return scaled_ == 0.0; }
  double log() const noexcept {
    return empty() ? -std::numeric_limits<double>::infinity() : max_ + std::log(scaled_);
  }
  double value() const noexcept { return empty() ? 0.0 : scaled_ * std::exp(max_); }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_ = 0.0;
};

inline double log_sum_exp(std::span<const double> terms) noexcept {
  LogSumExp acc;
  for (double t : terms) acc.add(t);
  return acc.log();
}

}  // namespace hitstat
