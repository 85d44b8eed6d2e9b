#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hitstat/exact.hpp"
#include "hitstat/measure_model.hpp"
#include "hitstat/orbit.hpp"
#include "hitstat/stats.hpp"

namespace hitstat {

/// Runs body(j) for j in [0, count) on `workers` threads. Work is split into
/// contiguous index blocks; callers write results by index, so the outcome
/// does not depend on the worker count. The first exception is rethrown.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

struct ExponentSample {
  std::uint64_t index = 0;
  Word target;  // A_n(z); the orbit's own prefix for recurrence samples
  TimeResult time;
  double log_value = 0.0;  // log tau or log W
  double exponent = 0.0;   // log_value / n
};

/// (1/n) log tau (or (1/n) log W) samples with the exact limit constant
/// attached. Censored samples are kept but excluded from the summary.
class ExponentSamples {
 public:
  ExponentSamples(std::size_t n, double target_constant) : n_(n), target_(target_constant) {}

  std::size_t n() const noexcept { return n_; }
  double target_constant() const noexcept { return target_; }
  const std::vector<ExponentSample>& samples() const noexcept { return samples_; }

  void add(ExponentSample sample);
  /// Disjoint index ranges of the same experiment; order does not matter.
  ExponentSamples merge(const ExponentSamples& other) const;

  std::size_t censored_count() const noexcept;
  double censored_fraction() const noexcept;
  /// Uncensored exponents in index order.
  std::vector<double> values() const;
  Summary summary() const;

  double fraction_below(double threshold) const;
  double fraction_above(double threshold) const;

 private:
  std::size_t n_;
  double target_;
  std::vector<ExponentSample> samples_;  // sorted by index
};

/// Censored fraction above which exponent experiments fail.
inline constexpr double kMaxCensoredFraction = 0.01;

struct SamplerOptions {
  CapPolicy cap{};
  unsigned workers = 1;
};

/// Independent (x, z) ~ mu x mu; records (1/n) log tau_{A_n(z)}(x).
ExponentSamples entrance_exponent_samples(const MeasureModel& model, std::size_t n, std::size_t count,
                                          std::uint64_t seed, const SamplerOptions& options = {});

/// Diagonal z = x; records (1/n) log tau_n(x).
ExponentSamples recurrence_exponent_samples(const MeasureModel& model, std::size_t n, std::size_t count,
                                            std::uint64_t seed, const SamplerOptions& options = {});

/// (1/n) log W_n^s(x, z) with target constant h - s R(s) (h when s = 0).
/// `diagonal` takes z = x.
ExponentSamples wns_exponent_samples(const MeasureModel& model, std::size_t n, double s, std::size_t count,
                                     std::uint64_t seed, const SamplerOptions& options = {}, bool diagonal = false);

struct EmpiricalSurvival {
  SurvivalCurve curve;
  KsResult ks;
  std::vector<double> rescaled;  // tau * mu(B), +inf when censored, sample order
  std::size_t censored = 0;
  double mean_time = 0.0;  // over uncensored draws
  double mean_time_stderr = 0.0;
};

/// Entrance times of independent stationary orbits into B, rescaled by
/// mu(B), on a t-grid, with the KS distance to exp(1).
EmpiricalSurvival empirical_survival(const MeasureModel& model, const Word& target, std::size_t count,
                                     std::span<const double> t_grid, std::uint64_t seed,
                                     const SamplerOptions& options = {});

/// Same with each orbit started inside B (prefix pinned, kernel continues).
EmpiricalSurvival empirical_return_survival(const MeasureModel& model, const Word& target, std::size_t count,
                                            std::span<const double> t_grid, std::uint64_t seed,
                                            const SamplerOptions& options = {});

/// Largest |empirical - exact| over the empirical curve's grid.
double max_curve_gap(const SurvivalCurve& empirical, const SurvivalCurve& exact);

struct SummabilityEstimate {
  std::size_t n = 0;
  double epsilon = 0.0;
  double estimate = 0.0;  // mean over z of F_z^n(e^{n epsilon})
  double standard_error = 0.0;
  bool exact_inner = true;  // every inner probability from the exact chain
  std::vector<double> inner;  // per outer sample
};

struct SummabilityOptions {
  unsigned workers = 1;
  /// Largest (steps x chain states) an exact inner evaluation may cost.
  double exact_budget = 5e8;
};

/// Monte Carlo over z of F_z^n(e^{n epsilon}) = P(tau_{A_n(z)} >= e^{n epsilon} / mu(A_n(z))).
/// The inner probability is exact when the product chain is affordable and
/// estimated from `inner_count` orbits otherwise.
SummabilityEstimate summability_integrand(const MeasureModel& model, std::size_t n, double epsilon, std::size_t outer_count,
                                    std::size_t inner_count, std::uint64_t seed, const SummabilityOptions& options = {});

/// A word of length n drawn from mu, from the target substream of sample 0.
/// Used to pin "a random word" in experiments by seed alone.
Word random_word(const MeasureModel& model, std::uint64_t seed, std::size_t length);

/// h - s R(s), or h when s = 0.
double wns_target_constant(const MeasureModel& model, double s);

}  // namespace hitstat
