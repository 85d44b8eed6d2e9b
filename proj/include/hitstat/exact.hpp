#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hitstat/measure_model.hpp"
#include "hitstat/word.hpp"

namespace hitstat {

enum class Conditioning { Entrance, Return };

std::string_view to_string(Conditioning c) noexcept;

/// Survival function of the rescaled time tau * mu(B): each row holds a step
/// count m, the rescaled time t, and P(tau > m) (= P(tau * mu > t)).
///
/// Exact curves have t = m * mu(B). Empirical curves are evaluated on a
/// requested t-grid with m = floor(t / mu(B)).
struct SurvivalCurve {
  Conditioning kind = Conditioning::Entrance;
  std::optional<std::size_t> sample_count;  // empty for exact curves
  double target_measure = 0.0;
  std::vector<std::uint64_t> m;
  std::vector<double> t;
  std::vector<double> survival;

  bool is_exact() const noexcept { return !sample_count.has_value(); }

  /// CSV with columns m,t,survival,kind,exactness.
  std::string to_csv(bool header = true) const;
};

/// Finite absorbing chain on (matcher state, last symbol) pairs. The target
/// is absorbing; one step reads one symbol of the orbit.
///
/// The countable model is lumped to the target's symbols plus one "other"
/// symbol, which is exact because no pattern uses the other symbols.
class ProductChain {
 public:
  static ProductChain build(const MeasureModel& model, const Word& target, Conditioning conditioning);

  Conditioning conditioning() const noexcept { return conditioning_; }
  std::size_t target_length() const noexcept { return target_length_; }
  double target_measure() const noexcept { return target_measure_; }

  /// Transient states plus the single absorbing state.
  std::size_t state_count() const noexcept { return offsets_.size(); }
  std::size_t transient_count() const noexcept { return offsets_.size() - 1; }

  /// Symbols read before tau can first be observed (n - 1 for the
  /// entrance law, where x_0 only seeds the kernel; 0 for the return law).
  std::size_t warmup() const noexcept { return warmup_; }

  const std::vector<double>& initial() const noexcept { return initial_; }

  /// out = in * Q over transient states; returns the mass absorbed.
  double step(std::span<const double> in, std::span<double> out) const;

  /// Largest |row sum - 1| including the absorbing mass; the absorbing
  /// state's self-loop is implicit.
  double max_row_defect() const;

 private:
  Conditioning conditioning_ = Conditioning::Entrance;
  std::size_t target_length_ = 0;
  double target_measure_ = 0.0;
  std::size_t warmup_ = 0;
  std::vector<double> initial_;
  // CSR rows for transient states; the last offset closes the final row and
  // stands in for the absorbing state.
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> dest_;
  std::vector<double> prob_;
  std::uint32_t absorbing_ = 0;
};

/// P(tau > m) for m = 0..m_max.
SurvivalCurve exact_survival(const ProductChain& chain, std::uint64_t m_max);

/// P(tau > m) at the given non-decreasing step counts only; memory does
/// not grow with the largest m.
std::vector<double> exact_survival_at(const ProductChain& chain, std::span<const std::uint64_t> steps);

/// Spectral radius of the transient block by power iteration from the
/// uniform vector. Raises TailNotContracting when it is not below 1.
double transient_spectral_radius(const ProductChain& chain);

/// E_B[tau_B] = sum_{m >= 0} P_B(tau_B > m), truncated once the geometric
/// remainder bound drops below rel_tol of the partial sum.
double exact_mean_return(const MeasureModel& model, const Word& target, double rel_tol = 1e-12);

struct IntegralIdentityReport {
  double max_residual = 0.0;
  std::uint64_t worst_k = 0;
  double target_measure = 0.0;
  double mean_return = 0.0;
  std::vector<double> entrance;  // P(tau >= k), k = 1..m_max
  std::vector<double> integral;  // mu(B) * sum_{j >= k} P_B(tau >= j)
};

/// Discrete entrance/return identity
///   P(tau_B >= k) = mu(B) * sum_{j >= k} P_B(tau_B >= j),   k >= 1,
/// checked for k = 1..m_max.
IntegralIdentityReport integral_identity_residual(const MeasureModel& model, const Word& target, std::uint64_t m_max);

struct AbadiReport {
  double rate = 0.0;       // fitted decay of log F_B(t) in rescaled time
  double intercept = 0.0;  // fitted log F_B at t = 0
  double floor = 0.0;      // n mu(B) + phi(n)
  bool bound_holds = false;  // F_B(t) <= exp(-rate t) + floor on the grid
  std::size_t fitted_points = 0;
  std::vector<double> t;
  std::vector<double> survival;  // F_B(t) = P(tau >= t / mu(B))
};

/// Shape check for the exponential-plus-floor bound on the rescaled
/// entrance law. Fits a line to log F_B(t) on grid points with
/// F_B(t) >= floor; needs two such points (else GridTooCoarse). No claim is
/// made about the constants of the bound itself.
AbadiReport abadi_shape_check(const MeasureModel& model, const Word& target, std::span<const double> t_grid);

/// F_B(t) = P(tau_B >= t / mu(B)) from an exact entrance curve long enough
/// to cover t.
double rescaled_entrance_survival(const SurvivalCurve& curve, double t);

}  // namespace hitstat
