#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hitstat/word.hpp"

namespace hitstat {

/// Natural-log probability; -inf stands for measure zero.
struct LogMeasure {
  double value = -std::numeric_limits<double>::infinity();

  bool is_zero() const noexcept { return std::isinf(value) && value < 0; }
  double probability() const noexcept { return std::exp(value); }
};

enum class ModelKind { Bernoulli, Markov, Geometric };

/// A stationary shift-invariant measure on sequences: i.i.d. (Bernoulli),
/// stationary first-order Markov, or the countable geometric-weight
/// Bernoulli shift p_j = (1-theta) theta^j, j = 0, 1, 2, ...
///
/// Instances are immutable once built; the factories validate.
class MeasureModel {
 public:
  static MeasureModel bernoulli(std::vector<double> p);
  /// `pi` is checked against the chain when given, computed otherwise.
  static MeasureModel markov(std::vector<std::vector<double>> transition,
                             std::optional<std::vector<double>> pi = std::nullopt);
  static MeasureModel geometric(double theta);

  /// Skips irreducibility/aperiodicity/stationarity checks. Only for driving
  /// the orbit engine with degenerate chains in tests.
  static MeasureModel markov_unchecked(std::vector<std::vector<double>> transition,
                                       std::vector<double> pi);

  ModelKind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ != ModelKind::Geometric; }
  /// Empty for the countable model.
  std::optional<std::size_t> alphabet_size() const noexcept;
  /// Independent symbols (Bernoulli or geometric).
  bool memoryless() const noexcept { return kind_ != ModelKind::Markov; }

  /// Stationary one-symbol law (finite models).
  const std::vector<double>& stationary() const noexcept { return stationary_; }
  /// Row-major k x k transition matrix (Markov only; empty otherwise).
  const std::vector<double>& transition() const noexcept { return transition_; }
  double theta() const noexcept { return theta_; }
  /// Sampling truncation level for the countable model: theta^L < 1e-15.
  std::size_t truncation() const noexcept { return truncation_; }

  double stationary_prob(Symbol a) const;
  double transition_prob(Symbol prev, Symbol next) const;
  double log_stationary(Symbol a) const;
  double log_transition(Symbol prev, Symbol next) const;

  /// Inverse-CDF samplers; `u` uniform in [0, 1).
  Symbol sample_stationary(double u) const;
  Symbol sample_next(Symbol prev, double u) const;

  void check_symbol(Symbol a) const;

  /// Canonical JSON rendering, used for fingerprints and report headers.
  std::string describe() const;

 private:
  MeasureModel() = default;
  void finish();

  ModelKind kind_ = ModelKind::Bernoulli;
  std::size_t k_ = 0;
  std::vector<double> stationary_;
  std::vector<double> transition_;
  std::vector<double> log_stationary_;
  std::vector<double> log_transition_;
  std::vector<double> stationary_cdf_;
  std::vector<double> transition_cdf_;
  double theta_ = 0.0;
  double log_theta_ = 0.0;
  double log_one_minus_theta_ = 0.0;
  std::size_t truncation_ = 0;

  friend void validate(const MeasureModel&);
};

/// Raises NonStochasticRow, ReducibleChain, PeriodicChain, ZeroMassSymbol or
/// BadThetaRange when an invariant fails.
void validate(const MeasureModel& model);

/// Stationary vector of a stochastic matrix by lazy power iteration
/// (pi <- (pi + pi P) / 2), tolerance 1e-12 in L1, at most 1e6 rounds.
std::vector<double> stationary_vector(const std::vector<double>& transition, std::size_t k);

LogMeasure log_cylinder_measure(const MeasureModel& model, const Word& w);

/// Metric entropy in nats.
double shannon_entropy(const MeasureModel& model);

struct RenyiOptions {
  double rel_tol = 1e-12;
  std::size_t max_iterations = 1'000'000;
};

/// R(s) = -(1/s) log of the growth rate of sum_w mu(w)^{1+s}. For Markov
/// models the rate is the Perron root of the entrywise power P_ij^{1+s}.
double renyi_entropy(const MeasureModel& model, double s, const RenyiOptions& options = {});

struct PartitionSumOptions {
  /// Largest k^n the enumeration path will walk.
  std::uint64_t max_cylinders = 100'000'000;
};

/// log Z_n(s) = log sum over positive-measure n-cylinders of mu^{1+s}.
/// Bernoulli: exhaustive enumeration. Markov: transfer-matrix product.
/// Geometric: product form n log sum_j p_j^{1+s}.
double partition_sum_exact(const MeasureModel& model, std::size_t n, double s,
                           const PartitionSumOptions& options = {});

struct PhiBound {
  double value = 0.0;     // bound on phi(gap)
  double rho = 0.0;       // Dobrushin coefficient 1 - sum_j min_i P_ij
  double constant = 0.0;  // max_j 1 / pi_j
  bool degenerate = false;  // rho == 1, bound carries no information
};

/// Geometric upper bound C rho^gap on the phi-mixing coefficient. A bound
/// with rho < 1 certifies that phi is summable.
PhiBound phi_bound(const MeasureModel& model, std::size_t gap);

struct TailDecay {
  bool trivially_satisfied = false;  // finite alphabet
  std::optional<double> delta;       // decay ratio for the countable model
  double tail_mass = 0.0;            // mu(symbols with 1-based index >= j)
};

TailDecay tail_decay(const MeasureModel& model, std::size_t j = 1);

/// Law of the next symbol: stationary when `prev` is empty, conditional
/// otherwise. The countable model reports its ratio instead of a vector.
struct SymbolLaw {
  std::vector<double> probabilities;
  std::optional<double> geometric_ratio;
};

SymbolLaw next_symbol_distribution(const MeasureModel& model, std::optional<Symbol> prev = std::nullopt);

/// Fair coin, Bernoulli(0.7, 0.3) and Markov([[0.9,0.1],[0.2,0.8]]).
struct NamedModel {
  std::string name;
  MeasureModel model;
};
std::vector<NamedModel> builtin_models();

/// Geometric-weight Bernoulli shift with theta = 1/2, the countable-alphabet
/// instance of an exponentially decaying partition tail.
MeasureModel geometric_witness();

}  // namespace hitstat
