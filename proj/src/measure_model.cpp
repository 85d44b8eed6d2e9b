#include "hitstat/measure_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "json.hpp"

#include "hitstat/error.hpp"
#include "hitstat/numeric.hpp"

namespace hitstat {
namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kStationaryTol = 1e-10;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

std::vector<double> cumulative(std::span<const double> probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
    if (probs[i] > 0.0) last_positive = i;
  }
  for (std::size_t i = last_positive; i < cdf.size(); ++i) cdf[i] = 1.0;
  return cdf;
}

Symbol invert_cdf(std::span<const double> cdf, double u) {
  if (cdf.size() <= 16) {
    for (std::size_t i = 0; i < cdf.size(); ++i) {
      if (u < cdf[i]) return static_cast<Symbol>(i);
    }
    return static_cast<Symbol>(cdf.size() - 1);
  }
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<Symbol>(it - cdf.begin());
}

// Strong connectivity and period of the support graph of P.
void check_graph(const std::vector<double>& P, std::size_t k) {
  auto reach = [&](bool forward) {
    std::vector<char> seen(k, 0);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
      auto u = q.front();
      q.pop();
      for (std::size_t v = 0; v < k; ++v) {
        double w = forward ? P[u * k + v] : P[v * k + u];
        if (w > 0.0 && !seen[v]) {
          seen[v] = 1;
          q.push(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  if (!reach(true) || !reach(false)) {
    throw Error(ErrorCode::ReducibleChain, "transition graph is not strongly connected");
  }

  std::vector<std::size_t> level(k, std::numeric_limits<std::size_t>::max());
  std::queue<std::size_t> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (std::size_t v = 0; v < k; ++v) {
      if (P[u * k + v] > 0.0 && level[v] == std::numeric_limits<std::size_t>::max()) {
        level[v] = level[u] + 1;
        q.push(v);
      }
    }
  }
  std::size_t period = 0;
  for (std::size_t u = 0; u < k; ++u) {
    for (std::size_t v = 0; v < k; ++v) {
      if (P[u * k + v] > 0.0) {
        auto a = static_cast<long long>(level[u]) + 1 - static_cast<long long>(level[v]);
        period = std::gcd(period, static_cast<std::size_t>(a < 0 ? -a : a));
      }
    }
  }
  if (period != 1) {
    throw Error(ErrorCode::PeriodicChain, "transition graph has period " + std::to_string(period));
  }
}

}  // namespace

std::vector<double> stationary_vector(const std::vector<double>& P, std::size_t k) {
  std::vector<double> pi(k, 1.0 / static_cast<double>(k));
  std::vector<double> next(k);
  double previous = INFINITY;
  for (std::size_t iter = 0; iter < 1'000'000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) next[j] += pi[i] * P[i * k + j];
    }
    double diff = 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      next[j] = 0.5 * (next[j] + pi[j]);
      diff += std::abs(next[j] - pi[j]);
      total += next[j];
    }
    for (auto& x : next) x /= total;
    pi.swap(next);
    // Past the 1e-12 convergence test, keep polishing while the update
    // still shrinks so pi is accurate to rounding.
    if (diff < 1e-12 && (diff == 0.0 || diff >= previous)) return pi;
    previous = diff;
  }
  throw Error(ErrorCode::PowerIterationNoConvergence, "stationary vector did not converge");
}

MeasureModel MeasureModel::bernoulli(std::vector<double> p) {
  MeasureModel m;
  m.kind_ = ModelKind::Bernoulli;
  m.k_ = p.size();
  m.stationary_ = std::move(p);
  validate(m);
  m.finish();
  return m;
}

MeasureModel MeasureModel::markov(std::vector<std::vector<double>> transition,
                                  std::optional<std::vector<double>> pi) {
  MeasureModel m;
  m.kind_ = ModelKind::Markov;
  m.k_ = transition.size();
  for (const auto& row : transition) {
    if (row.size() != m.k_) throw Error(ErrorCode::InvalidSpec, "transition matrix is not square");
    m.transition_.insert(m.transition_.end(), row.begin(), row.end());
  }
  if (m.k_ == 0) throw Error(ErrorCode::InvalidSpec, "empty transition matrix");
  // Row sums and graph structure first; the stationary vector needs both.
  for (std::size_t i = 0; i < m.k_; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m.k_; ++j) {
      double w = m.transition_[i * m.k_ + j];
      if (!(w >= 0.0 && w <= 1.0)) {
        throw Error(ErrorCode::NonStochasticRow, "entry outside [0,1] in row " + std::to_string(i));
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > kStochasticTol) {
      throw Error(ErrorCode::NonStochasticRow, "row " + std::to_string(i) + " does not sum to 1");
    }
  }
  check_graph(m.transition_, m.k_);
  m.stationary_ = pi ? std::move(*pi) : stationary_vector(m.transition_, m.k_);
  validate(m);
  m.finish();
  return m;
}

MeasureModel MeasureModel::markov_unchecked(std::vector<std::vector<double>> transition,
                                            std::vector<double> pi) {
  MeasureModel m;
  m.kind_ = ModelKind::Markov;
  m.k_ = transition.size();
  for (const auto& row : transition) m.transition_.insert(m.transition_.end(), row.begin(), row.end());
  m.stationary_ = std::move(pi);
  m.finish();
  return m;
}

MeasureModel MeasureModel::geometric(double theta) {
  MeasureModel m;
  m.kind_ = ModelKind::Geometric;
  m.theta_ = theta;
  validate(m);
  m.finish();
  return m;
}

void MeasureModel::finish() {
  if (kind_ == ModelKind::Geometric) {
    log_theta_ = std::log(theta_);
    log_one_minus_theta_ = std::log1p(-theta_);
    truncation_ = static_cast<std::size_t>(std::floor(std::log(1e-15) / log_theta_)) + 1;
    return;
  }
  log_stationary_.resize(k_);
  std::transform(stationary_.begin(), stationary_.end(), log_stationary_.begin(), safe_log);
  stationary_cdf_ = cumulative(stationary_);
  if (kind_ == ModelKind::Markov) {
    log_transition_.resize(transition_.size());
    std::transform(transition_.begin(), transition_.end(), log_transition_.begin(), safe_log);
    transition_cdf_.clear();
    for (std::size_t i = 0; i < k_; ++i) {
      auto row = cumulative(std::span<const double>(transition_).subspan(i * k_, k_));
      transition_cdf_.insert(transition_cdf_.end(), row.begin(), row.end());
    }
  }
}

void validate(const MeasureModel& m) {
  switch (m.kind_) {
    case ModelKind::Bernoulli: {
      if (m.stationary_.empty()) throw Error(ErrorCode::InvalidSpec, "empty probability vector");
      double sum = 0.0;
      for (std::size_t i = 0; i < m.stationary_.size(); ++i) {
        double p = m.stationary_[i];
        if (!(p >= 0.0 && p <= 1.0)) {
          throw Error(ErrorCode::NonStochasticRow, "probability outside [0,1] at symbol " + std::to_string(i));
        }
        if (p == 0.0) throw Error(ErrorCode::ZeroMassSymbol, "symbol " + std::to_string(i) + " has zero mass");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kStochasticTol) {
        throw Error(ErrorCode::NonStochasticRow, "probabilities do not sum to 1");
      }
      return;
    }
    case ModelKind::Markov: {
      const auto k = m.k_;
      if (k == 0 || m.transition_.size() != k * k) throw Error(ErrorCode::InvalidSpec, "bad transition matrix shape");
      for (std::size_t i = 0; i < k; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          double w = m.transition_[i * k + j];
          if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorCode::NonStochasticRow, "entry outside [0,1]");
          sum += w;
        }
        if (std::abs(sum - 1.0) > kStochasticTol) {
          throw Error(ErrorCode::NonStochasticRow, "row " + std::to_string(i) + " does not sum to 1");
        }
      }
      check_graph(m.transition_, k);
      if (m.stationary_.size() != k) throw Error(ErrorCode::InvalidSpec, "pi has wrong length");
      double total = 0.0;
      for (double p : m.stationary_) {
        if (!(p >= 0.0)) throw Error(ErrorCode::InvalidSpec, "negative entry in pi");
        total += p;
      }
      if (std::abs(total - 1.0) > kStationaryTol) throw Error(ErrorCode::InvalidSpec, "pi does not sum to 1");
      for (std::size_t j = 0; j < k; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) acc += m.stationary_[i] * m.transition_[i * k + j];
        if (std::abs(acc - m.stationary_[j]) > kStationaryTol) {
          throw Error(ErrorCode::InvalidSpec, "pi is not stationary for P");
        }
      }
      return;
    }
    case ModelKind::Geometric:
      if (!(m.theta_ > 0.0 && m.theta_ < 1.0)) throw Error(ErrorCode::BadThetaRange, "theta must lie in (0,1)");
      return;
  }
}

std::optional<std::size_t> MeasureModel::alphabet_size() const noexcept {
  if (kind_ == ModelKind::Geometric) return std::nullopt;
  return k_;
}

void MeasureModel::check_symbol(Symbol a) const {
  if (kind_ != ModelKind::Geometric && a >= k_) {
    throw Error(ErrorCode::InvalidSymbol, "symbol " + std::to_string(a) + " outside alphabet of size " + std::to_string(k_));
  }
}

double MeasureModel::stationary_prob(Symbol a) const {
  check_symbol(a);
  if (kind_ == ModelKind::Geometric) return std::exp(log_stationary(a));
  return stationary_[a];
}

double MeasureModel::log_stationary(Symbol a) const {
  check_symbol(a);
  if (kind_ == ModelKind::Geometric) return log_one_minus_theta_ + static_cast<double>(a) * log_theta_;
  return log_stationary_[a];
}

double MeasureModel::transition_prob(Symbol prev, Symbol next) const {
  if (kind_ != ModelKind::Markov) return stationary_prob(next);
  check_symbol(prev);
  check_symbol(next);
  return transition_[prev * k_ + next];
}

double MeasureModel::log_transition(Symbol prev, Symbol next) const {
  if (kind_ != ModelKind::Markov) return log_stationary(next);
  check_symbol(prev);
  check_symbol(next);
  return log_transition_[prev * k_ + next];
}

Symbol MeasureModel::sample_stationary(double u) const {
  if (kind_ == ModelKind::Geometric) {
    auto j = static_cast<std::size_t>(std::floor(std::log1p(-u) / log_theta_));
    return static_cast<Symbol>(std::min(j, truncation_ - 1));
  }
  return invert_cdf(stationary_cdf_, u);
}

Symbol MeasureModel::sample_next(Symbol prev, double u) const {
  if (kind_ != ModelKind::Markov) return sample_stationary(u);
  return invert_cdf(std::span<const double>(transition_cdf_).subspan(prev * k_, k_), u);
}

std::string MeasureModel::describe() const {
  nlohmann::json j;
  switch (kind_) {
    case ModelKind::Bernoulli:
      j["kind"] = "bernoulli";
      j["p"] = stationary_;
      break;
    case ModelKind::Markov: {
      j["kind"] = "markov";
      auto rows = nlohmann::json::array();
      for (std::size_t i = 0; i < k_; ++i) {
        rows.push_back(std::vector<double>(transition_.begin() + static_cast<std::ptrdiff_t>(i * k_),
                                           transition_.begin() + static_cast<std::ptrdiff_t>((i + 1) * k_)));
      }
      j["P"] = rows;
      j["pi"] = stationary_;
      break;
    }
    case ModelKind::Geometric:
      j["kind"] = "geometric";
      j["theta"] = theta_;
      break;
  }
  return j.dump();
}

LogMeasure log_cylinder_measure(const MeasureModel& model, const Word& w) {
  if (w.empty()) throw Error(ErrorCode::EmptyWord, "cylinder word must have length >= 1");
  double acc = model.log_stationary(w[0]);
  for (std::size_t i = 1; i < w.size(); ++i) acc += model.log_transition(w[i - 1], w[i]);
  return LogMeasure{acc};
}

double shannon_entropy(const MeasureModel& model) {
  auto plogp = [](double p) { return p > 0.0 ? -p * std::log(p) : 0.0; };
  switch (model.kind()) {
    case ModelKind::Bernoulli: {
      double h = 0.0;
      for (double p : model.stationary()) h += plogp(p);
      return h;
    }
    case ModelKind::Markov: {
      const auto k = *model.alphabet_size();
      double h = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < k; ++j) row += plogp(model.transition()[i * k + j]);
        h += model.stationary()[i] * row;
      }
      return h;
    }
    case ModelKind::Geometric: {
      double t = model.theta();
      return -std::log1p(-t) - (t / (1.0 - t)) * std::log(t);
    }
  }
  return 0.0;
}

namespace {

// log sum_j p_j^{1+s} for memoryless models.
double log_power_sum(const MeasureModel& model, double s) {
  if (model.kind() == ModelKind::Geometric) {
    double t = model.theta();
    return (1.0 + s) * std::log1p(-t) - std::log1p(-std::exp((1.0 + s) * std::log(t)));
  }
  LogSumExp acc;
  for (double p : model.stationary()) acc.add((1.0 + s) * std::log(p));
  return acc.log();
}

}  // namespace

double renyi_entropy(const MeasureModel& model, double s, const RenyiOptions& options) {
  if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveS, "Renyi parameter s must be > 0");
  if (model.memoryless()) return -log_power_sum(model, s) / s;

  const auto k = *model.alphabet_size();
  std::vector<double> Q(k * k);
  for (std::size_t i = 0; i < k * k; ++i) {
    double p = model.transition()[i];
    Q[i] = p > 0.0 ? std::exp((1.0 + s) * std::log(p)) : 0.0;
  }
  // Power iteration on the right Perron vector with Collatz-Wielandt
  // bracketing: min_i (Qv)_i / v_i <= lambda <= max_i (Qv)_i / v_i.
  std::vector<double> v(k, 1.0), w(k);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    for (std::size_t i = 0; i < k; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc += Q[i * k + j] * v[j];
      w[i] = acc;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i < k; ++i) {
      if (v[i] <= 0.0) {
        positive = false;
        break;
      }
      double r = w[i] / v[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    double scale = *std::max_element(w.begin(), w.end());
    if (!(scale > 0.0)) break;
    for (std::size_t i = 0; i < k; ++i) v[i] = w[i] / scale;
    if (positive && hi - lo <= options.rel_tol * hi) return -std::log(0.5 * (lo + hi)) / s;
  }
  throw Error(ErrorCode::PowerIterationNoConvergence, "Perron root of P^(1+s) did not converge");
}

double partition_sum_exact(const MeasureModel& model, std::size_t n, double s,
                           const PartitionSumOptions& options) {
  if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveS, "Renyi parameter s must be > 0");
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "cylinder length must be >= 1");
  const double e = 1.0 + s;

  switch (model.kind()) {
    case ModelKind::Geometric:
      return static_cast<double>(n) * log_power_sum(model, s);

    case ModelKind::Markov: {
      const auto k = *model.alphabet_size();
      std::vector<double> v(k), next(k);
      for (std::size_t a = 0; a < k; ++a) v[a] = e * model.log_stationary(static_cast<Symbol>(a));
      for (std::size_t step = 1; step < n; ++step) {
        for (std::size_t b = 0; b < k; ++b) {
          LogSumExp acc;
          for (std::size_t a = 0; a < k; ++a) {
            acc.add(v[a] + e * model.log_transition(static_cast<Symbol>(a), static_cast<Symbol>(b)));
          }
          next[b] = acc.log();
        }
        v.swap(next);
      }
      return log_sum_exp(v);
    }

    case ModelKind::Bernoulli: {
      const auto k = *model.alphabet_size();
      double count = std::pow(static_cast<double>(k), static_cast<double>(n));
      if (count > static_cast<double>(options.max_cylinders)) {
        throw Error(ErrorCode::BudgetExceeded, "k^n = " + std::to_string(count) + " cylinders exceeds enumeration budget");
      }
      std::vector<double> weight(k);
      for (std::size_t a = 0; a < k; ++a) weight[a] = e * model.log_stationary(static_cast<Symbol>(a));
      // Odometer over all k^n words; prefix[i] holds the log weight of the
      // first i digits.
      std::vector<std::size_t> digit(n, 0);
      std::vector<double> prefix(n + 1, 0.0);
      for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + weight[0];
      LogSumExp acc;
      while (true) {
        acc.add(prefix[n]);
        std::size_t pos = n;
        while (pos > 0 && digit[pos - 1] + 1 == k) --pos;
        if (pos == 0) break;
        ++digit[pos - 1];
        prefix[pos] = prefix[pos - 1] + weight[digit[pos - 1]];
        for (std::size_t i = pos; i < n; ++i) {
          digit[i] = 0;
          prefix[i + 1] = prefix[i] + weight[0];
        }
      }
      return acc.log();
    }
  }
  return 0.0;
}

PhiBound phi_bound(const MeasureModel& model, std::size_t gap) {
  if (model.memoryless()) return PhiBound{0.0, 0.0, 1.0, false};
  const auto k = *model.alphabet_size();
  double overlap = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double lowest = 1.0;
    for (std::size_t i = 0; i < k; ++i) lowest = std::min(lowest, model.transition()[i * k + j]);
    overlap += lowest;
  }
  PhiBound out;
  out.rho = std::clamp(1.0 - overlap, 0.0, 1.0);
  out.constant = 0.0;
  for (double p : model.stationary()) out.constant = std::max(out.constant, 1.0 / p);
  out.degenerate = out.rho >= 1.0;
  out.value = out.constant * std::pow(out.rho, static_cast<double>(gap));
  return out;
}

TailDecay tail_decay(const MeasureModel& model, std::size_t j) {
  if (j == 0) throw Error(ErrorCode::InvalidArgument, "tail index is 1-based");
  TailDecay out;
  if (model.is_finite()) {
    out.trivially_satisfied = true;
    const auto& pi = model.stationary();
    for (std::size_t i = j - 1; i < pi.size(); ++i) out.tail_mass += pi[i];
    return out;
  }
  out.delta = model.theta();
  out.tail_mass = std::pow(model.theta(), static_cast<double>(j - 1));
  return out;
}

SymbolLaw next_symbol_distribution(const MeasureModel& model, std::optional<Symbol> prev) {
  SymbolLaw law;
  if (prev) model.check_symbol(*prev);
  if (model.kind() == ModelKind::Geometric) {
    law.geometric_ratio = model.theta();
    return law;
  }
  if (model.kind() == ModelKind::Markov && prev) {
    const auto k = *model.alphabet_size();
    law.probabilities.assign(model.transition().begin() + static_cast<std::ptrdiff_t>(*prev * k),
                             model.transition().begin() + static_cast<std::ptrdiff_t>((*prev + 1) * k));
    return law;
  }
  law.probabilities = model.stationary();
  return law;
}

std::vector<NamedModel> builtin_models() {
  return {
      {"fair-coin", MeasureModel::bernoulli({0.5, 0.5})},
      {"biased-coin", MeasureModel::bernoulli({0.7, 0.3})},
      {"markov-2state", MeasureModel::markov({{0.9, 0.1}, {0.2, 0.8}})},
  };
}

MeasureModel geometric_witness() { return MeasureModel::geometric(0.5); }

}  // namespace hitstat
