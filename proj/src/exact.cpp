#include "hitstat/exact.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "hitstat/automaton.hpp"
#include "hitstat/error.hpp"

namespace hitstat {

std::string_view to_string(Conditioning c) noexcept {
  return c == Conditioning::Entrance ? "entrance" : "return";
}

std::string SurvivalCurve::to_csv(bool header) const {
  std::string out;
  if (header) out += "m,t,survival,kind,exactness\n";
  const std::string exactness = is_exact() ? "exact" : fmt::format("empirical:{}", *sample_count);
  for (std::size_t i = 0; i < survival.size(); ++i) {
    out += fmt::format("{},{:.17g},{:.17g},{},{}\n", m[i], t[i], survival[i], to_string(kind), exactness);
  }
  return out;
}

namespace {

// The model restricted to the symbols a chain needs. Finite models keep
// their alphabet; the countable model keeps the target's symbols plus one
// lumped symbol holding the rest of the mass.
struct LocalKernel {
  std::size_t k = 0;
  std::vector<double> stationary;
  std::vector<double> transition;  // k x k
  Word target;                     // in local symbols
};

LocalKernel localize(const MeasureModel& model, const Word& target) {
  LocalKernel local;
  if (model.is_finite()) {
    local.k = *model.alphabet_size();
    local.stationary = model.stationary();
    local.transition.resize(local.k * local.k);
    for (std::size_t a = 0; a < local.k; ++a) {
      for (std::size_t b = 0; b < local.k; ++b) {
        local.transition[a * local.k + b] = model.transition_prob(static_cast<Symbol>(a), static_cast<Symbol>(b));
      }
    }
    local.target = target;
    return local;
  }
  std::map<Symbol, Symbol> index;
  for (Symbol a : target) index.emplace(a, 0);
  Symbol next = 0;
  double used = 0.0;
  for (auto& [symbol, slot] : index) {
    slot = next++;
    double p = model.stationary_prob(symbol);
    local.stationary.push_back(p);
    used += p;
  }
  local.stationary.push_back(std::max(0.0, 1.0 - used));
  local.k = local.stationary.size();
  local.transition.resize(local.k * local.k);
  for (std::size_t a = 0; a < local.k; ++a) {
    std::copy(local.stationary.begin(), local.stationary.end(),
              local.transition.begin() + static_cast<std::ptrdiff_t>(a * local.k));
  }
  std::vector<Symbol> mapped;
  for (Symbol a : target) mapped.push_back(index.at(a));
  local.target = Word(std::move(mapped));
  return local;
}

}  // namespace

ProductChain ProductChain::build(const MeasureModel& model, const Word& target, Conditioning conditioning) {
  const auto mu = log_cylinder_measure(model, target);
  if (mu.is_zero()) throw Error(ErrorCode::ZeroMeasureTarget, "target " + target.to_string() + " has measure zero");

  const auto local = localize(model, target);
  const auto matcher = PatternAutomaton::single(local.target);
  const std::size_t n = target.size();
  const std::size_t k = local.k;

  ProductChain chain;
  chain.conditioning_ = conditioning;
  chain.target_length_ = n;
  chain.target_measure_ = mu.probability();
  chain.absorbing_ = static_cast<std::uint32_t>(n * k);

  // Transient state (q, a) -> index q * k + a for matcher depth q < n.
  chain.offsets_.reserve(n * k + 1);
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t a = 0; a < k; ++a) {
      chain.offsets_.push_back(chain.dest_.size());
      for (std::size_t b = 0; b < k; ++b) {
        double p = local.transition[a * k + b];
        if (p <= 0.0) continue;
        auto next = matcher.step(static_cast<PatternAutomaton::State>(q), static_cast<Symbol>(b));
        chain.dest_.push_back(matcher.is_match(next) ? chain.absorbing_ : static_cast<std::uint32_t>(next * k + b));
        chain.prob_.push_back(p);
      }
    }
  }
  chain.offsets_.push_back(chain.dest_.size());

  chain.initial_.assign(n * k, 0.0);
  if (conditioning == Conditioning::Entrance) {
    // x_0 ~ stationary law seeds the kernel and is not matched.
    for (std::size_t a = 0; a < k; ++a) chain.initial_[a] = local.stationary[a];
    chain.warmup_ = n - 1;
  } else {
    chain.initial_[matcher.resume_after_match() * k + local.target.back()] = 1.0;
    chain.warmup_ = 0;
  }
  return chain;
}

double ProductChain::step(std::span<const double> in, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  double absorbed = 0.0;
  const std::size_t states = transient_count();
  for (std::size_t i = 0; i < states; ++i) {
    const double mass = in[i];
    if (mass == 0.0) continue;
    for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) {
      const double flow = mass * prob_[e];
      if (dest_[e] == absorbing_) {
        absorbed += flow;
      } else {
        out[dest_[e]] += flow;
      }
    }
  }
  return absorbed;
}

double ProductChain::max_row_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < transient_count(); ++i) {
    double sum = 0.0;
    for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) sum += prob_[e];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

SurvivalCurve exact_survival(const ProductChain& chain, std::uint64_t m_max) {
  if (m_max == 0) throw Error(ErrorCode::InvalidArgument, "m_max must be >= 1");
  std::vector<double> v = chain.initial();
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < chain.warmup(); ++i) {
    chain.step(v, w);
    v.swap(w);
  }

  SurvivalCurve curve;
  curve.kind = chain.conditioning();
  curve.target_measure = chain.target_measure();
  curve.m.reserve(m_max + 1);
  curve.t.reserve(m_max + 1);
  curve.survival.reserve(m_max + 1);
  auto record = [&](std::uint64_t m, double s) {
    curve.m.push_back(m);
    curve.t.push_back(static_cast<double>(m) * chain.target_measure());
    curve.survival.push_back(std::clamp(s, 0.0, 1.0));
  };
  record(0, 1.0);
  for (std::uint64_t m = 1; m <= m_max; ++m) {
    chain.step(v, w);
    v.swap(w);
    double alive = 0.0;
    for (double x : v) alive += x;
    // Rounding must not make the curve increase.
    record(m, std::min(alive, curve.survival.back()));
  }
  return curve;
}

double transient_spectral_radius(const ProductChain& chain) {
  const std::size_t states = chain.transient_count();
  std::vector<double> v(states, 1.0 / static_cast<double>(states));
  std::vector<double> w(states);
  std::vector<double> recent;
  double previous = -1.0;
  int stable = 0;
  for (std::size_t iter = 0; iter < 200'000; ++iter) {
    chain.step(v, w);
    double mass = 0.0;
    for (double x : w) mass += x;
    if (mass == 0.0) return 0.0;  // nilpotent block: absorbed in finitely many steps
    for (std::size_t i = 0; i < states; ++i) v[i] = w[i] / mass;
    if (std::abs(mass - previous) <= 1e-15 * mass) {
      if (++stable >= 8) {
        previous = mass;
        break;
      }
    } else {
      stable = 0;
    }
    previous = mass;
    recent.push_back(mass);
    if (recent.size() > 64) recent.erase(recent.begin());
  }
  double rho = stable >= 8 ? previous : *std::max_element(recent.begin(), recent.end());
  if (!(rho < 1.0)) throw Error(ErrorCode::TailNotContracting, "transient block has spectral radius >= 1");
  return rho;
}

namespace {

// Sum of P(tau > m) over m >= 0. Once the transient mass has settled on
// the quasi-stationary law, each step absorbs the same fraction h of what
// is alive, and the rest of the series is alive * (1 - h) / h. h is taken
// from the absorbed mass directly, so it keeps full precision when it is
// tiny. Summation also stops when the spectral-radius remainder bound is
// already negligible.
double sum_survival(const ProductChain& chain, double rel_tol) {
  const double rho = transient_spectral_radius(chain);
  std::vector<double> v = chain.initial();
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < chain.warmup(); ++i) {
    chain.step(v, w);
    v.swap(w);
  }
  double total = 1.0;  // m = 0
  double alive = 1.0;
  double hazard = -1.0;
  int settled = 0;
  constexpr std::uint64_t kMaxSteps = 2'000'000'000;
  for (std::uint64_t m = 1; m < kMaxSteps; ++m) {
    const double absorbed = chain.step(v, w);
    v.swap(w);
    double next_alive = 0.0;
    for (double x : v) next_alive += x;
    if (next_alive == 0.0) return total;
    const double h = absorbed / alive;
    alive = next_alive;
    total += alive;
    if (alive * rho / (1.0 - rho) <= 1e-3 * rel_tol * total) return total + alive * rho / (1.0 - rho);
    settled = std::abs(h - hazard) <= 1e-3 * rel_tol * h ? settled + 1 : 0;
    hazard = h;
    if (settled >= 16 && h > 0.0) return total + alive * (1.0 - h) / h;
  }
  throw Error(ErrorCode::TailNotContracting, "survival tail did not fall below tolerance");
}

}  // namespace

double exact_mean_return(const MeasureModel& model, const Word& target, double rel_tol) {
  if (!(rel_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "rel_tol must be > 0");
  return sum_survival(ProductChain::build(model, target, Conditioning::Return), rel_tol);
}

IntegralIdentityReport integral_identity_residual(const MeasureModel& model, const Word& target, std::uint64_t m_max) {
  if (m_max == 0) throw Error(ErrorCode::InvalidArgument, "m_max must be >= 1");
  const auto entrance_chain = ProductChain::build(model, target, Conditioning::Entrance);
  const auto return_chain = ProductChain::build(model, target, Conditioning::Return);
  const auto entrance = exact_survival(entrance_chain, m_max);
  const auto ret = exact_survival(return_chain, m_max);

  IntegralIdentityReport report;
  report.target_measure = entrance_chain.target_measure();
  report.mean_return = sum_survival(return_chain, 1e-14);
  // sum_{j >= k} P_B(tau >= j) = E_B[tau] - sum_{j=1}^{k-1} P_B(tau > j - 1).
  double head = 0.0;
  for (std::uint64_t k = 1; k <= m_max; ++k) {
    const double lhs = entrance.survival[k - 1];
    const double rhs = report.target_measure * (report.mean_return - head);
    report.entrance.push_back(lhs);
    report.integral.push_back(rhs);
    const double residual = std::abs(lhs - rhs);
    if (residual > report.max_residual) {
      report.max_residual = residual;
      report.worst_k = k;
    }
    head += ret.survival[k - 1];
  }
  return report;
}

std::vector<double> exact_survival_at(const ProductChain& chain, std::span<const std::uint64_t> steps) {
  std::vector<double> v = chain.initial();
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < chain.warmup(); ++i) {
    chain.step(v, w);
    v.swap(w);
  }
  std::vector<double> out;
  out.reserve(steps.size());
  std::uint64_t m = 0;
  double alive = 1.0;
  for (std::uint64_t target : steps) {
    if (target < m) throw Error(ErrorCode::InvalidArgument, "step counts must be non-decreasing");
    for (; m < target; ++m) {
      chain.step(v, w);
      v.swap(w);
      double a = 0.0;
      for (double x : v) a += x;
      alive = std::min(alive, a);
    }
    out.push_back(std::clamp(alive, 0.0, 1.0));
  }
  return out;
}

double rescaled_entrance_survival(const SurvivalCurve& curve, double t) {
  if (t <= 0.0) return 1.0;
  const double steps = std::ceil(t / curve.target_measure * (1.0 - 1e-12));
  const auto m = static_cast<std::uint64_t>(std::max(steps, 1.0));
  if (m - 1 >= curve.survival.size()) {
    throw Error(ErrorCode::InvalidArgument, "survival curve too short for t = " + fmt::format("{}", t));
  }
  return curve.survival[m - 1];
}

AbadiReport abadi_shape_check(const MeasureModel& model, const Word& target, std::span<const double> t_grid) {
  if (t_grid.size() < 2) throw Error(ErrorCode::GridTooCoarse, "need at least two grid points");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i && !(t_grid[i] > t_grid[i - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "t-grid must be positive and increasing");
    }
  }
  const auto chain = ProductChain::build(model, target, Conditioning::Entrance);
  const double mu = chain.target_measure();
  // F_B(t) = P(tau > ceil(t / mu) - 1)
  std::vector<std::uint64_t> steps;
  for (double t : t_grid) {
    const double c = std::ceil(t / mu * (1.0 - 1e-12));
    steps.push_back(static_cast<std::uint64_t>(std::max(c, 1.0)) - 1);
  }
  const auto values = exact_survival_at(chain, steps);

  AbadiReport report;
  report.floor = static_cast<double>(target.size()) * mu + phi_bound(model, target.size()).value;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const double f = values[i];
    report.t.push_back(t);
    report.survival.push_back(f);
    if (f >= report.floor && f > 0.0) {
      const double y = std::log(f);
      sx += t;
      sy += y;
      sxx += t * t;
      sxy += t * y;
      ++report.fitted_points;
    }
  }
  if (report.fitted_points < 2) {
    throw Error(ErrorCode::GridTooCoarse, "fewer than two grid points above the additive floor");
  }
  const double count = static_cast<double>(report.fitted_points);
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  report.rate = -slope;
  report.intercept = (sy - slope * sx) / count;
  report.bound_holds = true;
  for (std::size_t i = 0; i < report.t.size(); ++i) {
    if (report.survival[i] > std::exp(-report.rate * report.t[i]) + report.floor + 1e-12) report.bound_holds = false;
  }
  return report;
}

}  // namespace hitstat
