#include "hitstat/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "hitstat/error.hpp"

namespace hitstat {

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t j = 0; j < count; ++j) body(j);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t j = begin; j < end; ++j) body(j);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

void ExponentSamples::add(ExponentSample sample) {
  auto pos = std::lower_bound(samples_.begin(), samples_.end(), sample.index,
                              [](const ExponentSample& s, std::uint64_t idx) { return s.index < idx; });
  if (pos != samples_.end() && pos->index == sample.index) {
    throw Error(ErrorCode::InvalidArgument, "duplicate sample index " + std::to_string(sample.index));
  }
  samples_.insert(pos, std::move(sample));
}

ExponentSamples ExponentSamples::merge(const ExponentSamples& other) const {
  if (other.n_ != n_ || other.target_ != target_) {
    throw Error(ErrorCode::InvalidArgument, "cannot merge samples of different experiments");
  }
  ExponentSamples out(n_, target_);
  out.samples_.reserve(samples_.size() + other.samples_.size());
  std::merge(samples_.begin(), samples_.end(), other.samples_.begin(), other.samples_.end(),
             std::back_inserter(out.samples_),
             [](const ExponentSample& a, const ExponentSample& b) { return a.index < b.index; });
  auto dup = std::adjacent_find(out.samples_.begin(), out.samples_.end(),
                                [](const ExponentSample& a, const ExponentSample& b) { return a.index == b.index; });
  if (dup != out.samples_.end()) throw Error(ErrorCode::InvalidArgument, "overlapping sample ranges");
  return out;
}

std::size_t ExponentSamples::censored_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(samples_.begin(), samples_.end(), [](const ExponentSample& s) { return s.time.censored; }));
}

double ExponentSamples::censored_fraction() const noexcept {
  return samples_.empty() ? 0.0 : static_cast<double>(censored_count()) / static_cast<double>(samples_.size());
}

std::vector<double> ExponentSamples::values() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) {
    if (!s.time.censored) out.push_back(s.exponent);
  }
  return out;
}

Summary ExponentSamples::summary() const { return summarize(values()); }

double ExponentSamples::fraction_below(double threshold) const {
  auto v = values();
  if (v.empty()) return std::nan("");
  return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x < threshold; })) /
         static_cast<double>(v.size());
}

double ExponentSamples::fraction_above(double threshold) const {
  auto v = values();
  if (v.empty()) return std::nan("");
  return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x > threshold; })) /
         static_cast<double>(v.size());
}

namespace {

Word draw_word(const MeasureModel& model, std::uint64_t seed, std::uint64_t substream, std::size_t n) {
  OrbitStream z(model, seed, substream);
  return z.peek(n);
}

ExponentSamples collect(std::size_t n, double target, std::vector<ExponentSample> rows) {
  ExponentSamples out(n, target);
  for (auto& row : rows) out.add(std::move(row));
  if (out.censored_fraction() > kMaxCensoredFraction) {
    throw Error(ErrorCode::CensoringExceeded,
                std::to_string(out.censored_count()) + " of " + std::to_string(out.samples().size()) +
                    " samples censored; raise the cap");
  }
  return out;
}

void check_sampling_args(std::size_t n, std::size_t count) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "cylinder length must be >= 1");
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
}

}  // namespace

ExponentSamples entrance_exponent_samples(const MeasureModel& model, std::size_t n, std::size_t count,
                                          std::uint64_t seed, const SamplerOptions& options) {
  check_sampling_args(n, count);
  std::vector<ExponentSample> rows(count);
  parallel_for(count, options.workers, [&](std::size_t j) {
    auto& row = rows[j];
    row.index = j;
    row.target = draw_word(model, seed, substream_id(j, StreamRole::Target), n);
    OrbitStream x(model, seed, substream_id(j, StreamRole::Orbit));
    row.time = entrance_time(x, row.target, options.cap);
    row.log_value = std::log(static_cast<double>(row.time.value));
    row.exponent = row.log_value / static_cast<double>(n);
  });
  return collect(n, shannon_entropy(model), std::move(rows));
}

ExponentSamples recurrence_exponent_samples(const MeasureModel& model, std::size_t n, std::size_t count,
                                            std::uint64_t seed, const SamplerOptions& options) {
  check_sampling_args(n, count);
  std::vector<ExponentSample> rows(count);
  parallel_for(count, options.workers, [&](std::size_t j) {
    auto& row = rows[j];
    row.index = j;
    OrbitStream x(model, seed, substream_id(j, StreamRole::Orbit));
    row.target = x.peek(n);
    row.time = recurrence_time(x, n, options.cap);
    row.log_value = std::log(static_cast<double>(row.time.value));
    row.exponent = row.log_value / static_cast<double>(n);
  });
  return collect(n, shannon_entropy(model), std::move(rows));
}

Word random_word(const MeasureModel& model, std::uint64_t seed, std::size_t length) {
  if (length == 0) throw Error(ErrorCode::EmptyWord, "word length must be >= 1");
  return draw_word(model, seed, substream_id(0, StreamRole::Target), length);
}

double wns_target_constant(const MeasureModel& model, double s) {
  const double h = shannon_entropy(model);
  return s == 0.0 ? h : h - s * renyi_entropy(model, s);
}

ExponentSamples wns_exponent_samples(const MeasureModel& model, std::size_t n, double s, std::size_t count,
                                     std::uint64_t seed, const SamplerOptions& options, bool diagonal) {
  check_sampling_args(n, count);
  if (!(s >= 0.0)) throw Error(ErrorCode::InvalidArgument, "s must be >= 0");
  const double target = wns_target_constant(model, s);
  std::vector<ExponentSample> rows(count);
  parallel_for(count, options.workers, [&](std::size_t j) {
    auto& row = rows[j];
    row.index = j;
    OrbitStream x(model, seed, substream_id(j, StreamRole::Orbit));
    WSum w;
    if (diagonal) {
      row.target = x.peek(n);
      w = w_sum_recurrent(x, n, s, options.cap);
    } else {
      row.target = draw_word(model, seed, substream_id(j, StreamRole::Target), n);
      w = w_sum(x, row.target, s, options.cap);
    }
    row.time = w.time;
    row.log_value = w.log_w;
    row.exponent = w.log_w / static_cast<double>(n);
  });
  return collect(n, target, std::move(rows));
}

namespace {

EmpiricalSurvival survival_experiment(const MeasureModel& model, const Word& target, std::size_t count,
                                      std::span<const double> t_grid, std::uint64_t seed,
                                      const SamplerOptions& options, Conditioning kind) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  const auto log_mu = log_cylinder_measure(model, target);
  if (log_mu.is_zero()) throw Error(ErrorCode::ZeroMeasureTarget, "target " + target.to_string() + " has measure zero");
  const double mu = log_mu.probability();

  std::vector<TimeResult> times(count);
  parallel_for(count, options.workers, [&](std::size_t j) {
    const std::uint64_t stream = substream_id(j, StreamRole::Orbit);
    OrbitStream x = kind == Conditioning::Entrance ? OrbitStream(model, seed, stream)
                                                   : OrbitStream(model, seed, stream, target);
    times[j] = entrance_time(x, target, options.cap);
  });

  EmpiricalSurvival out;
  out.rescaled.reserve(count);
  double sum = 0.0, sum_sq = 0.0;
  std::size_t finite = 0;
  for (const auto& t : times) {
    if (t.censored) {
      ++out.censored;
      out.rescaled.push_back(std::numeric_limits<double>::infinity());
    } else {
      const double v = static_cast<double>(t.value);
      out.rescaled.push_back(v * mu);
      sum += v;
      sum_sq += v * v;
      ++finite;
    }
  }
  if (finite > 0) {
    out.mean_time = sum / static_cast<double>(finite);
    if (finite > 1) {
      const double var = (sum_sq - sum * out.mean_time) / static_cast<double>(finite - 1);
      out.mean_time_stderr = std::sqrt(std::max(var, 0.0) / static_cast<double>(finite));
    }
  }
  out.ks = ks_unit_exponential(out.rescaled);

  std::vector<double> sorted = out.rescaled;
  std::sort(sorted.begin(), sorted.end());
  out.curve.kind = kind;
  out.curve.sample_count = count;
  out.curve.target_measure = mu;
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "t-grid values must be >= 0");
    // P(tau mu > t) = P(tau > floor(t / mu)); compare in step units.
    const auto m = static_cast<std::uint64_t>(std::floor(t / mu * (1.0 + 1e-12)));
    const double boundary = static_cast<double>(m) * mu;
    auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), boundary * (1.0 + 1e-12));
    out.curve.m.push_back(m);
    out.curve.t.push_back(t);
    out.curve.survival.push_back(static_cast<double>(above) / static_cast<double>(count));
  }
  return out;
}

}  // namespace

EmpiricalSurvival empirical_survival(const MeasureModel& model, const Word& target, std::size_t count,
                                     std::span<const double> t_grid, std::uint64_t seed,
                                     const SamplerOptions& options) {
  return survival_experiment(model, target, count, t_grid, seed, options, Conditioning::Entrance);
}

EmpiricalSurvival empirical_return_survival(const MeasureModel& model, const Word& target, std::size_t count,
                                            std::span<const double> t_grid, std::uint64_t seed,
                                            const SamplerOptions& options) {
  if (target.empty()) throw Error(ErrorCode::EmptyWord, "return target must have length >= 1");
  return survival_experiment(model, target, count, t_grid, seed, options, Conditioning::Return);
}

double max_curve_gap(const SurvivalCurve& empirical, const SurvivalCurve& exact) {
  double gap = 0.0;
  for (std::size_t i = 0; i < empirical.m.size(); ++i) {
    const auto m = empirical.m[i];
    if (m >= exact.survival.size()) {
      throw Error(ErrorCode::InvalidArgument, "exact curve does not cover the empirical grid");
    }
    gap = std::max(gap, std::abs(empirical.survival[i] - exact.survival[m]));
  }
  return gap;
}

SummabilityEstimate summability_integrand(const MeasureModel& model, std::size_t n, double epsilon, std::size_t outer_count,
                                    std::size_t inner_count, std::uint64_t seed, const SummabilityOptions& options) {
  check_sampling_args(n, outer_count);
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
  const double threshold = std::exp(static_cast<double>(n) * epsilon);

  SummabilityEstimate out;
  out.n = n;
  out.epsilon = epsilon;
  out.inner.assign(outer_count, 0.0);
  std::vector<char> exact(outer_count, 1);
  parallel_for(outer_count, options.workers, [&](std::size_t j) {
    const Word z = draw_word(model, seed, substream_id(j, StreamRole::Target), n);
    const double mu = log_cylinder_measure(model, z).probability();
    // P(tau >= m) with m = ceil(threshold / mu) = P(tau > m - 1).
    const auto m = static_cast<std::uint64_t>(std::ceil(threshold / mu * (1.0 - 1e-12)));
    const double states = static_cast<double>((n + 1) * model.alphabet_size().value_or(n + 1));
    if (static_cast<double>(m) * states <= options.exact_budget) {
      if (m <= 1) {
        out.inner[j] = 1.0;
        return;
      }
      const auto chain = ProductChain::build(model, z, Conditioning::Entrance);
      const std::uint64_t at = m - 1;
      out.inner[j] = exact_survival_at(chain, std::span<const std::uint64_t>(&at, 1)).front();
      return;
    }
    if (inner_count == 0) throw Error(ErrorCode::BudgetExceeded, "exact inner too costly and no inner samples requested");
    exact[j] = 0;
    std::size_t survived = 0;
    for (std::size_t i = 0; i < inner_count; ++i) {
      OrbitStream x(model, seed, substream_id(j * inner_count + i, StreamRole::Inner));
      // Censoring at m - 1 still answers "tau >= m".
      const auto t = entrance_time(x, z, CapPolicy(std::max<std::uint64_t>(m - 1, 1)));
      if (t.censored || t.value >= m) ++survived;
    }
    out.inner[j] = static_cast<double>(survived) / static_cast<double>(inner_count);
  });

  const auto s = summarize(out.inner);
  out.estimate = s.mean;
  out.standard_error = s.stddev / std::sqrt(static_cast<double>(outer_count));
  out.exact_inner = std::all_of(exact.begin(), exact.end(), [](char c) { return c != 0; });
  return out;
}

}  // namespace hitstat
