#include "hitstat/orbit.hpp"

#include <cmath>
#include <stdexcept>

#include "hitstat/automaton.hpp"
#include "hitstat/error.hpp"
#include "hitstat/numeric.hpp"

namespace hitstat {
namespace {

// log mu of the most recent n-window, maintained incrementally.
class SlidingLogMeasure {
 public:
  SlidingLogMeasure(const MeasureModel& model, std::size_t n) : model_(model), n_(n), ring_(n + 1) {}

  void push(Symbol x) {
    ring_[pushed_ % ring_.size()] = x;
    ++pushed_;
    if (pushed_ < n_) return;
    if (pushed_ == n_) {
      value_ = recompute();
      return;
    }
    // Window slid from x_{i-1}..x_{j-1} to x_i..x_j.
    const Symbol dropped = at(pushed_ - n_ - 1);
    const Symbol first = at(pushed_ - n_);
    if (model_.memoryless()) {
      value_ += model_.log_stationary(x) - model_.log_stationary(dropped);
    } else {
      const Symbol before_last = at(pushed_ - 2);
      value_ += model_.log_stationary(first) + model_.log_transition(before_last, x) -
                model_.log_stationary(dropped) - model_.log_transition(dropped, first);
    }
    if ((pushed_ - n_) % kReanchorPeriod == 0) {
      const double fresh = recompute();
      max_drift_ = std::max(max_drift_, std::abs(fresh - value_));
      value_ = fresh;
    }
  }

  bool ready() const noexcept { return pushed_ >= n_; }
  double value() const noexcept { return value_; }
  double recompute() const {
    const std::uint64_t start = pushed_ - n_;
    double acc = model_.log_stationary(at(start));
    for (std::uint64_t j = start + 1; j < pushed_; ++j) acc += model_.log_transition(at(j - 1), at(j));
    return acc;
  }
  double max_drift() const noexcept { return max_drift_; }

 private:
  Symbol at(std::uint64_t j) const { return ring_[j % ring_.size()]; }

  const MeasureModel& model_;
  std::size_t n_;
  std::vector<Symbol> ring_;
  std::uint64_t pushed_ = 0;
  double value_ = 0.0;
  double max_drift_ = 0.0;
};

LogMeasure checked_target_measure(const MeasureModel& model, const Word& target) {
  auto mu = log_cylinder_measure(model, target);
  if (mu.is_zero()) throw Error(ErrorCode::ZeroMeasureTarget, "target cylinder " + target.to_string() + " has measure zero");
  return mu;
}

void check_patterns(const MeasureModel& model, std::span<const Word> patterns, std::size_t n) {
  if (patterns.empty()) throw Error(ErrorCode::EmptySet, "pattern set is empty");
  for (const auto& w : patterns) {
    if (w.size() != n) throw Error(ErrorCode::MixedLengths, "patterns must all have length " + std::to_string(n));
    for (Symbol a : w) model.check_symbol(a);
  }
}

}  // namespace

OrbitStream::OrbitStream(const MeasureModel& model, std::uint64_t seed, std::uint64_t substream, Word pinned)
    : model_(&model), rng_(seed, substream), pinned_(std::move(pinned)) {
  for (Symbol a : pinned_) model.check_symbol(a);
}

Symbol OrbitStream::generate() {
  Symbol s;
  if (pinned_used_ < pinned_.size()) {
    s = pinned_[pinned_used_++];
  } else if (!last_) {
    s = model_->sample_stationary(rng_.uniform());
  } else {
    s = model_->sample_next(*last_, rng_.uniform());
  }
  last_ = s;
  return s;
}

Word OrbitStream::peek(std::size_t count) {
  while (lookahead_.size() < count) lookahead_.push_back(generate());
  return Word(std::vector<Symbol>(lookahead_.begin(), lookahead_.begin() + static_cast<std::ptrdiff_t>(count)));
}

std::uint64_t CapPolicy::resolve(LogMeasure target) const {
  constexpr std::uint64_t kMaxCap = std::uint64_t{1} << 62;
  if (absolute) {
    if (*absolute == 0) throw Error(ErrorCode::InvalidArgument, "cap must be >= 1");
    return *absolute;
  }
  if (!(multiplier > 0.0)) throw Error(ErrorCode::InvalidArgument, "cap multiplier must be > 0");
  double cap = std::ceil(multiplier * std::exp(-target.value));
  if (!(cap < static_cast<double>(kMaxCap))) return kMaxCap;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(cap));
}

Word sample_orbit(const MeasureModel& model, std::uint64_t seed, std::size_t length) {
  if (length == 0) throw Error(ErrorCode::InvalidArgument, "orbit length must be >= 1");
  OrbitStream stream(model, seed);
  std::vector<Symbol> out(length);
  for (auto& s : out) s = stream.next();
  return Word(std::move(out));
}

TimeResult entrance_time(OrbitStream& stream, const Word& target, const CapPolicy& cap_policy) {
  const auto mu = checked_target_measure(stream.model(), target);
  const std::uint64_t cap = cap_policy.resolve(mu);
  const std::uint64_t n = target.size();
  const auto automaton = PatternAutomaton::single(target);

  stream.next();  // x_0 never counts
  PatternAutomaton::State q = PatternAutomaton::root();
  for (std::uint64_t j = 1;; ++j) {
    q = automaton.step(q, stream.next());
    if (automaton.is_match(q)) return TimeResult::hit(j - n + 1);
    if (j + 1 >= cap + n) return TimeResult::censored_at(cap);
  }
}

TimeResult recurrence_time(OrbitStream& stream, std::size_t n, const CapPolicy& cap) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "cylinder length must be >= 1");
  return entrance_time(stream, stream.peek(n), cap);
}

std::uint64_t hitting_number(OrbitStream& stream, std::span<const Word> patterns, std::uint64_t window) {
  if (patterns.empty()) throw Error(ErrorCode::EmptySet, "pattern set is empty");
  const std::size_t n = patterns.front().size();
  check_patterns(stream.model(), patterns, n);
  const auto automaton = PatternAutomaton::multi(patterns);

  std::uint64_t count = 0;
  PatternAutomaton::State q = PatternAutomaton::root();
  for (std::uint64_t j = 0; j < window + n; ++j) {
    q = automaton.step(q, stream.next());
    if (automaton.is_match(q)) ++count;
  }
  return count;
}

HitsUntilEntrance hits_until_entrance(OrbitStream& stream, const Word& target, std::span<const Word> patterns,
                                      const CapPolicy& cap_policy) {
  const auto mu = checked_target_measure(stream.model(), target);
  const std::uint64_t n = target.size();
  check_patterns(stream.model(), patterns, n);
  const std::uint64_t cap = cap_policy.resolve(mu);
  const auto hit_target = PatternAutomaton::single(target);
  const auto hit_set = PatternAutomaton::multi(patterns);

  HitsUntilEntrance out;
  PatternAutomaton::State qt = PatternAutomaton::root();
  PatternAutomaton::State qu = hit_set.step(PatternAutomaton::root(), stream.next());
  if (n == 1 && hit_set.is_match(qu)) ++out.count;
  for (std::uint64_t j = 1;; ++j) {
    const Symbol x = stream.next();
    qu = hit_set.step(qu, x);
    qt = hit_target.step(qt, x);
    if (j + 1 >= n && hit_set.is_match(qu)) ++out.count;
    if (hit_target.is_match(qt)) {
      out.time = TimeResult::hit(j - n + 1);
      return out;
    }
    if (j + 1 >= cap + n) {
      out.time = TimeResult::censored_at(cap);
      return out;
    }
  }
}

namespace {

WSum w_sum_impl(OrbitStream& stream, const Word& target, double s, const CapPolicy& cap_policy) {
  if (!(s >= 0.0)) throw Error(ErrorCode::InvalidArgument, "s must be >= 0");
  const auto mu = checked_target_measure(stream.model(), target);
  const std::uint64_t cap = cap_policy.resolve(mu);
  const std::uint64_t n = target.size();
  const auto automaton = PatternAutomaton::single(target);
  SlidingLogMeasure window(stream.model(), n);
  LogSumExp acc;

  window.push(stream.next());
  PatternAutomaton::State q = PatternAutomaton::root();
  WSum out;
  for (std::uint64_t j = 1;; ++j) {
    const Symbol x = stream.next();
    window.push(x);
    q = automaton.step(q, x);
    if (j + 1 > n) {
      // Window i = j - n + 1 >= 1 is complete.
      const double log_mu = window.value();
      if (std::isinf(log_mu)) throw std::logic_error("realized orbit window has measure zero");
      acc.add(s == 0.0 ? 0.0 : s * log_mu);
    }
    if (automaton.is_match(q)) {
      out.time = TimeResult::hit(j - n + 1);
      break;
    }
    if (j + 1 >= cap + n) {
      out.time = TimeResult::censored_at(cap);
      break;
    }
  }
  out.log_w = acc.log();
  out.w = acc.value();
  return out;
}

}  // namespace

WSum w_sum(OrbitStream& stream, const Word& target, double s, const CapPolicy& cap) {
  return w_sum_impl(stream, target, s, cap);
}

WSum w_sum_recurrent(OrbitStream& stream, std::size_t n, double s, const CapPolicy& cap) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "cylinder length must be >= 1");
  return w_sum_impl(stream, stream.peek(n), s, cap);
}

double sliding_measure_drift(OrbitStream& stream, std::size_t n, std::uint64_t steps) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "cylinder length must be >= 1");
  SlidingLogMeasure window(stream.model(), n);
  for (std::uint64_t j = 0; j < steps + n; ++j) window.push(stream.next());
  return std::max(window.max_drift(), std::abs(window.value() - window.recompute()));
}

}  // namespace hitstat
