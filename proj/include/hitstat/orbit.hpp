#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "hitstat/measure_model.hpp"
#include "hitstat/rng.hpp"
#include "hitstat/word.hpp"

namespace hitstat {

/// Seeded sample path x_0, x_1, ... of the stationary process.
///
/// x_0 is drawn from the stationary law and every later symbol from the
/// transition kernel given its predecessor. An optional pinned prefix is
/// emitted verbatim first (the kernel then continues from its last symbol),
/// which is exact conditional sampling given the prefix cylinder.
///
/// The stream is a forward cursor: engine operations treat the next symbol
/// as x_0 and consume what they read. The model must outlive the stream.
class OrbitStream {
 public:
  OrbitStream(const MeasureModel& model, std::uint64_t seed, std::uint64_t substream = 0, Word pinned = {});
  OrbitStream(MeasureModel&&, std::uint64_t, std::uint64_t = 0, Word = {}) = delete;

  Symbol next() {
    ++position_;
    if (!lookahead_.empty()) {
      Symbol s = lookahead_.front();
      lookahead_.pop_front();
      return s;
    }
    return generate();
  }

  /// The next `count` symbols, without consuming them.
  Word peek(std::size_t count);

  std::uint64_t position() const noexcept { return position_; }
  const MeasureModel& model() const noexcept { return *model_; }

 private:
  Symbol generate();

  const MeasureModel* model_;
  CounterRng rng_;
  Word pinned_;
  std::size_t pinned_used_ = 0;
  std::optional<Symbol> last_;
  std::deque<Symbol> lookahead_;
  std::uint64_t position_ = 0;
};

/// Step count of an entrance/return event, or a right-censored observation
/// when nothing happened within the cap.
struct TimeResult {
  std::uint64_t value = 0;
  bool censored = false;

  static TimeResult hit(std::uint64_t v) noexcept { return {v, false}; }
  static TimeResult censored_at(std::uint64_t cap) noexcept { return {cap, true}; }
  friend bool operator==(const TimeResult&, const TimeResult&) = default;
};

/// Search horizon for entrance-type operations. By default
/// ceil(multiplier / mu(target)); an absolute cap overrides it.
struct CapPolicy {
  double multiplier = 100.0;
  std::optional<std::uint64_t> absolute;

  CapPolicy() = default;
  CapPolicy(std::uint64_t cap) : absolute(cap) {}  // NOLINT(google-explicit-constructor)

  static CapPolicy scaled(double multiplier) {
    CapPolicy p;
    p.multiplier = multiplier;
    return p;
  }

  std::uint64_t resolve(LogMeasure target) const;
};

Word sample_orbit(const MeasureModel& model, std::uint64_t seed, std::size_t length);

/// tau_A(x) = min{ i >= 1 : x_i .. x_{i+n-1} = target }. Reads at most
/// cap + n symbols.
TimeResult entrance_time(OrbitStream& stream, const Word& target, const CapPolicy& cap = {});

/// Entrance time of the stream into its own first n symbols.
TimeResult recurrence_time(OrbitStream& stream, std::size_t n, const CapPolicy& cap = {});

/// N_{U,M}(x): number of i in [0, M] whose n-window lies in the pattern set.
/// Unlike the entrance time this count includes i = 0.
std::uint64_t hitting_number(OrbitStream& stream, std::span<const Word> patterns, std::uint64_t window);

struct HitsUntilEntrance {
  TimeResult time;
  std::uint64_t count = 0;  // N_{U, tau}(x), or N_{U, cap} when censored
};

HitsUntilEntrance hits_until_entrance(OrbitStream& stream, const Word& target, std::span<const Word> patterns,
                                      const CapPolicy& cap = {});

struct WSum {
  TimeResult time;
  double log_w = 0.0;  // log sum_{i=1}^{tau} mu(A_n(T^i x))^s
  double w = 0.0;      // same sum in linear scale; exact integer when s = 0
};

/// Re-anchoring period of the sliding cylinder log-measure.
inline constexpr std::uint64_t kReanchorPeriod = std::uint64_t{1} << 16;

/// W_n^s(x, z) accumulated along the orbit up to the entrance time into
/// `target`. The n-window log-measure is slid in O(1) per step and
/// recomputed from scratch every kReanchorPeriod steps. A censored run
/// returns the partial sum with `time.censored` set.
WSum w_sum(OrbitStream& stream, const Word& target, double s, const CapPolicy& cap = {});

/// Same sum with the target taken as the stream's own first n symbols.
WSum w_sum_recurrent(OrbitStream& stream, std::size_t n, double s, const CapPolicy& cap = {});

/// Drift check helper: runs the sliding log-measure for `steps` steps and
/// returns the largest |incremental - fresh| seen at re-anchor points and at
/// the final step.
double sliding_measure_drift(OrbitStream& stream, std::size_t n, std::uint64_t steps);

}  // namespace hitstat
