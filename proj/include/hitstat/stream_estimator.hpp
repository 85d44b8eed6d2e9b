#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hitstat/word.hpp"

namespace hitstat {

/// Total, deterministic byte-to-symbol mapping.
class SymbolMap {
 public:
  enum class Mode { ByteIdentity, Nibble, Bit, CustomTable };

  static SymbolMap byte_identity() { return SymbolMap(Mode::ByteIdentity); }
  /// Two symbols per byte, high nibble first.
  static SymbolMap nibble() { return SymbolMap(Mode::Nibble); }
  /// Eight symbols per byte, most significant bit first.
  static SymbolMap bit() { return SymbolMap(Mode::Bit); }
  /// Every byte value 0..255 must be mapped.
  static SymbolMap custom(const std::map<std::uint8_t, Symbol>& table);
  static SymbolMap from_name(const std::string& name);

  Mode mode() const noexcept { return mode_; }
  std::size_t alphabet_size() const noexcept { return alphabet_; }
  void append(std::uint8_t byte, std::vector<Symbol>& out) const;

 private:
  explicit SymbolMap(Mode mode);

  Mode mode_;
  std::size_t alphabet_ = 0;
  std::array<Symbol, 256> table_{};
};

std::vector<Symbol> ingest(std::span<const std::uint8_t> bytes, const SymbolMap& map);
std::vector<Symbol> ingest(const std::filesystem::path& path, const SymbolMap& map);

struct EstimateRow {
  std::string method;  // "ow-recurrence" or "plugin-renyi"
  std::size_t n = 0;
  std::optional<double> s;
  double estimate_nats = 0.0;
  double standard_error = 0.0;
  double censored_fraction = 0.0;
  std::size_t sample_count = 0;
};

struct EstimateSeries {
  std::vector<EstimateRow> rows;

  /// Columns: method,n,s,estimate_nats,stderr,censored_fraction,sample_count.
  std::string to_csv(bool header = true) const;
};

struct RecurrenceEstimatorOptions {
  /// The sequence must be at least this multiple of the largest n.
  std::size_t min_length_multiple = 64;
  /// Largest tolerated fraction of windows without a recurrence.
  double max_censored_fraction = 0.05;
  unsigned workers = 1;
};

/// Median over sampled start offsets of (1/n) log of the first recurrence
/// of the n-window starting there. Windows that never recur before the end
/// of the sequence are censored and reported.
EstimateSeries ow_entropy_estimate(std::span<const Symbol> sequence, std::span<const std::size_t> n_list,
                                   std::size_t starts_per_n, std::uint64_t seed,
                                   const RecurrenceEstimatorOptions& options = {});

/// First i >= 1 with sequence[start+i .. start+i+n) equal to the window at
/// `start`; empty when the sequence ends first.
std::optional<std::uint64_t> sequence_recurrence_time(std::span<const Symbol> sequence, std::size_t start,
                                                      std::size_t n);

struct NgramTable {
  std::size_t n = 0;
  std::uint64_t total = 0;  // sequence.size() - n + 1
  std::vector<std::uint64_t> counts;  // one per distinct n-gram, unordered
};

/// Overlapping n-gram counts. Raises BudgetExceeded past `max_distinct`
/// distinct n-grams.
NgramTable ngram_counts(std::span<const Symbol> sequence, std::size_t n, std::size_t max_distinct = 1u << 24);

/// -(1/(s n)) log sum_w f(w)^{1+s} over empirical n-gram frequencies.
double plugin_renyi_estimate(const NgramTable& table, double s);
double plugin_renyi_estimate(std::span<const Symbol> sequence, std::size_t n, double s,
                             std::size_t max_distinct = 1u << 24);

}  // namespace hitstat
