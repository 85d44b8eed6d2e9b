#include "hitstat/stream_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string_view>
#include <unordered_map>

#include <fmt/format.h>

#include "hitstat/automaton.hpp"
#include "hitstat/error.hpp"
#include "hitstat/monte_carlo.hpp"
#include "hitstat/numeric.hpp"
#include "hitstat/rng.hpp"
#include "hitstat/stats.hpp"

namespace hitstat {

SymbolMap::SymbolMap(Mode mode) : mode_(mode) {
  switch (mode) {
    case Mode::ByteIdentity: alphabet_ = 256; break;
    case Mode::Nibble: alphabet_ = 16; break;
    case Mode::Bit: alphabet_ = 2; break;
    case Mode::CustomTable: break;
  }
}

SymbolMap SymbolMap::custom(const std::map<std::uint8_t, Symbol>& table) {
  SymbolMap map(Mode::CustomTable);
  if (table.size() != 256) {
    throw Error(ErrorCode::InvalidSpec, "custom symbol table maps " + std::to_string(table.size()) + " of 256 byte values");
  }
  Symbol largest = 0;
  for (const auto& [byte, symbol] : table) {
    map.table_[byte] = symbol;
    largest = std::max(largest, symbol);
  }
  map.alphabet_ = static_cast<std::size_t>(largest) + 1;
  return map;
}

SymbolMap SymbolMap::from_name(const std::string& name) {
  if (name == "byte") return byte_identity();
  if (name == "nibble") return nibble();
  if (name == "bit") return bit();
  throw Error(ErrorCode::InvalidSpec, "unknown symbol map '" + name + "' (expected byte, nibble or bit)");
}

void SymbolMap::append(std::uint8_t byte, std::vector<Symbol>& out) const {
  switch (mode_) {
    case Mode::ByteIdentity:
      out.push_back(byte);
      break;
    case Mode::Nibble:
      out.push_back(byte >> 4);
      out.push_back(byte & 0x0F);
      break;
    case Mode::Bit:
      for (int b = 7; b >= 0; --b) out.push_back((byte >> b) & 1u);
      break;
    case Mode::CustomTable:
      out.push_back(table_[byte]);
      break;
  }
}

std::vector<Symbol> ingest(std::span<const std::uint8_t> bytes, const SymbolMap& map) {
  if (bytes.empty()) throw Error(ErrorCode::EmptyInput, "input has no bytes");
  std::vector<Symbol> out;
  out.reserve(bytes.size() * (map.mode() == SymbolMap::Mode::Bit ? 8 : 2));
  for (auto b : bytes) map.append(b, out);
  return out;
}

std::vector<Symbol> ingest(const std::filesystem::path& path, const SymbolMap& map) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed for " + path.string());
  return ingest(bytes, map);
}

std::string EstimateSeries::to_csv(bool header) const {
  std::string out;
  if (header) out += "method,n,s,estimate_nats,stderr,censored_fraction,sample_count\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{:.17g},{:.17g},{:.17g},{}\n", r.method, r.n, r.s ? fmt::format("{:.17g}", *r.s) : "",
                       r.estimate_nats, r.standard_error, r.censored_fraction, r.sample_count);
  }
  return out;
}

std::optional<std::uint64_t> sequence_recurrence_time(std::span<const Symbol> sequence, std::size_t start,
                                                      std::size_t n) {
  if (n == 0 || start + n > sequence.size()) throw Error(ErrorCode::InvalidArgument, "window outside sequence");
  const Word window(std::vector<Symbol>(sequence.begin() + static_cast<std::ptrdiff_t>(start),
                                        sequence.begin() + static_cast<std::ptrdiff_t>(start + n)));
  const auto matcher = PatternAutomaton::single(window);
  PatternAutomaton::State q = PatternAutomaton::root();
  for (std::size_t j = start + 1; j < sequence.size(); ++j) {
    q = matcher.step(q, sequence[j]);
    if (matcher.is_match(q)) return j + 1 - n - start;
  }
  return std::nullopt;
}

EstimateSeries ow_entropy_estimate(std::span<const Symbol> sequence, std::span<const std::size_t> n_list,
                                   std::size_t starts_per_n, std::uint64_t seed,
                                   const RecurrenceEstimatorOptions& options) {
  if (n_list.empty()) throw Error(ErrorCode::InvalidArgument, "n-list is empty");
  if (starts_per_n == 0) throw Error(ErrorCode::InvalidArgument, "starts_per_n must be >= 1");
  const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
  if (n_max == 0) throw Error(ErrorCode::InvalidArgument, "cylinder length must be >= 1");
  if (sequence.size() < n_max * options.min_length_multiple) {
    throw Error(ErrorCode::SequenceTooShort, fmt::format("sequence of length {} is shorter than {} x n_max = {}",
                                                         sequence.size(), options.min_length_multiple,
                                                         n_max * options.min_length_multiple));
  }

  EstimateSeries series;
  for (std::size_t n : n_list) {
    CounterRng rng(seed, substream_id(n, StreamRole::Offsets));
    const std::uint64_t positions = sequence.size() - n + 1;
    std::vector<std::size_t> starts(starts_per_n);
    for (auto& s : starts) s = static_cast<std::size_t>(rng.uniform() * static_cast<double>(positions));

    std::vector<double> exponents(starts_per_n, std::nan(""));
    parallel_for(starts_per_n, options.workers, [&](std::size_t i) {
      auto tau = sequence_recurrence_time(sequence, starts[i], n);
      if (tau) exponents[i] = std::log(static_cast<double>(*tau)) / static_cast<double>(n);
    });
    std::vector<double> finite;
    for (double e : exponents) {
      if (!std::isnan(e)) finite.push_back(e);
    }
    EstimateRow row;
    row.method = "ow-recurrence";
    row.n = n;
    row.sample_count = starts_per_n;
    row.censored_fraction = 1.0 - static_cast<double>(finite.size()) / static_cast<double>(starts_per_n);
    if (row.censored_fraction > options.max_censored_fraction) {
      throw Error(ErrorCode::CensoringExceeded,
                  fmt::format("n = {}: {:.1f}% of windows never recur; use a longer sequence or smaller n", n,
                              100.0 * row.censored_fraction));
    }
    const auto summary = summarize(finite);
    row.estimate_nats = summary.median;
    // Asymptotic standard error of a sample median under normality.
    row.standard_error = 1.2533141373155 * summary.stddev / std::sqrt(static_cast<double>(finite.size()));
    series.rows.push_back(row);
  }
  return series;
}

NgramTable ngram_counts(std::span<const Symbol> sequence, std::size_t n, std::size_t max_distinct) {
  if (n == 0 || sequence.size() < n) throw Error(ErrorCode::InvalidArgument, "sequence shorter than n");
  NgramTable table;
  table.n = n;
  table.total = sequence.size() - n + 1;

  const Symbol largest = *std::max_element(sequence.begin(), sequence.end());
  const double bits = std::log2(static_cast<double>(largest) + 1.0);
  auto too_many = [&](std::size_t distinct) {
    if (distinct > max_distinct) {
      throw Error(ErrorCode::BudgetExceeded, fmt::format("more than {} distinct {}-grams", max_distinct, n));
    }
  };

  if (bits * static_cast<double>(n) <= 63.0) {
    // Base-(largest+1) rolling code.
    const std::uint64_t base = static_cast<std::uint64_t>(largest) + 1;
    std::uint64_t top = 1;
    for (std::size_t i = 1; i < n; ++i) top *= base;
    std::unordered_map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t code = 0;
    for (std::size_t j = 0; j < sequence.size(); ++j) {
      if (j >= n) code -= sequence[j - n] * top;
      code = code * base + sequence[j];
      if (j + 1 >= n) {
        ++counts[code];
        if (counts.size() > max_distinct) too_many(counts.size());
      }
    }
    table.counts.reserve(counts.size());
    for (const auto& [key, c] : counts) table.counts.push_back(c);
  } else {
    std::unordered_map<std::string_view, std::uint64_t> counts;
    const auto* raw = reinterpret_cast<const char*>(sequence.data());
    for (std::size_t j = 0; j + n <= sequence.size(); ++j) {
      ++counts[std::string_view(raw + j * sizeof(Symbol), n * sizeof(Symbol))];
      if (counts.size() > max_distinct) too_many(counts.size());
    }
    table.counts.reserve(counts.size());
    for (const auto& [key, c] : counts) table.counts.push_back(c);
  }
  // Deterministic order for downstream sums.
  std::sort(table.counts.begin(), table.counts.end());
  return table;
}

double plugin_renyi_estimate(const NgramTable& table, double s) {
  if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveS, "Renyi parameter s must be > 0");
  const double log_total = std::log(static_cast<double>(table.total));
  LogSumExp acc;
  for (auto c : table.counts) acc.add((1.0 + s) * (std::log(static_cast<double>(c)) - log_total));
  return -acc.log() / (s * static_cast<double>(table.n));
}

double plugin_renyi_estimate(std::span<const Symbol> sequence, std::size_t n, double s, std::size_t max_distinct) {
  if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveS, "Renyi parameter s must be > 0");
  return plugin_renyi_estimate(ngram_counts(sequence, n, max_distinct), s);
}

}  // namespace hitstat
