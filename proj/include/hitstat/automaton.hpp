#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hitstat/word.hpp"

namespace hitstat {

/// Deterministic matcher over a symbol stream.
///
/// Built either from one word (Knuth-Morris-Pratt failure function) or from
/// a word set (Aho-Corasick trie with suffix links); both are compiled to a
/// dense transition table so a step is one lookup. Symbols at or beyond the
/// table width occur in no pattern and send the matcher back to the root,
/// which lets the same automaton run over the countable alphabet.
///
/// The automaton itself is immutable; callers keep the current state.
class PatternAutomaton {
 public:
  using State = std::uint32_t;

  static PatternAutomaton single(const Word& pattern);
  static PatternAutomaton multi(std::span<const Word> patterns);

  static constexpr State root() noexcept { return 0; }

  State step(State q, Symbol a) const noexcept {
    return a < width_ ? table_[static_cast<std::size_t>(q) * width_ + a] : root();
  }

  /// True when some pattern ends at the last symbol fed.
  bool is_match(State q) const noexcept { return match_[q] != 0; }

  /// Length of the longest pattern prefix that is a suffix of the input.
  std::size_t depth(State q) const noexcept { return depth_[q]; }

  std::size_t state_count() const noexcept { return depth_.size(); }
  std::size_t width() const noexcept { return width_; }

  /// Single-word automata: the state reached right after a full match,
  /// expressed as the longest proper border (the state the next symbol is
  /// read from).
  State resume_after_match() const noexcept { return resume_; }

 private:
  std::size_t width_ = 0;
  std::vector<State> table_;
  std::vector<std::uint8_t> match_;
  std::vector<std::uint32_t> depth_;
  State resume_ = 0;
};

}  // namespace hitstat
