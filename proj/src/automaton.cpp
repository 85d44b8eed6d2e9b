#include "hitstat/automaton.hpp"

#include <algorithm>
#include <queue>

#include "hitstat/error.hpp"

namespace hitstat {

PatternAutomaton PatternAutomaton::single(const Word& pattern) {
  if (pattern.empty()) throw Error(ErrorCode::EmptyWord, "pattern must have length >= 1");
  const std::size_t n = pattern.size();
  PatternAutomaton a;
  a.width_ = static_cast<std::size_t>(*std::max_element(pattern.begin(), pattern.end())) + 1;

  // border[q] = length of the longest proper border of pattern[0..q).
  std::vector<std::size_t> border(n + 1, 0);
  for (std::size_t q = 2; q <= n; ++q) {
    std::size_t b = border[q - 1];
    while (b > 0 && pattern[b] != pattern[q - 1]) b = border[b];
    if (pattern[b] == pattern[q - 1]) ++b;
    border[q] = b;
  }

  a.table_.assign((n + 1) * a.width_, 0);
  a.match_.assign(n + 1, 0);
  a.depth_.resize(n + 1);
  for (std::size_t q = 0; q <= n; ++q) {
    a.depth_[q] = static_cast<std::uint32_t>(q);
    for (std::size_t c = 0; c < a.width_; ++c) {
      State next;
      if (q < n && pattern[q] == c) {
        next = static_cast<State>(q + 1);
      } else if (q == 0) {
        next = 0;
      } else {
        next = a.table_[border[q] * a.width_ + c];
      }
      a.table_[q * a.width_ + c] = next;
    }
  }
  a.match_[n] = 1;
  a.resume_ = static_cast<State>(border[n]);
  return a;
}

PatternAutomaton PatternAutomaton::multi(std::span<const Word> patterns) {
  if (patterns.empty()) throw Error(ErrorCode::EmptySet, "pattern set is empty");
  PatternAutomaton a;
  for (const auto& w : patterns) {
    if (w.empty()) throw Error(ErrorCode::EmptyWord, "pattern must have length >= 1");
    a.width_ = std::max<std::size_t>(a.width_, *std::max_element(w.begin(), w.end()) + 1);
  }

  constexpr State kNone = ~State{0};
  std::vector<State> go(a.width_, kNone);
  a.match_.push_back(0);
  a.depth_.push_back(0);
  for (const auto& w : patterns) {
    State q = 0;
    for (Symbol c : w) {
      State& slot = go[q * a.width_ + c];
      if (slot == kNone) {
        slot = static_cast<State>(a.depth_.size());
        a.depth_.push_back(a.depth_[q] + 1);
        a.match_.push_back(0);
        go.resize(go.size() + a.width_, kNone);
      }
      q = go[q * a.width_ + c];
    }
    a.match_[q] = 1;
  }

  // Breadth-first completion of the goto function; a node matches when any
  // suffix of its string is a pattern.
  std::vector<State> link(a.depth_.size(), 0);
  std::queue<State> order;
  for (std::size_t c = 0; c < a.width_; ++c) {
    State& child = go[c];
    if (child == kNone) {
      child = 0;
    } else {
      link[child] = 0;
      order.push(child);
    }
  }
  while (!order.empty()) {
    State q = order.front();
    order.pop();
    if (a.match_[link[q]]) a.match_[q] = 1;
    for (std::size_t c = 0; c < a.width_; ++c) {
      State& child = go[q * a.width_ + c];
      State via_link = go[link[q] * a.width_ + c];
      if (child == kNone) {
        child = via_link;
      } else {
        link[child] = via_link;
        order.push(child);
      }
    }
  }
  a.table_ = std::move(go);
  return a;
}

}  // namespace hitstat
