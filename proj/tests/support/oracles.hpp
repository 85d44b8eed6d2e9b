#pragma once

// Brute-force reference computations used by the tests. Nothing here calls
// the library's measure, automaton or chain code.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

using Seq = std::vector<std::uint32_t>;

/// Finite stationary process given by an initial law and a k x k kernel
/// (rows identical for i.i.d. models).
struct Process {
  std::vector<double> pi;
  std::vector<std::vector<double>> P;

  std::size_t k() const { return pi.size(); }

  static Process iid(const std::vector<double>& p) { return {p, std::vector<std::vector<double>>(p.size(), p)}; }
  static Process markov(const std::vector<double>& pi, const std::vector<std::vector<double>>& P) { return {pi, P}; }

  double prob(const Seq& x) const {
    if (x.empty()) return 1.0;
    double v = pi[x[0]];
    for (std::size_t i = 1; i < x.size(); ++i) v *= P[x[i - 1]][x[i]];
    return v;
  }
};

inline bool window_equals(const Seq& x, std::size_t at, const Seq& w) {
  if (at + w.size() > x.size()) return false;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (x[at + j] != w[j]) return false;
  }
  return true;
}

/// Calls f(x) for every sequence of length len over k symbols.
template <class F>
void for_each_sequence(std::size_t k, std::size_t len, F&& f) {
  Seq x(len, 0);
  while (true) {
    f(x);
    std::size_t i = len;
    while (i > 0 && x[i - 1] + 1 == k) x[--i] = 0;
    if (i == 0) return;
    ++x[i - 1];
  }
}

/// P(tau_B > m) for m = 0..m_max by summing over all prefixes of length
/// m_max + n, where tau_B = min{ i >= 1 : x_i..x_{i+n-1} = B } and x_0 is
/// drawn from pi. With `from_target` the orbit is conditioned on
/// x_0..x_{n-1} = B (the return law).
inline std::vector<double> survival_by_enumeration(const Process& proc, const Seq& b, std::size_t m_max,
                                                   bool from_target = false) {
  const std::size_t n = b.size();
  std::vector<double> surv(m_max + 1, 0.0);
  double norm = 0.0;
  for_each_sequence(proc.k(), m_max + n, [&](const Seq& x) {
    if (from_target && !window_equals(x, 0, b)) return;
    const double p = proc.prob(x);
    if (p == 0.0) return;
    norm += p;
    std::size_t tau = m_max + 1;  // "beyond the horizon"
    for (std::size_t i = 1; i <= m_max; ++i) {
      if (window_equals(x, i, b)) {
        tau = i;
        break;
      }
    }
    for (std::size_t m = 0; m <= m_max && m < tau; ++m) surv[m] += p;
  });
  for (auto& v : surv) v /= norm;
  return surv;
}

/// Every position i (window start) where a pattern occurs.
inline std::vector<std::size_t> naive_match_starts(const Seq& x, const std::vector<Seq>& patterns) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (const auto& w : patterns) {
      if (window_equals(x, i, w)) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

}  // namespace oracle
