// Acceptance checks 1..11. `acceptance` runs all of them; `acceptance K`
// runs only criterion K. One PASS/FAIL line per criterion; the exit status
// is nonzero when any selected criterion fails.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "hitstat/error.hpp"
#include "hitstat/exact.hpp"
#include "hitstat/experiment.hpp"
#include "hitstat/monte_carlo.hpp"
#include "hitstat/stream_estimator.hpp"

#include "../support/oracles.hpp"

using namespace hitstat;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;
  std::function<Outcome()> run;
};

const MeasureModel& fair() {
  static const auto m = MeasureModel::bernoulli({0.5, 0.5});
  return m;
}
const MeasureModel& biased() {
  static const auto m = MeasureModel::bernoulli({0.7, 0.3});
  return m;
}
const MeasureModel& two_state() {
  static const auto m = MeasureModel::markov({{0.9, 0.1}, {0.2, 0.8}});
  return m;
}

std::vector<Word> binary_words(std::size_t min_len, std::size_t max_len) {
  std::vector<Word> out;
  for (std::size_t len = min_len; len <= max_len; ++len) {
    oracle::for_each_sequence(2, len, [&](const oracle::Seq& x) { out.push_back(Word(x)); });
  }
  return out;
}

Outcome renyi_consistency() {
  bool ok = true;
  std::string detail;
  for (double s : {0.5, 1.0, 2.0}) {
    const double r = renyi_entropy(two_state(), s);
    double prev = INFINITY;
    bool monotone = true;
    double last = 0.0;
    for (std::size_t n = 4; n <= 14; ++n) {
      const double slope = -partition_sum_exact(two_state(), n, s) / (s * static_cast<double>(n));
      const double d = std::abs(slope - r);
      monotone = monotone && d < prev;
      prev = d;
      last = d;
    }
    ok = ok && monotone && last <= 0.02;
    detail += fmt::format("markov s={} |diff|@14={:.4f}{}; ", s, last, monotone ? "" : " (not monotone)");
  }
  double worst = 0.0;
  for (const auto* m : {&fair(), &biased()}) {
    for (double s : {0.5, 1.0, 2.0}) {
      const double r = renyi_entropy(*m, s);
      for (std::size_t n = 1; n <= 14; ++n) {
        worst = std::max(worst, std::abs(-partition_sum_exact(*m, n, s) / (s * static_cast<double>(n)) - r));
      }
    }
  }
  ok = ok && worst <= 1e-10;
  detail += fmt::format("bernoulli max |diff|={:.2e}", worst);
  return {ok, detail};
}

Outcome kac_identity() {
  double worst = 0.0;
  std::size_t checked = 0, skipped = 0;
  for (const auto* m : {&fair(), &two_state()}) {
    for (const auto& w : binary_words(1, 5)) {
      const auto mu = log_cylinder_measure(*m, w);
      if (mu.is_zero()) {
        ++skipped;
        continue;
      }
      worst = std::max(worst, std::abs(exact_mean_return(*m, w) * mu.probability() - 1.0));
      ++checked;
    }
  }
  return {worst <= 1e-8 && checked + skipped == 124,
          fmt::format("{} words, {} skipped, max |E[tau] mu - 1|={:.2e}", checked, skipped, worst)};
}

Outcome integral_identity() {
  double worst = 0.0;
  for (const auto* m : {&fair(), &two_state()}) {
    for (const char* b : {"1", "11", "10", "0110"}) {
      worst = std::max(worst, integral_identity_residual(*m, Word::parse(b), 500).max_residual);
    }
  }
  return {worst <= 1e-9, fmt::format("max residual={:.2e}", worst)};
}

Outcome oracle_agreement() {
  const auto proc = oracle::Process::iid({0.5, 0.5});
  double worst = 0.0;
  std::size_t cells = 0;
  for (const auto& w : binary_words(1, 4)) {
    const oracle::Seq b(w.begin(), w.end());
    for (auto cond : {Conditioning::Entrance, Conditioning::Return}) {
      const auto expected = oracle::survival_by_enumeration(proc, b, 12, cond == Conditioning::Return);
      const auto curve = exact_survival(ProductChain::build(fair(), w, cond), 12);
      for (std::size_t m = 0; m <= 12; ++m) {
        worst = std::max(worst, std::abs(curve.survival[m] - expected[m]));
        ++cells;
      }
    }
  }
  return {worst <= 1e-12, fmt::format("{} (B, m, law) cells, max gap={:.2e}", cells, worst)};
}

Outcome exponential_law() {
  const Word b = random_word(fair(), 1, 10);
  std::vector<double> grid;
  for (int i = 1; i <= 100; ++i) grid.push_back(0.05 * i);
  const auto emp = empirical_survival(fair(), b, 5000, grid, 1);
  const auto exact = exact_survival(ProductChain::build(fair(), b, Conditioning::Entrance), emp.curve.m.back());
  const double gap = max_curve_gap(emp.curve, exact);
  const double band = dkw_half_width(5000, 0.001);
  return {emp.ks.statistic < 0.05 && gap <= band,
          fmt::format("B={} KS={:.4f} gap to exact={:.4f} DKW={:.4f}", b.to_string(), emp.ks.statistic, gap, band)};
}

Outcome exponent_concentration() {
  bool ok = true;
  std::string detail;
  for (const auto& [name, model] : builtin_models()) {
    const auto s = entrance_exponent_samples(model, 14, 2000, 1);
    const double h = shannon_entropy(model);
    const double below = s.fraction_below(h - 0.15);
    const double above = s.fraction_above(h + 0.15);
    const bool pass = below + above <= 0.10 && below <= 0.05 && s.censored_fraction() <= kMaxCensoredFraction;
    ok = ok && pass;
    detail += fmt::format("{}: below={:.3f} above={:.3f} two-sided={:.3f}; ", name, below, above, below + above);
  }
  return {ok, detail};
}

Outcome wns_exponent() {
  const auto u = wns_exponent_samples(fair(), 14, 1.0, 1000, 1);
  const auto b = wns_exponent_samples(biased(), 16, 1.0, 1000, 1);
  const double tu = u.target_constant();
  const double tb = b.target_constant();
  const double mu = u.summary().median;
  const double mb = b.summary().median;
  return {std::abs(mu - tu) <= 0.1 && std::abs(mb - tb) <= 0.1 && std::abs(tb - 0.0662) <= 5e-4,
          fmt::format("fair median={:.4f} (target {:.4f}); biased median={:.4f} (target {:.4f})", mu, tu, mb, tb)};
}

Outcome diagonal_identity() {
  std::size_t mismatches = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    for (std::size_t n : {4u, 8u, 12u}) {
      for (const auto* m : {&fair(), &two_state()}) {
        OrbitStream a(*m, seed);
        OrbitStream b(*m, seed);
        const auto w = w_sum_recurrent(a, n, 0.0);
        const auto t = recurrence_time(b, n);
        ++total;
        if (w.time.censored || t.censored || w.w != static_cast<double>(t.value) || w.time.value != t.value) {
          ++mismatches;
        }
      }
    }
  }
  return {mismatches == 0, fmt::format("{} orbits, {} mismatches", total, mismatches)};
}

Outcome summability_decreases() {
  std::vector<double> est;
  bool exact = true;
  std::string detail;
  for (std::size_t n : {6u, 8u, 10u, 12u}) {
    const auto e = summability_integrand(fair(), n, 0.1, 200, 0, 1);
    exact = exact && e.exact_inner;
    est.push_back(e.estimate);
    detail += fmt::format("n={}: {:.5f}; ", n, e.estimate);
  }
  bool dec = true;
  for (std::size_t i = 1; i < est.size(); ++i) dec = dec && est[i] < est[i - 1];
  return {dec && exact, detail + (exact ? "exact inner" : "sampled inner")};
}

Outcome stream_loop() {
  const Word orbit = sample_orbit(two_state(), 1, 1'000'000);
  const std::vector<Symbol> seq(orbit.begin(), orbit.end());
  const std::vector<std::size_t> ns = {14};
  const double ow = ow_entropy_estimate(seq, ns, 1000, 1).rows.at(0).estimate_nats;

  const auto path = std::filesystem::temp_directory_path() / "hitstat_acceptance_constant.bin";
  std::ofstream(path, std::ios::binary) << std::string(1 << 16, 'x');
  const auto constant = ingest(path, SymbolMap::byte_identity());
  const std::vector<std::size_t> cn = {1, 8, 14};
  double const_max = 0.0;
  for (const auto& r : ow_entropy_estimate(constant, cn, 1000, 1).rows) const_max = std::max(const_max, r.estimate_nats);

  const Word bern = sample_orbit(biased(), 1, 1'000'000);
  const std::vector<Symbol> bseq(bern.begin(), bern.end());
  const double plug = plugin_renyi_estimate(bseq, 8, 1.0);

  const double h = shannon_entropy(two_state());
  return {std::abs(ow - 0.3835) <= 0.08 && std::abs(h - 0.3835) <= 5e-4 && const_max == 0.0 &&
              std::abs(plug - 0.5447) <= 0.05,
          fmt::format("OW n=14 {:.4f} (h={:.4f}); constant {}; plug-in R(1) n=8 {:.4f}", ow, h, const_max, plug)};
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "hitstat_acceptance_det";
  std::filesystem::create_directories(dir);
  {
    const Word orbit = sample_orbit(two_state(), 5, 200'000);
    std::ofstream out(dir / "bits.bin", std::ios::binary);
    std::uint8_t byte = 0;
    for (std::size_t i = 0; i < orbit.size(); ++i) {
      byte = static_cast<std::uint8_t>((byte << 1) | orbit[i]);
      if (i % 8 == 7) out.put(static_cast<char>(byte));
    }
  }
  const json fair_m = {{"kind", "bernoulli"}, {"p", {0.5, 0.5}}};
  const json markov_m = {{"kind", "markov"}, {"P", {{0.9, 0.1}, {0.2, 0.8}}}};
  const std::vector<json> configs = {
      {{"kind", "entrance-exponent"}, {"seed", 1}, {"model", markov_m}, {"n_list", {6, 10}}, {"N", 300}},
      {{"kind", "recurrence-exponent"}, {"seed", 1}, {"model", fair_m}, {"n", 10}, {"N", 300}},
      {{"kind", "survival"}, {"seed", 1}, {"model", fair_m}, {"word_length", 8}, {"N", 500}},
      {{"kind", "return-survival"}, {"seed", 1}, {"model", markov_m}, {"word", "0110"}, {"N", 500}},
      {{"kind", "kac"}, {"seed", 1}, {"model", markov_m}, {"max_length", 4}},
      {{"kind", "hlv"}, {"seed", 1}, {"model", fair_m}, {"word", "0110"}, {"m_max", 100}},
      {{"kind", "abadi-shape"}, {"seed", 1}, {"model", fair_m}, {"word", "0110"}},
      {{"kind", "theorem2"}, {"seed", 1}, {"model", fair_m}, {"n_list", {6, 8}}, {"N_z", 100}},
      {{"kind", "wns"}, {"seed", 1}, {"model", fair_m}, {"n", 10}, {"N", 300}, {"s", 1.0}},
      {{"kind", "renyi-exact"}, {"seed", 1}, {"model", markov_m}, {"s_list", {0.5, 1.0}}},
      {{"kind", "stream-estimate"}, {"seed", 1}, {"input", "bits.bin"}, {"symbol_map", "bit"}, {"n_list", {8, 12}},
       {"starts_per_n", 300}, {"renyi_s", {1.0}}, {"renyi_n", {6}}},
  };
  std::size_t differ = 0;
  std::string which;
  for (const auto& raw : configs) {
    const auto config = parse_config(raw, dir);
    const auto one = run_experiment(config, 1);
    const auto four = run_experiment(config, 4);
    const auto again = run_experiment(config, 1);
    if (one.rows != four.rows || one.rows != again.rows || one.rows.empty()) {
      ++differ;
      which += " " + config.kind;
    }
  }
  return {differ == 0, fmt::format("{} seeded kinds, {} differ{}", configs.size(), differ, which)};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "exact Renyi consistency", 1.0, renyi_consistency},
      {2, "Kac identity", 5.0, kac_identity},
      {3, "entrance/return integral identity", 5.0, integral_identity},
      {4, "exact survival vs enumeration", 30.0, oracle_agreement},
      {5, "exponential law of a long cylinder", 60.0, exponential_law},
      {6, "entrance exponent concentration", 300.0, exponent_concentration},
      {7, "W_n^s exponent", 600.0, wns_exponent},
      {8, "W_n^0 diagonal identity", 10.0, diagonal_identity},
      {9, "summability integrand decreases", 60.0, summability_decreases},
      {10, "stream estimator loop closure", 120.0, stream_loop},
      {11, "worker-count determinism", 60.0, determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  bool all_pass = true;
  for (const auto& c : criteria()) {
    if (only && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = out.pass && in_time;
    all_pass = all_pass && pass;
    fmt::print("AC{:<2} {} {}: {} [{:.2f}s / {:.0f}s{}]\n", c.id, pass ? "PASS" : "FAIL", c.name, out.detail, secs,
               c.time_limit_s, in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
