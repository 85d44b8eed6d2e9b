#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hitstat/error.hpp"
#include "hitstat/monte_carlo.hpp"

using namespace hitstat;

namespace {

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

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidSpec;
}

std::vector<double> grid(double step, double last) {
  std::vector<double> g;
  for (int i = 1; step * i <= last + 1e-12; ++i) g.push_back(step * i);
  return g;
}

bool same_samples(const ExponentSamples& a, const ExponentSamples& b) {
  if (a.samples().size() != b.samples().size()) return false;
  for (std::size_t i = 0; i < a.samples().size(); ++i) {
    const auto& x = a.samples()[i];
    const auto& y = b.samples()[i];
    if (x.index != y.index || !(x.time == y.time) || x.target != y.target || x.exponent != y.exponent) return false;
  }
  return true;
}

ExponentSamples slice(const ExponentSamples& all, std::size_t lo, std::size_t hi) {
  ExponentSamples out(all.n(), all.target_constant());
  for (std::size_t i = lo; i < hi; ++i) out.add(all.samples()[i]);
  return out;
}

// sup_t |G(t) - (1 - e^{-t})| for G the law of tau / 2, tau ~ Geometric(1/2) on {1, 2, ...}.
double geometric_half_vs_exponential() {
  double sup = 0.0;
  for (int m = 1; m <= 80; ++m) {
    const double t = 0.5 * m;
    const double e = 1.0 - std::exp(-t);
    const double left = 1.0 - std::pow(0.5, m - 1);
    const double right = 1.0 - std::pow(0.5, m);
    sup = std::max({sup, std::abs(left - e), std::abs(right - e)});
  }
  return sup;
}

}  // namespace

TEST_CASE("stats helpers") {
  CHECK(dkw_half_width(100, 0.05) == doctest::Approx(std::sqrt(std::log(40.0) / 200.0)));
  const auto s = summarize({4, 1, 3, 2, 5});
  CHECK(s.count == 5);
  CHECK(s.median == 3.0);
  CHECK(s.mean == 3.0);
  CHECK(s.q25 == 2.0);
  CHECK(s.q75 == 4.0);
  CHECK(s.stddev == doctest::Approx(std::sqrt(2.5)));
  const std::vector<double> sorted = {0.0, 10.0};
  CHECK(quantile_sorted(sorted, 0.3) == doctest::Approx(3.0));

  // One point at the median of Exp(1): sup distance 1/2.
  const std::vector<double> one = {std::log(2.0)};
  CHECK(ks_unit_exponential(one).statistic == doctest::Approx(0.5));
  // A censored draw counts toward N but never enters the CDF.
  const std::vector<double> cens = {std::log(2.0), std::numeric_limits<double>::infinity()};
  const auto k = ks_unit_exponential(cens);
  CHECK(k.sample_count == 2);
  CHECK(k.statistic == doctest::Approx(0.5));
  CHECK(k.reference == "exp(1)");
}

TEST_CASE("same seed, any worker count, same samples") {
  const auto a = entrance_exponent_samples(fair(), 8, 300, 42);
  const auto b = entrance_exponent_samples(fair(), 8, 300, 42);
  CHECK(same_samples(a, b));
  SamplerOptions four;
  four.workers = 4;
  CHECK(same_samples(a, entrance_exponent_samples(fair(), 8, 300, 42, four)));
  CHECK(same_samples(recurrence_exponent_samples(two_state(), 8, 300, 5),
                     recurrence_exponent_samples(two_state(), 8, 300, 5, four)));
  CHECK(same_samples(wns_exponent_samples(biased(), 8, 1.0, 200, 5),
                     wns_exponent_samples(biased(), 8, 1.0, 200, 5, four)));
  CHECK_FALSE(same_samples(a, entrance_exponent_samples(fair(), 8, 300, 43)));
}

TEST_CASE("merging disjoint ranges") {
  const auto all = entrance_exponent_samples(two_state(), 6, 90, 3);
  const auto a = slice(all, 0, 30);
  const auto b = slice(all, 30, 60);
  const auto c = slice(all, 60, 90);
  const auto left = a.merge(b).merge(c);
  const auto right = a.merge(b.merge(c));
  const auto shuffled = c.merge(a).merge(b);
  CHECK(same_samples(left, all));
  CHECK(same_samples(right, all));
  CHECK(same_samples(shuffled, all));
  CHECK(left.summary().median == all.summary().median);
  CHECK(code_of([&] { a.merge(slice(all, 20, 40)); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { a.merge(ExponentSamples(7, all.target_constant())); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("one-symbol alphabet: every time is 1") {
  const auto one = MeasureModel::bernoulli({1.0});
  for (const auto& s : {entrance_exponent_samples(one, 5, 50, 1), recurrence_exponent_samples(one, 5, 50, 1)}) {
    CHECK(s.target_constant() == 0.0);
    CHECK(s.censored_count() == 0);
    for (const auto& x : s.samples()) {
      CHECK(x.time.value == 1);
      CHECK(x.exponent == 0.0);
    }
  }
}

TEST_CASE("fair coin exponents at n = 12") {
  const double h = std::log(2.0);
  const auto ent = entrance_exponent_samples(fair(), 12, 2000, 1);
  const auto rec = recurrence_exponent_samples(fair(), 12, 2000, 1);
  CHECK(ent.target_constant() == doctest::Approx(h).epsilon(1e-14));
  CHECK(std::abs(ent.summary().median - h) <= 0.1);
  CHECK(std::abs(rec.summary().median - h) <= 0.1);
  CHECK(ent.censored_count() == 0);
}

TEST_CASE("recurrence and entrance exponents share their limit") {
  const auto ent = entrance_exponent_samples(fair(), 14, 2000, 7);
  const auto rec = recurrence_exponent_samples(fair(), 14, 2000, 7);
  CHECK(std::abs(ent.summary().mean - rec.summary().mean) <= 0.05);
}

TEST_CASE("rescaled entrance law of a long word is close to exp(1)") {
  const Word b = random_word(fair(), 1, 10);
  CHECK(b.size() == 10);
  const auto g = grid(0.05, 5.0);
  const auto emp = empirical_survival(fair(), b, 5000, g, 1);
  CHECK(emp.ks.statistic < 0.05);
  CHECK(emp.ks.sample_count == 5000);
  CHECK(emp.curve.sample_count == 5000u);

  const auto m_max = emp.curve.m.back();
  const auto exact = exact_survival(ProductChain::build(fair(), b, Conditioning::Entrance), m_max);
  CHECK(max_curve_gap(emp.curve, exact) <= dkw_half_width(5000, 0.001));
}

TEST_CASE("a single-symbol target is geometric, not exponential") {
  const auto g = grid(0.05, 5.0);
  const auto emp = empirical_survival(fair(), Word::parse("1"), 5000, g, 2);
  const double closed = geometric_half_vs_exponential();
  CHECK(closed == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-12));
  CHECK(emp.ks.statistic > 0.11);
  CHECK(std::abs(emp.ks.statistic - closed) <= dkw_half_width(5000, 0.001));
}

TEST_CASE("empirical return law") {
  const auto g = grid(0.1, 5.0);
  for (const char* text : {"0110", "111"}) {
    CAPTURE(text);
    const Word b = Word::parse(text);
    const auto emp = empirical_return_survival(two_state(), b, 4000, g, 11);
    CHECK(emp.curve.kind == Conditioning::Return);
    const auto exact = exact_survival(ProductChain::build(two_state(), b, Conditioning::Return), emp.curve.m.back());
    CHECK(max_curve_gap(emp.curve, exact) <= dkw_half_width(4000, 0.001));
    const double mu = log_cylinder_measure(two_state(), b).probability();
    CHECK(std::abs(emp.mean_time - 1.0 / mu) <= 3.0 * emp.mean_time_stderr);
  }
  CHECK(code_of([&] { empirical_return_survival(fair(), Word{}, 10, g, 1); }) == ErrorCode::EmptyWord);
  const auto gap = MeasureModel::markov({{0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}});
  CHECK(code_of([&] { empirical_survival(gap, Word::parse("01"), 10, g, 1); }) == ErrorCode::ZeroMeasureTarget);
}

TEST_CASE("summability integrand") {
  const auto a = summability_integrand(fair(), 8, 0.05, 200, 0, 9);
  const auto b = summability_integrand(fair(), 8, 0.2, 200, 0, 9);
  CHECK(a.exact_inner);
  for (std::size_t j = 0; j < a.inner.size(); ++j) CHECK(b.inner[j] <= a.inner[j]);
  CHECK(b.estimate <= a.estimate);
  const auto e8 = summability_integrand(fair(), 8, 0.1, 200, 0, 1);
  const auto e12 = summability_integrand(fair(), 12, 0.1, 200, 0, 1);
  CHECK(e12.estimate < e8.estimate);
  CHECK(e8.standard_error > 0.0);
  CHECK(code_of([&] { summability_integrand(fair(), 8, 0.0, 10, 0, 1); }) == ErrorCode::InvalidArgument);

  // For the fair coin every z has the same measure, so each inner value is
  // a survival probability P(tau >= 2^8 e^{0.8}) for a word of length 8.
  const Word z = random_word(fair(), 1, 8);
  const auto m = static_cast<std::uint64_t>(std::ceil(std::exp(0.8) * 256.0));
  const auto curve = exact_survival(ProductChain::build(fair(), z, Conditioning::Entrance), m - 1);
  CHECK(e8.inner[0] == doctest::Approx(curve.survival.back()).epsilon(1e-12));
}

TEST_CASE("W sums") {
  CHECK(wns_target_constant(fair(), 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(wns_target_constant(biased(), 0.0) == doctest::Approx(shannon_entropy(biased())));
  CHECK(wns_target_constant(biased(), 1.0) == doctest::Approx(0.0662).epsilon(1e-3));

  // s = 0 on the diagonal is the recurrence time.
  for (std::size_t n : {4u, 8u}) {
    const auto w = wns_exponent_samples(two_state(), n, 0.0, 200, 3, {}, true);
    const auto r = recurrence_exponent_samples(two_state(), n, 200, 3);
    REQUIRE(w.samples().size() == r.samples().size());
    for (std::size_t j = 0; j < w.samples().size(); ++j) {
      CHECK(w.samples()[j].time == r.samples()[j].time);
      CHECK(w.samples()[j].exponent == doctest::Approx(r.samples()[j].exponent).epsilon(1e-12));
    }
  }

  const auto fair1 = wns_exponent_samples(fair(), 12, 1.0, 400, 1);
  CHECK(std::abs(fair1.summary().median) <= 0.1);
  CHECK(code_of([&] { wns_exponent_samples(fair(), 8, -1.0, 10, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("exceedance fractions on the Markov model") {
  const auto s = entrance_exponent_samples(two_state(), 12, 1000, 4);
  CHECK(s.censored_fraction() <= kMaxCensoredFraction);
  const double h = shannon_entropy(two_state());
  CHECK(s.fraction_below(h - 0.5) <= 0.05);
  CHECK(s.fraction_above(h + 0.5) <= 0.10);
}
