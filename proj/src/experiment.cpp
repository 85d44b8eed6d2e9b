#include "hitstat/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "hitstat/error.hpp"
#include "hitstat/exact.hpp"
#include "hitstat/model_io.hpp"
#include "hitstat/monte_carlo.hpp"
#include "hitstat/stats.hpp"
#include "hitstat/stream_estimator.hpp"

#ifndef HITSTAT_VERSION
#define HITSTAT_VERSION "0.0.0"
#endif

namespace hitstat {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

/// Typed access to one JSON object; remembers which keys were read so
/// leftovers (typos) can be rejected.
class Fields {
 public:
  explicit Fields(const json& obj) : obj_(obj) {
    if (!obj.is_object()) bad("experiment config must be a JSON object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::uint64_t integer(const std::string& key, std::optional<std::uint64_t> fallback, std::uint64_t min = 1) {
    const json* v = find(key);
    if (!v) {
      if (!fallback) bad("missing required field '" + key + "'");
      return *fallback;
    }
    return as_integer(*v, key, min);
  }

  double real(const std::string& key, std::optional<double> fallback) {
    const json* v = find(key);
    if (!v) {
      if (!fallback) bad("missing required field '" + key + "'");
      return *fallback;
    }
    if (!v->is_number()) bad("field '" + key + "' must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) bad("field '" + key + "' must be finite");
    return x;
  }

  std::optional<double> optional_real(const std::string& key) {
    if (!has(key)) {
      used_.insert(key);
      return std::nullopt;
    }
    return real(key, std::nullopt);
  }

  bool flag(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) bad("field '" + key + "' must be true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key, std::optional<std::string> fallback) {
    const json* v = find(key);
    if (!v) {
      if (!fallback) bad("missing required field '" + key + "'");
      return *fallback;
    }
    if (!v->is_string()) bad("field '" + key + "' must be a string");
    return v->get<std::string>();
  }

  std::vector<std::size_t> integers(const std::string& key, std::uint64_t min = 1) {
    const json* v = find(key);
    if (!v || !v->is_array() || v->empty()) bad("field '" + key + "' must be a non-empty array of integers");
    std::vector<std::size_t> out;
    for (const auto& x : *v) out.push_back(static_cast<std::size_t>(as_integer(x, key, min)));
    return out;
  }

  std::vector<double> reals(const std::string& key) {
    const json* v = find(key);
    if (!v || !v->is_array() || v->empty()) bad("field '" + key + "' must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) bad("field '" + key + "' must contain finite numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  /// Either a scalar `key` or a list `list_key`, not both.
  std::vector<std::size_t> one_or_many(const std::string& key, const std::string& list_key,
                                       std::optional<std::vector<std::size_t>> fallback = std::nullopt) {
    if (has(key) && has(list_key)) bad("give either '" + key + "' or '" + list_key + "', not both");
    if (has(list_key)) return integers(list_key);
    if (has(key)) return {static_cast<std::size_t>(integer(key, std::nullopt))};
    used_.insert(key);
    used_.insert(list_key);
    if (!fallback) bad("missing required field '" + key + "' or '" + list_key + "'");
    return *fallback;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!used_.count(key)) bad("unknown field '" + key + "'");
    }
  }

 private:
  static std::uint64_t as_integer(const json& v, const std::string& key, std::uint64_t min) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      bad("field '" + key + "' must be a non-negative integer");
    }
    const auto x = v.get<std::uint64_t>();
    if (x < min) bad(fmt::format("field '{}' must be >= {}", key, min));
    return x;
  }

  const json& obj_;
  std::set<std::string> used_;
};

Word word_from_json(const json& v, const std::string& key) {
  if (v.is_string()) {
    try {
      return Word::parse(v.get<std::string>());
    } catch (const Error& e) {
      throw Error(e.code(), "field '" + key + "': " + e.what());
    }
  }
  if (v.is_array()) {
    Word w;
    for (const auto& x : v) {
      if (!x.is_number_unsigned()) bad("field '" + key + "' must list non-negative integer symbols");
      w.push_back(x.get<Symbol>());
    }
    if (w.empty()) throw Error(ErrorCode::EmptyWord, "field '" + key + "' is an empty word");
    return w;
  }
  bad("field '" + key + "' must be a string like \"0110\" or an array of symbols");
}

void check_word(const MeasureModel& model, const Word& w) {
  if (w.empty()) throw Error(ErrorCode::EmptyWord, "target word is empty");
  for (Symbol a : w) model.check_symbol(a);
}

void require_positive(const MeasureModel& model, const Word& w) {
  check_word(model, w);
  if (log_cylinder_measure(model, w).is_zero()) {
    throw Error(ErrorCode::ZeroMeasureTarget, "target " + w.to_string() + " has measure zero");
  }
}

/// "word" (explicit) or "word_length" (drawn from the model with the seed).
Word single_word(Fields& f, const MeasureModel& model, std::uint64_t seed) {
  if (f.has("word") && f.has("word_length")) bad("give either 'word' or 'word_length', not both");
  Word w;
  if (f.has("word")) {
    w = word_from_json(*f.find("word"), "word");
  } else if (f.has("word_length")) {
    w = random_word(model, seed, f.integer("word_length", std::nullopt));
  } else {
    bad("missing required field 'word' or 'word_length'");
  }
  require_positive(model, w);
  return w;
}

/// All positive-measure words of length 1..max_length over a finite alphabet.
std::vector<Word> all_words(const MeasureModel& model, std::size_t max_length) {
  const auto k = model.alphabet_size();
  if (!k) bad("'max_length' needs a finite alphabet");
  if (std::pow(static_cast<double>(*k), static_cast<double>(max_length)) > 1e6) {
    throw Error(ErrorCode::BudgetExceeded, "too many words for 'max_length'");
  }
  std::vector<Word> out;
  for (std::size_t len = 1; len <= max_length; ++len) {
    std::vector<Symbol> digits(len, 0);
    while (true) {
      Word w(digits);
      if (!log_cylinder_measure(model, w).is_zero()) out.push_back(w);
      std::size_t i = len;
      while (i > 0 && digits[i - 1] + 1 == *k) digits[--i] = 0;
      if (i == 0) break;
      ++digits[i - 1];
    }
  }
  return out;
}

std::vector<double> grid(Fields& f, double t_max, double t_step) {
  if (f.has("t_grid") && (f.has("t_max") || f.has("t_step"))) bad("give either 't_grid' or 't_max'/'t_step'");
  std::vector<double> out;
  if (f.has("t_grid")) {
    out = f.reals("t_grid");
  } else {
    t_max = f.real("t_max", t_max);
    t_step = f.real("t_step", t_step);
    if (!(t_step > 0.0) || !(t_max > 0.0)) bad("'t_max' and 't_step' must be > 0");
    const auto steps = static_cast<std::size_t>(std::floor(t_max / t_step + 1e-9));
    for (std::size_t i = 0; i <= steps; ++i) out.push_back(static_cast<double>(i) * t_step);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0.0) bad("t-grid values must be >= 0");
    if (i > 0 && out[i] <= out[i - 1]) bad("t-grid must be strictly increasing");
  }
  return out;
}

CapPolicy cap_policy(Fields& f) {
  if (f.has("cap") && f.has("cap_multiplier")) bad("give either 'cap' or 'cap_multiplier', not both");
  if (f.has("cap")) return CapPolicy(f.integer("cap", std::nullopt));
  const double mult = f.real("cap_multiplier", 100.0);
  if (!(mult > 0.0)) bad("'cap_multiplier' must be > 0");
  return CapPolicy::scaled(mult);
}

std::vector<std::size_t> default_renyi_lengths(const MeasureModel& model) {
  std::vector<std::size_t> out;
  const auto k = model.alphabet_size();
  for (std::size_t n = 1; n <= 14; ++n) {
    if (model.kind() == ModelKind::Bernoulli && std::pow(static_cast<double>(*k), static_cast<double>(n)) > 1e6) break;
    out.push_back(n);
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

const MeasureModel& model_of(const ExperimentConfig& c) { return *c.model; }

bool within(double value, const Acceptance& a) { return !a.tolerance || value <= *a.tolerance; }

void settle(Report& r, const std::optional<Acceptance>& acceptance, bool passed, std::string detail) {
  if (!acceptance) return;
  r.acceptance_passed = passed;
  r.acceptance_detail = std::move(detail);
}

// ---------------------------------------------------------------------------

Report run_exponent(const ExperimentConfig& c, const ExponentParams& p, unsigned workers) {
  const auto& model = model_of(c);
  Report r;
  const bool wns = c.kind == "wns";
  r.rows = wns ? "n,sample,target,time,censored,log_value,exponent\n" : "n,sample,target,time,censored,exponent\n";
  json per_n = json::array();
  double worst = 0.0;
  for (std::size_t n : p.n_list) {
    SamplerOptions opts{p.cap, workers};
    ExponentSamples samples = c.kind == "entrance-exponent"   ? entrance_exponent_samples(model, n, p.count, c.seed, opts)
                              : c.kind == "recurrence-exponent" ? recurrence_exponent_samples(model, n, p.count, c.seed, opts)
                                                                : wns_exponent_samples(model, n, p.s, p.count, c.seed, opts,
                                                                                       p.diagonal);
    for (const auto& s : samples.samples()) {
      r.rows += fmt::format("{},{},{},{},{}", n, s.index, csv_field(s.target.to_string()), s.time.value,
                            s.time.censored ? 1 : 0);
      if (wns) r.rows += "," + (s.time.censored ? std::string() : num(s.log_value));
      r.rows += "," + (s.time.censored ? std::string() : num(s.exponent)) + "\n";
    }
    const auto sum = samples.summary();
    const double target = samples.target_constant();
    const double below = samples.fraction_below(target - p.epsilon);
    const double above = samples.fraction_above(target + p.epsilon);
    worst = std::max(worst, std::abs(sum.median - target));
    per_n.push_back({{"n", n},
                     {"count", samples.samples().size()},
                     {"censored", samples.censored_count()},
                     {"censored_fraction", samples.censored_fraction()},
                     {"mean", sum.mean},
                     {"stddev", sum.stddev},
                     {"median", sum.median},
                     {"q05", sum.q05},
                     {"q25", sum.q25},
                     {"q75", sum.q75},
                     {"q95", sum.q95},
                     {"target_constant", target},
                     {"median_error", sum.median - target},
                     {"epsilon", p.epsilon},
                     {"fraction_below", below},
                     {"fraction_above", above},
                     {"fraction_outside", below + above}});
  }
  r.summary = {{"per_n", per_n}, {"max_abs_median_error", worst}};
  if (c.acceptance) {
    settle(r, c.acceptance, within(worst, *c.acceptance),
           fmt::format("max |median - target| = {:.6g}", worst));
  }
  return r;
}

Report run_survival(const ExperimentConfig& c, const SurvivalParams& p, unsigned workers) {
  const auto& model = model_of(c);
  const bool ret = c.kind == "return-survival";
  SamplerOptions opts{p.cap, workers};
  auto emp = ret ? empirical_return_survival(model, p.word, p.count, p.t_grid, c.seed, opts)
                 : empirical_survival(model, p.word, p.count, p.t_grid, c.seed, opts);
  const auto chain = ProductChain::build(model, p.word, ret ? Conditioning::Return : Conditioning::Entrance);
  const std::uint64_t m_max = *std::max_element(emp.curve.m.begin(), emp.curve.m.end());
  const auto exact = exact_survival(chain, std::max<std::uint64_t>(m_max, 1));

  SurvivalCurve exact_on_grid;
  exact_on_grid.kind = emp.curve.kind;
  exact_on_grid.target_measure = emp.curve.target_measure;
  exact_on_grid.m = emp.curve.m;
  exact_on_grid.t = emp.curve.t;
  for (auto m : emp.curve.m) exact_on_grid.survival.push_back(exact.survival[m]);

  Report r;
  r.rows = emp.curve.to_csv(true) + exact_on_grid.to_csv(false);
  const double gap = max_curve_gap(emp.curve, exact);
  const double band = dkw_half_width(p.count, p.alpha);
  const double mu = emp.curve.target_measure;
  r.summary = {{"word", p.word.to_string()},
               {"target_measure", mu},
               {"sample_count", p.count},
               {"censored", emp.censored},
               {"ks_statistic", emp.ks.statistic},
               {"ks_reference", emp.ks.reference},
               {"dkw_alpha", p.alpha},
               {"dkw_half_width", band},
               {"max_gap_to_exact", gap},
               {"within_dkw_band", gap <= band},
               {"mean_time", emp.mean_time},
               {"mean_time_stderr", emp.mean_time_stderr}};
  if (ret) {
    const double expected = 1.0 / mu;
    const double z = emp.mean_time_stderr > 0 ? (emp.mean_time - expected) / emp.mean_time_stderr : 0.0;
    r.summary["expected_return"] = expected;
    r.summary["mean_z_score"] = z;
    if (c.acceptance) {
      const double k = c.acceptance->tolerance.value_or(3.0);
      settle(r, c.acceptance, std::abs(z) <= k, fmt::format("|mean - 1/mu| / stderr = {:.4g}", std::abs(z)));
    }
  } else if (c.acceptance) {
    const bool ok = within(emp.ks.statistic, *c.acceptance) && gap <= band;
    settle(r, c.acceptance, ok, fmt::format("ks = {:.6g}, gap = {:.6g}, band = {:.6g}", emp.ks.statistic, gap, band));
  }
  return r;
}

Report run_kac(const ExperimentConfig& c, const WordListParams& p) {
  const auto& model = model_of(c);
  Report r;
  r.rows = "word,target_measure,expected_return,reciprocal_measure,kac_residual\n";
  double worst = 0.0;
  json one;
  for (const auto& w : p.words) {
    const double mu = log_cylinder_measure(model, w).probability();
    const double e = exact_mean_return(model, w, p.rel_tol);
    const double residual = std::abs(e * mu - 1.0);
    worst = std::max(worst, residual);
    r.rows += fmt::format("{},{},{},{},{}\n", csv_field(w.to_string()), num(mu), num(e), num(1.0 / mu), num(residual));
    one = {{"word", w.to_string()}, {"target_measure", mu}, {"expected_return", e}, {"kac_residual", residual}};
  }
  r.summary = {{"words_checked", p.words.size()}, {"max_kac_residual", worst}, {"rel_tol", p.rel_tol}};
  if (p.words.size() == 1) r.summary.update(one);
  if (c.acceptance) {
    const double tol = c.acceptance->tolerance.value_or(1e-9);
    settle(r, c.acceptance, worst <= tol, fmt::format("max |E[tau] mu - 1| = {:.3g}", worst));
  }
  return r;
}

Report run_integral_identity(const ExperimentConfig& c, const WordListParams& p) {
  const auto& model = model_of(c);
  Report r;
  r.rows = "word,k,entrance,integral,residual\n";
  double worst = 0.0;
  json per_word = json::array();
  for (const auto& w : p.words) {
    const auto h = integral_identity_residual(model, w, p.m_max);
    const auto name = csv_field(w.to_string());
    for (std::size_t i = 0; i < h.entrance.size(); ++i) {
      r.rows += fmt::format("{},{},{},{},{}\n", name, i + 1, num(h.entrance[i]), num(h.integral[i]),
                            num(std::abs(h.entrance[i] - h.integral[i])));
    }
    worst = std::max(worst, h.max_residual);
    per_word.push_back({{"word", w.to_string()},
                        {"target_measure", h.target_measure},
                        {"mean_return", h.mean_return},
                        {"max_residual", h.max_residual},
                        {"worst_k", h.worst_k}});
  }
  r.summary = {{"m_max", p.m_max}, {"per_word", per_word}, {"max_residual", worst}};
  if (c.acceptance) {
    const double tol = c.acceptance->tolerance.value_or(1e-9);
    settle(r, c.acceptance, worst <= tol, fmt::format("max residual = {:.3g}", worst));
  }
  return r;
}

Report run_abadi(const ExperimentConfig& c, const AbadiParams& p) {
  const auto& model = model_of(c);
  // F(0) = 1 says nothing about the tail
  std::vector<double> grid;
  for (double t : p.t_grid) {
    if (t > 0.0) grid.push_back(t);
  }
  const auto a = abadi_shape_check(model, p.word, grid);
  Report r;
  r.rows = "t,survival,bound\n";
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    r.rows += fmt::format("{},{},{}\n", num(a.t[i]), num(a.survival[i]), num(std::exp(-a.rate * a.t[i]) + a.floor));
  }
  r.summary = {{"word", p.word.to_string()},
               {"target_measure", log_cylinder_measure(model, p.word).probability()},
               {"rate", a.rate},
               {"intercept", a.intercept},
               {"floor", a.floor},
               {"bound_holds", a.bound_holds},
               {"fitted_points", a.fitted_points}};
  if (c.acceptance) {
    const bool ok = a.bound_holds && a.rate > 0.0;
    settle(r, c.acceptance, ok, fmt::format("rate = {:.6g}, bound_holds = {}", a.rate, a.bound_holds));
  }
  return r;
}

Report run_summability(const ExperimentConfig& c, const SummabilityParams& p, unsigned workers) {
  const auto& model = model_of(c);
  Report r;
  r.rows = "n,epsilon,estimate,stderr,exact_inner\n";
  json per_n = json::array();
  std::vector<double> estimates;
  for (std::size_t n : p.n_list) {
    SummabilityOptions opts;
    opts.workers = workers;
    opts.exact_budget = p.exact_budget;
    const auto e = summability_integrand(model, n, p.epsilon, p.outer_count, p.inner_count, c.seed, opts);
    r.rows += fmt::format("{},{},{},{},{}\n", n, num(p.epsilon), num(e.estimate), num(e.standard_error),
                          e.exact_inner ? 1 : 0);
    estimates.push_back(e.estimate);
    per_n.push_back({{"n", n}, {"estimate", e.estimate}, {"stderr", e.standard_error}, {"exact_inner", e.exact_inner}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < estimates.size(); ++i) decreasing = decreasing && estimates[i] < estimates[i - 1];
  r.summary = {{"epsilon", p.epsilon}, {"per_n", per_n}, {"strictly_decreasing", decreasing}};
  if (c.acceptance) settle(r, c.acceptance, decreasing, decreasing ? "estimates decrease in n" : "not decreasing");
  return r;
}

Report run_renyi(const ExperimentConfig& c, const RenyiParams& p) {
  const auto& model = model_of(c);
  Report r;
  r.rows = "s,n,log_z,slope,renyi,difference\n";
  json by_s = json::array();
  double worst = 0.0;
  for (double s : p.s_list) {
    const double renyi = renyi_entropy(model, s);
    double last = 0.0;
    for (std::size_t n : p.n_list) {
      const double log_z = partition_sum_exact(model, n, s);
      const double slope = -log_z / (s * static_cast<double>(n));
      last = slope - renyi;
      r.rows += fmt::format("{},{},{},{},{},{}\n", num(s), n, num(log_z), num(slope), num(renyi), num(last));
    }
    worst = std::max(worst, std::abs(last));
    by_s.push_back({{"s", s}, {"renyi", renyi}, {"final_difference", last}});
  }
  r.summary = {{"shannon_entropy", shannon_entropy(model)}, {"by_s", by_s}, {"max_final_difference", worst}};
  if (p.s_list.size() == 1) r.summary["renyi"] = by_s[0]["renyi"];
  if (c.acceptance) {
    settle(r, c.acceptance, within(worst, *c.acceptance), fmt::format("max |slope - R(s)| at largest n = {:.3g}", worst));
  }
  return r;
}

Report run_stream(const ExperimentConfig& c, const StreamParams& p, unsigned workers) {
  const auto map = SymbolMap::from_name(p.symbol_map);
  const auto seq = ingest(p.input, map);
  EstimateSeries series;
  if (!p.n_list.empty()) {
    RecurrenceEstimatorOptions opts;
    opts.min_length_multiple = p.min_length_multiple;
    opts.max_censored_fraction = p.max_censored_fraction;
    opts.workers = workers;
    series = ow_entropy_estimate(seq, p.n_list, p.starts_per_n, c.seed, opts);
  }
  for (std::size_t n : p.renyi_n) {
    const auto table = ngram_counts(seq, n);
    for (double s : p.renyi_s) {
      EstimateRow row;
      row.method = "plugin-renyi";
      row.n = n;
      row.s = s;
      row.estimate_nats = plugin_renyi_estimate(table, s);
      row.sample_count = table.total;
      series.rows.push_back(row);
    }
  }
  Report r;
  r.rows = series.to_csv(true);
  json rows = json::array();
  double worst_ow = 0.0, worst_plugin = 0.0;
  for (const auto& row : series.rows) {
    json j = {{"method", row.method}, {"n", row.n}, {"estimate_nats", row.estimate_nats},
              {"stderr", row.standard_error}, {"censored_fraction", row.censored_fraction}};
    if (row.s) j["s"] = *row.s;
    if (!row.s && p.reference) worst_ow = std::max(worst_ow, std::abs(row.estimate_nats - *p.reference));
    if (row.s && p.renyi_reference) worst_plugin = std::max(worst_plugin, std::abs(row.estimate_nats - *p.renyi_reference));
    rows.push_back(j);
  }
  r.summary = {{"input", p.input.filename().string()},
               {"symbol_map", p.symbol_map},
               {"sequence_length", seq.size()},
               {"estimates", rows}};
  if (p.reference) r.summary["reference"] = *p.reference;
  if (p.renyi_reference) r.summary["renyi_reference"] = *p.renyi_reference;
  if (c.acceptance) {
    const double worst = std::max(worst_ow, worst_plugin);
    settle(r, c.acceptance, within(worst, *c.acceptance),
           fmt::format("max |estimate - reference| = {:.4g}", worst));
  }
  return r;
}

json targets(const ExperimentConfig& c) {
  json t = json::object();
  if (!c.model) return t;
  const auto& model = *c.model;
  t["shannon_entropy"] = shannon_entropy(model);
  if (const auto* e = std::get_if<ExponentParams>(&c.params); e && c.kind == "wns") {
    if (e->s > 0) t["renyi"] = renyi_entropy(model, e->s);
    t["wns_limit"] = wns_target_constant(model, e->s);
  }
  if (const auto* rp = std::get_if<RenyiParams>(&c.params)) {
    json by_s = json::object();
    for (double s : rp->s_list) by_s[num(s)] = renyi_entropy(model, s);
    t["renyi"] = by_s;
  }
  const Word* w = nullptr;
  if (const auto* sp = std::get_if<SurvivalParams>(&c.params)) w = &sp->word;
  if (const auto* ap = std::get_if<AbadiParams>(&c.params)) w = &ap->word;
  if (w) {
    const double mu = log_cylinder_measure(model, *w).probability();
    t["target_word"] = w->to_string();
    t["target_measure"] = mu;
    t["expected_return"] = 1.0 / mu;
  }
  return t;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {
      "entrance-exponent", "recurrence-exponent", "survival", "return-survival", "kac",           "hlv",
      "abadi-shape",       "theorem2",            "wns",      "renyi-exact",     "stream-estimate"};
  return kinds;
}

ExperimentConfig parse_config(const json& raw, const std::filesystem::path& base_dir) {
  Fields f(raw);
  ExperimentConfig c;
  c.raw = raw;
  c.kind = f.text("kind", std::nullopt);
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) bad("unknown experiment kind '" + c.kind + "'");
  c.seed = f.integer("seed", std::nullopt, 0);
  f.text("description", std::string());
  if (f.has("outdir")) c.outdir = base_dir / f.text("outdir", std::nullopt);

  if (f.has("acceptance")) {
    const json* a = f.find("acceptance");
    Acceptance acc;
    if (a->is_object()) {
      Fields af(*a);
      acc.tolerance = af.optional_real("tolerance");
      af.reject_unknown();
    } else if (!(a->is_boolean() && a->get<bool>())) {
      bad("'acceptance' must be true or an object {\"tolerance\": number}");
    }
    c.acceptance = acc;
  }

  if (c.kind != "stream-estimate") {
    if (f.has("model") == f.has("model_file")) bad("give exactly one of 'model' or 'model_file'");
    if (f.has("model")) {
      c.model = model_from_json(*f.find("model"));
    } else {
      c.model = load_model_file(base_dir / f.text("model_file", std::nullopt));
    }
  }

  if (c.kind == "entrance-exponent" || c.kind == "recurrence-exponent" || c.kind == "wns") {
    ExponentParams p;
    p.n_list = f.one_or_many("n", "n_list");
    p.count = f.integer("N", std::nullopt);
    p.cap = cap_policy(f);
    p.epsilon = f.real("epsilon", 0.15);
    if (c.kind == "wns") {
      p.s = f.real("s", std::nullopt);
      if (p.s < 0.0) throw Error(ErrorCode::InvalidArgument, "'s' must be >= 0");
      p.diagonal = f.flag("diagonal", false);
    }
    c.params = p;
  } else if (c.kind == "survival" || c.kind == "return-survival") {
    SurvivalParams p;
    p.word = single_word(f, *c.model, c.seed);
    p.count = f.integer("N", std::nullopt);
    p.t_grid = grid(f, 5.0, 0.05);
    p.cap = cap_policy(f);
    p.alpha = f.real("alpha", 0.001);
    if (!(p.alpha > 0.0 && p.alpha < 1.0)) bad("'alpha' must lie in (0, 1)");
    c.params = p;
  } else if (c.kind == "kac" || c.kind == "hlv") {
    WordListParams p;
    const int given = f.has("word") + f.has("words") + f.has("max_length");
    if (given != 1) bad("give exactly one of 'word', 'words' or 'max_length'");
    if (f.has("word")) {
      p.words.push_back(word_from_json(*f.find("word"), "word"));
    } else if (f.has("words")) {
      const json* ws = f.find("words");
      if (!ws->is_array() || ws->empty()) bad("'words' must be a non-empty array");
      for (const auto& w : *ws) p.words.push_back(word_from_json(w, "words"));
    } else {
      p.words = all_words(*c.model, f.integer("max_length", std::nullopt));
    }
    for (const auto& w : p.words) require_positive(*c.model, w);
    p.rel_tol = f.real("rel_tol", 1e-12);
    if (!(p.rel_tol > 0.0)) bad("'rel_tol' must be > 0");
    if (c.kind == "hlv") p.m_max = f.integer("m_max", 500);
    c.params = p;
  } else if (c.kind == "abadi-shape") {
    AbadiParams p;
    p.word = single_word(f, *c.model, c.seed);
    p.t_grid = grid(f, 5.0, 0.25);
    c.params = p;
  } else if (c.kind == "theorem2") {
    SummabilityParams p;
    p.n_list = f.one_or_many("n", "n_list");
    p.epsilon = f.real("epsilon", 0.1);
    if (!(p.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "'epsilon' must be > 0");
    p.outer_count = f.integer("N_z", std::nullopt);
    p.inner_count = f.integer("N_x", 0, 0);
    p.exact_budget = f.real("exact_budget", 5e8);
    c.params = p;
  } else if (c.kind == "renyi-exact") {
    RenyiParams p;
    if (f.has("s") && f.has("s_list")) bad("give either 's' or 's_list', not both");
    p.s_list = f.has("s_list") ? f.reals("s_list") : std::vector<double>{f.real("s", std::nullopt)};
    for (double s : p.s_list) {
      if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveS, "Renyi parameter s must be > 0");
    }
    p.n_list = f.one_or_many("n", "n_list", default_renyi_lengths(*c.model));
    c.params = p;
  } else {
    StreamParams p;
    p.input = base_dir / f.text("input", std::nullopt);
    p.symbol_map = f.text("symbol_map", "byte");
    SymbolMap::from_name(p.symbol_map);
    if (f.has("n") || f.has("n_list")) p.n_list = f.one_or_many("n", "n_list");
    p.starts_per_n = f.integer("starts_per_n", 1000);
    p.min_length_multiple = f.integer("min_length_multiple", 64);
    p.max_censored_fraction = f.real("max_censored_fraction", 0.05);
    if (f.has("renyi_s") != f.has("renyi_n")) bad("'renyi_s' and 'renyi_n' go together");
    if (f.has("renyi_s")) {
      p.renyi_s = f.reals("renyi_s");
      for (double s : p.renyi_s) {
        if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveS, "Renyi parameter s must be > 0");
      }
      p.renyi_n = f.integers("renyi_n");
    }
    if (p.n_list.empty() && p.renyi_n.empty()) bad("stream-estimate needs 'n'/'n_list' or 'renyi_s'/'renyi_n'");
    p.reference = f.optional_real("reference");
    p.renyi_reference = f.optional_real("renyi_reference");
    c.params = p;
  }
  f.reject_unknown();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read config " + path.string());
  json raw;
  try {
    in >> raw;
  } catch (const json::exception& e) {
    bad("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(raw, path.parent_path());
}

Report run_experiment(const ExperimentConfig& config, unsigned workers) {
  workers = std::max(workers, 1u);
  Report r = std::visit(
      [&](const auto& p) -> Report {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ExponentParams>) return run_exponent(config, p, workers);
        else if constexpr (std::is_same_v<P, SurvivalParams>) return run_survival(config, p, workers);
        else if constexpr (std::is_same_v<P, WordListParams>) return config.kind == "kac" ? run_kac(config, p) : run_integral_identity(config, p);
        else if constexpr (std::is_same_v<P, AbadiParams>) return run_abadi(config, p);
        else if constexpr (std::is_same_v<P, SummabilityParams>) return run_summability(config, p, workers);
        else if constexpr (std::is_same_v<P, RenyiParams>) return run_renyi(config, p);
        else return run_stream(config, p, workers);
      },
      config.params);

  r.header = {{"config", config.raw},
              {"version", HITSTAT_VERSION},
              {"kind", config.kind},
              {"seed", config.seed},
              {"generated_at", timestamp()},
              {"targets", targets(config)}};
  if (config.model) {
    r.header["model"] = json::parse(config.model->describe());
    r.header["model_fingerprint"] = model_fingerprint(*config.model);
  } else {
    r.header["model"] = nullptr;
    r.header["model_fingerprint"] = nullptr;
  }
  return r;
}

void write_report(const Report& report, const std::filesystem::path& outdir) {
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + outdir.string() + ": " + ec.message());

  json doc = {{"header", report.header}, {"summary", report.summary}};
  if (report.acceptance_passed) {
    doc["acceptance"] = {{"passed", *report.acceptance_passed}, {"detail", report.acceptance_detail}};
  }
  auto put = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  };
  put(outdir / "report.csv", report.rows);
  put(outdir / "summary.json", doc.dump(2) + "\n");
}

}  // namespace hitstat
