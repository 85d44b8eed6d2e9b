#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "hitstat/measure_model.hpp"
#include "hitstat/orbit.hpp"
#include "hitstat/word.hpp"

namespace hitstat {

// Parameters of each experiment kind after validation.

struct ExponentParams {  // entrance-exponent, recurrence-exponent, wns
  std::vector<std::size_t> n_list;
  std::size_t count = 0;
  CapPolicy cap;
  double epsilon = 0.15;  // half-width of the exceedance window around the limit
  double s = 0.0;         // wns only
  bool diagonal = false;  // wns only
};

struct SurvivalParams {  // survival, return-survival
  Word word;
  std::size_t count = 0;
  std::vector<double> t_grid;
  CapPolicy cap;
  double alpha = 0.001;  // DKW band level
};

struct WordListParams {  // kac, hlv
  std::vector<Word> words;
  double rel_tol = 1e-12;
  std::uint64_t m_max = 500;
};

struct AbadiParams {
  Word word;
  std::vector<double> t_grid;
};

struct SummabilityParams {
  std::vector<std::size_t> n_list;
  double epsilon = 0.1;
  std::size_t outer_count = 0;
  std::size_t inner_count = 0;
  double exact_budget = 5e8;
};

struct RenyiParams {
  std::vector<double> s_list;
  std::vector<std::size_t> n_list;
};

struct StreamParams {
  std::filesystem::path input;
  std::string symbol_map = "byte";
  std::vector<std::size_t> n_list;
  std::size_t starts_per_n = 1000;
  std::size_t min_length_multiple = 64;
  double max_censored_fraction = 0.05;
  std::vector<double> renyi_s;
  std::vector<std::size_t> renyi_n;
  std::optional<double> reference;        // expected entropy for recurrence rows
  std::optional<double> renyi_reference;  // expected R(s) for plug-in rows
};

using ExperimentParams = std::variant<ExponentParams, SurvivalParams, WordListParams, AbadiParams, SummabilityParams,
                                      RenyiParams, StreamParams>;

struct Acceptance {
  std::optional<double> tolerance;
};

struct ExperimentConfig {
  nlohmann::json raw;  // verbatim config, echoed into the report header
  std::string kind;
  std::uint64_t seed = 0;
  std::optional<MeasureModel> model;  // absent only for stream-estimate
  ExperimentParams params;
  std::optional<Acceptance> acceptance;
  std::optional<std::filesystem::path> outdir;
};

/// Validates the whole config, including the model and every word, without
/// touching the filesystem beyond reading a referenced model file. Relative
/// paths resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& raw, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Report {
  nlohmann::json header;
  std::string rows;  // CSV with header line; byte-reproducible
  nlohmann::json summary;
  std::optional<bool> acceptance_passed;  // empty when no acceptance was declared
  std::string acceptance_detail;
};

/// Runs the experiment. `workers` only affects wall time.
Report run_experiment(const ExperimentConfig& config, unsigned workers = 1);

/// Writes <outdir>/report.csv and <outdir>/summary.json.
void write_report(const Report& report, const std::filesystem::path& outdir);

/// Experiment kinds accepted by parse_config.
const std::vector<std::string>& experiment_kinds();

}  // namespace hitstat
