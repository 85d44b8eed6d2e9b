// hitstat --config exp.json [--workers N] [--outdir PATH]
//
// Exit status: 0 success, 2 invalid config or model, 3 failure while
// running, 4 an experiment with an "acceptance" block missed its tolerance.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hitstat/error.hpp"
#include "hitstat/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kRuntime = 3;
constexpr int kAcceptance = 4;

unsigned env_workers() {
  const char* v = std::getenv("HITSTAT_WORKERS");
  if (!v || !*v) return 1;
  try {
    std::size_t used = 0;
    const long n = std::stol(v, &used);
    if (used == std::string(v).size() && n >= 1) return static_cast<unsigned>(n);
  } catch (const std::exception&) {
  }
  throw hitstat::Error(hitstat::ErrorCode::InvalidArgument, std::string("HITSTAT_WORKERS must be a positive integer, got '") + v + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entrance, return and hitting-time experiments on symbolic shifts"};
  std::string config_path;
  std::string outdir;
  unsigned workers = 0;
  app.add_option("--config", config_path, "experiment JSON file")->required()->check(CLI::ExistingFile);
  app.add_option("--workers", workers, "worker threads (falls back to HITSTAT_WORKERS, then 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--outdir", outdir, "output directory (default: config 'outdir', else ./hitstat_out)");
  app.set_version_flag("--version", HITSTAT_VERSION);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  hitstat::ExperimentConfig config;
  try {
    config = hitstat::load_config(config_path);
    if (workers == 0) workers = env_workers();
  } catch (const hitstat::Error& e) {
    std::cerr << "hitstat: " << e.what() << "\n";
    return kValidation;
  }

  const std::filesystem::path out =
      !outdir.empty() ? std::filesystem::path(outdir) : config.outdir.value_or("hitstat_out");

  hitstat::Report report;
  try {
    report = hitstat::run_experiment(config, workers);
    hitstat::write_report(report, out);
  } catch (const hitstat::Error& e) {
    std::cerr << "hitstat: " << e.what() << "\n";
    return hitstat::is_validation_error(e.code()) ? kValidation : kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "hitstat: " << e.what() << "\n";
    return kRuntime;
  }

  if (report.acceptance_passed) {
    std::cerr << "hitstat: acceptance " << (*report.acceptance_passed ? "passed" : "FAILED") << " ("
              << report.acceptance_detail << ")\n";
    if (!*report.acceptance_passed) return kAcceptance;
  }
  return kOk;
}
