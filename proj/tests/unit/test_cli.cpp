#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hitstat/error.hpp"
#include "hitstat/experiment.hpp"

using namespace hitstat;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json kFair = {{"kind", "bernoulli"}, {"p", {0.5, 0.5}}};
const json kMarkov = {{"kind", "markov"}, {"P", {{0.9, 0.1}, {0.2, 0.8}}}};

ErrorCode parse_code(const json& raw) {
  try {
    parse_config(raw, fs::temp_directory_path());
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("config accepted: " << raw.dump());
  return ErrorCode::InvalidSpec;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hitstat_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_binary(const std::string& args, const char* env = "") {
  const std::string cmd = std::string(env) + " \"" HITSTAT_BIN "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Report run(const json& raw, unsigned workers = 1) { return run_experiment(parse_config(raw, fs::temp_directory_path()), workers); }

}  // namespace

TEST_CASE("config validation") {
  const json ok = {{"kind", "kac"}, {"seed", 1}, {"model", kFair}, {"word", "111"}};
  CHECK_NOTHROW(parse_config(ok, "."));

  auto unknown = ok;
  unknown["wrod"] = "11";
  CHECK(parse_code(unknown) == ErrorCode::InvalidSpec);
  auto no_seed = ok;
  no_seed.erase("seed");
  CHECK(parse_code(no_seed) == ErrorCode::InvalidSpec);
  auto neg_seed = ok;
  neg_seed["seed"] = -1;
  CHECK(parse_code(neg_seed) == ErrorCode::InvalidSpec);
  auto bad_kind = ok;
  bad_kind["kind"] = "entropy";
  CHECK(parse_code(bad_kind) == ErrorCode::InvalidSpec);
  auto bad_model = ok;
  bad_model["model"] = {{"kind", "bernoulli"}, {"p", {0.5, 0.6}}};
  CHECK(is_validation_error(parse_code(bad_model)));
  auto both = ok;
  both["model_file"] = "m.json";
  CHECK(parse_code(both) == ErrorCode::InvalidSpec);
  auto bad_s = json{{"kind", "renyi-exact"}, {"seed", 1}, {"model", kFair}, {"s", 0.0}};
  CHECK(parse_code(bad_s) == ErrorCode::NonPositiveS);
  const json gap = {{"kind", "markov"}, {"P", {{0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}}}};
  auto zero_word = json{{"kind", "kac"}, {"seed", 1}, {"model", gap}, {"word", "01"}};
  CHECK(parse_code(zero_word) == ErrorCode::ZeroMeasureTarget);
  CHECK(experiment_kinds().size() == 11);
}

TEST_CASE("kac report") {
  const auto r = run({{"kind", "kac"}, {"seed", 1}, {"model", kFair}, {"word", "111"}});
  CHECK(r.summary["expected_return"].get<double>() == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(r.summary["kac_residual"].get<double>() <= 1e-9);
  CHECK(r.header["kind"] == "kac");
  CHECK(r.header["seed"] == 1);
  CHECK(r.header["config"]["word"] == "111");
  CHECK(r.header["model_fingerprint"].get<std::string>().size() == 16);
  CHECK(r.rows.rfind("word,target_measure,expected_return,reciprocal_measure,kac_residual\n", 0) == 0);
}

TEST_CASE("renyi report") {
  const json uniform4 = {{"kind", "bernoulli"}, {"p", {0.25, 0.25, 0.25, 0.25}}};
  const auto r = run({{"kind", "renyi-exact"}, {"seed", 0}, {"model", uniform4}, {"s", 2.0}});
  CHECK(r.summary["renyi"].get<double>() == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("rows do not depend on the worker count") {
  const std::vector<json> configs = {
      {{"kind", "entrance-exponent"}, {"seed", 3}, {"model", kMarkov}, {"n_list", {4, 8}}, {"N", 200}},
      {{"kind", "recurrence-exponent"}, {"seed", 3}, {"model", kFair}, {"n", 8}, {"N", 200}},
      {{"kind", "wns"}, {"seed", 3}, {"model", kFair}, {"n", 8}, {"N", 200}, {"s", 1.0}},
      {{"kind", "survival"}, {"seed", 3}, {"model", kFair}, {"word_length", 6}, {"N", 500}},
      {{"kind", "return-survival"}, {"seed", 3}, {"model", kMarkov}, {"word", "0110"}, {"N", 500}},
      {{"kind", "theorem2"}, {"seed", 3}, {"model", kFair}, {"n_list", {6, 8}}, {"N_z", 50}},
  };
  for (const auto& c : configs) {
    CAPTURE(c.dump());
    const auto one = run(c, 1);
    const auto four = run(c, 4);
    CHECK(one.rows == four.rows);
    CHECK(one.summary == four.summary);
    CHECK(one.rows == run(c, 1).rows);
  }
}

TEST_CASE("acceptance verdicts") {
  json kac = {{"kind", "kac"}, {"seed", 1}, {"model", kMarkov}, {"max_length", 3}, {"acceptance", true}};
  const auto pass = run(kac);
  REQUIRE(pass.acceptance_passed.has_value());
  CHECK(*pass.acceptance_passed);
  CHECK(pass.summary.contains("kac_residual") == false);

  json strict = {{"kind", "entrance-exponent"}, {"seed", 1}, {"model", kFair}, {"n", 6}, {"N", 50},
                 {"acceptance", {{"tolerance", 1e-9}}}};
  const auto fail = run(strict);
  REQUIRE(fail.acceptance_passed.has_value());
  CHECK_FALSE(*fail.acceptance_passed);

  CHECK_FALSE(run({{"kind", "kac"}, {"seed", 1}, {"model", kFair}, {"word", "1"}}).acceptance_passed.has_value());
}

TEST_CASE("binary: exit codes and outputs") {
  const auto dir = scratch("bin");
  const auto write = [&](const std::string& name, const json& j) {
    std::ofstream(dir / name) << j.dump(2);
    return (dir / name).string();
  };

  const auto kac = write("kac.json", {{"kind", "kac"}, {"seed", 1}, {"model", kFair}, {"word", "111"}});
  CHECK(run_binary("--config " + kac + " --outdir " + (dir / "kac").string()) == 0);
  const auto summary = json::parse(slurp(dir / "kac" / "summary.json"));
  CHECK(summary["summary"]["expected_return"].get<double>() == doctest::Approx(8.0));
  CHECK(summary["header"]["config"]["word"] == "111");
  CHECK(fs::exists(dir / "kac" / "report.csv"));

  // Malformed model file: exit 2, nothing written.
  std::ofstream(dir / "broken_model.json") << "{\"kind\": \"bernoulli\", \"p\": [0.5, ";
  const auto broken =
      write("broken.json", {{"kind", "kac"}, {"seed", 1}, {"model_file", "broken_model.json"}, {"word", "1"}});
  CHECK(run_binary("--config " + broken + " --outdir " + (dir / "broken").string()) == 2);
  CHECK_FALSE(fs::exists(dir / "broken"));

  const auto unknown = write("unknown.json", {{"kind", "kac"}, {"seed", 1}, {"model", kFair}, {"word", "1"}, {"x", 1}});
  CHECK(run_binary("--config " + unknown + " --outdir " + (dir / "unknown").string()) == 2);
  CHECK(run_binary("--config " + (dir / "missing.json").string()) != 0);

  // Acceptance failure: exit 4, outputs still written.
  const auto strict = write("strict.json", {{"kind", "entrance-exponent"}, {"seed", 1}, {"model", kFair}, {"n", 6},
                                            {"N", 50}, {"acceptance", {{"tolerance", 1e-9}}}});
  CHECK(run_binary("--config " + strict + " --outdir " + (dir / "strict").string()) == 4);
  CHECK(fs::exists(dir / "strict" / "report.csv"));

  // Runtime error: cap too small for the censoring limit.
  const auto censor = write("censor.json", {{"kind", "entrance-exponent"}, {"seed", 1}, {"model", kFair}, {"n", 12},
                                            {"N", 50}, {"cap", 2}});
  CHECK(run_binary("--config " + censor + " --outdir " + (dir / "censor").string()) == 3);

  // Worker count from the environment; rows identical either way.
  const auto exp = write("exp.json", {{"kind", "entrance-exponent"}, {"seed", 9}, {"model", kMarkov}, {"n", 8},
                                      {"N", 300}});
  CHECK(run_binary("--config " + exp + " --outdir " + (dir / "w1").string() + " --workers 1") == 0);
  CHECK(run_binary("--config " + exp + " --outdir " + (dir / "w4").string(), "HITSTAT_WORKERS=4") == 0);
  CHECK(slurp(dir / "w1" / "report.csv") == slurp(dir / "w4" / "report.csv"));
  CHECK(run_binary("--config " + exp + " --outdir " + (dir / "wbad").string(), "HITSTAT_WORKERS=zero") == 2);
}
