#include "hitstat/model_io.hpp"

#include <fstream>

#include <fmt/format.h>

#include "hitstat/error.hpp"

namespace hitstat {
namespace {

std::vector<double> numbers(const nlohmann::json& node, const char* what) {
  if (!node.is_array()) throw Error(ErrorCode::InvalidSpec, std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : node) {
    if (!x.is_number()) throw Error(ErrorCode::InvalidSpec, std::string(what) + " must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void allow_keys(const nlohmann::json& node, std::initializer_list<const char*> keys) {
  for (const auto& [key, value] : node.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw Error(ErrorCode::InvalidSpec, "unexpected model field '" + key + "'");
  }
}

}  // namespace

MeasureModel model_from_json(const nlohmann::json& node) {
  if (!node.is_object()) throw Error(ErrorCode::InvalidSpec, "model node must be a JSON object");
  if (!node.contains("kind") || !node["kind"].is_string()) {
    throw Error(ErrorCode::InvalidSpec, "model node needs a string 'kind'");
  }
  const auto kind = node["kind"].get<std::string>();
  if (kind == "bernoulli") {
    allow_keys(node, {"kind", "p"});
    if (!node.contains("p")) throw Error(ErrorCode::InvalidSpec, "bernoulli model needs 'p'");
    return MeasureModel::bernoulli(numbers(node["p"], "p"));
  }
  if (kind == "markov") {
    allow_keys(node, {"kind", "P", "pi"});
    if (!node.contains("P") || !node["P"].is_array()) throw Error(ErrorCode::InvalidSpec, "markov model needs 'P'");
    std::vector<std::vector<double>> rows;
    for (const auto& row : node["P"]) rows.push_back(numbers(row, "P row"));
    std::optional<std::vector<double>> pi;
    if (node.contains("pi") && !node["pi"].is_null()) pi = numbers(node["pi"], "pi");
    return MeasureModel::markov(std::move(rows), std::move(pi));
  }
  if (kind == "geometric") {
    allow_keys(node, {"kind", "theta"});
    if (!node.contains("theta") || !node["theta"].is_number()) {
      throw Error(ErrorCode::InvalidSpec, "geometric model needs a numeric 'theta'");
    }
    return MeasureModel::geometric(node["theta"].get<double>());
  }
  throw Error(ErrorCode::InvalidSpec, "unknown model kind '" + kind + "'");
}

MeasureModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidSpec, "cannot read model file " + path.string());
  nlohmann::json node;
  try {
    in >> node;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, "model file " + path.string() + " is not valid JSON: " + e.what());
  }
  return model_from_json(node);
}

std::string model_fingerprint(const MeasureModel& model) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : model.describe()) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", hash);
}

}  // namespace hitstat
