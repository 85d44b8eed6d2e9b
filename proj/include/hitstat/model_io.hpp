#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "hitstat/measure_model.hpp"

namespace hitstat {

/// {"kind": "bernoulli", "p": [...]}
/// {"kind": "markov", "P": [[...], ...], "pi": [...] (optional)}
/// {"kind": "geometric", "theta": 0.5}
///
/// Raises InvalidSpec for shape problems and the validation errors of
/// MeasureModel for invalid numbers.
MeasureModel model_from_json(const nlohmann::json& node);
MeasureModel load_model_file(const std::filesystem::path& path);

/// 64-bit FNV-1a of the model's canonical description, as 16 hex digits.
std::string model_fingerprint(const MeasureModel& model);

}  // namespace hitstat
