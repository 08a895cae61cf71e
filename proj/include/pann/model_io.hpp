#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "pann/network.hpp"

namespace pann {

/// {architecture, n, m, layers: [{w, b, constraint, activation}], metadata}
/// with w stored as rows (one per output node). Field order is fixed.
nlohmann::ordered_json model_to_json(const PotentialModel& model);

/// Rebuilds the layout from the architecture tag and checks every layer
/// against it. Throws ShapeMismatch / ParseError on disagreement and
/// InvalidArgument when a constrained weight is negative.
PotentialModel model_from_json(const nlohmann::ordered_json& doc);

void save_model(const PotentialModel& model, const std::filesystem::path& path);
PotentialModel load_model(const std::filesystem::path& path);

}  // namespace pann
