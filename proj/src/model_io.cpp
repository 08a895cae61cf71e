#include "pann/model_io.hpp"

#include <fmt/format.h>
#include <fstream>

#include "pann/error.hpp"

namespace pann {

nlohmann::ordered_json model_to_json(const PotentialModel& model) {
  nlohmann::ordered_json doc;
  doc["architecture"] = std::string(to_string(model.architecture()));
  doc["n"] = model.nodes();
  doc["m"] = model.param_dim();
  auto layers = nlohmann::ordered_json::array();
  for (std::size_t li = 0; li < model.layers().size(); ++li) {
    const auto& l = model.layers()[li];
    const auto w = model.weights(li);
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t o = 0; o < l.width; ++o) {
      rows.push_back(std::vector<double>(w.begin() + static_cast<std::ptrdiff_t>(o * l.in_dim),
                                         w.begin() + static_cast<std::ptrdiff_t>((o + 1) * l.in_dim)));
    }
    const auto b = model.bias(li);
    nlohmann::ordered_json entry;
    entry["w"] = std::move(rows);
    entry["b"] = std::vector<double>(b.begin(), b.end());
    entry["constraint"] = std::string(to_string(l.weight_constraint));
    entry["activation"] = std::string(to_string(l.activation));
    layers.push_back(std::move(entry));
  }
  doc["layers"] = std::move(layers);
  doc["metadata"] = model.metadata;
  return doc;
}

PotentialModel model_from_json(const nlohmann::ordered_json& doc) {
  try {
    const auto arch = parse_architecture(doc.at("architecture").get<std::string>());
    PotentialModel model(arch, doc.at("n").get<std::size_t>(), doc.at("m").get<std::size_t>());
    const auto& layers = doc.at("layers");
    if (layers.size() != model.layers().size()) {
      throw Error(ErrorCode::ShapeMismatch,
                  fmt::format("{} expects {} layers, document has {}", to_string(arch), model.layers().size(),
                              layers.size()));
    }
    for (std::size_t li = 0; li < layers.size(); ++li) {
      const auto& spec = model.layers()[li];
      const auto& entry = layers[li];
      if (parse_activation(entry.at("activation").get<std::string>()) != spec.activation ||
          parse_weight_constraint(entry.at("constraint").get<std::string>()) != spec.weight_constraint) {
        throw Error(ErrorCode::ShapeMismatch, fmt::format("layer {} activation/constraint differs from layout", li));
      }
      const auto& rows = entry.at("w");
      if (rows.size() != spec.width) {
        throw Error(ErrorCode::ShapeMismatch, fmt::format("layer {} has {} rows, expected {}", li, rows.size(), spec.width));
      }
      auto w = model.weights(li);
      for (std::size_t o = 0; o < spec.width; ++o) {
        const auto row = rows[o].get<std::vector<double>>();
        if (row.size() != spec.in_dim) {
          throw Error(ErrorCode::ShapeMismatch, fmt::format("layer {} row {} has {} entries, expected {}", li, o,
                                                            row.size(), spec.in_dim));
        }
        std::copy(row.begin(), row.end(), w.begin() + static_cast<std::ptrdiff_t>(o * spec.in_dim));
      }
      const auto b = entry.at("b").get<std::vector<double>>();
      auto bias = model.bias(li);
      if (b.size() != bias.size()) {
        throw Error(ErrorCode::ShapeMismatch, fmt::format("layer {} bias has {} entries, expected {}", li, b.size(),
                                                          bias.size()));
      }
      std::copy(b.begin(), b.end(), bias.begin());
    }
    if (!model.satisfies_constraints()) {
      throw Error(ErrorCode::InvalidArgument, "negative weight in a non-negative layer");
    }
    if (doc.contains("metadata")) model.metadata = doc.at("metadata");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

void save_model(const PotentialModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", path.string()));
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, fmt::format("write failed for {}", path.string()));
}

PotentialModel load_model(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::FileNotFound, path.string());
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read {}", path.string()));
  nlohmann::ordered_json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, fmt::format("{}: {}", path.string(), e.what()));
  }
  return model_from_json(doc);
}

}  // namespace pann
