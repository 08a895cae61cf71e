#include "pann/dataset.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>

#include "pann/error.hpp"

namespace pann {

namespace {

std::vector<MaterialSample> gather(const Dataset& ds, const std::vector<std::size_t>& idx) {
  std::vector<MaterialSample> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(ds.samples.at(i));
  return out;
}

double parse_double(std::string_view field, const std::filesystem::path& path, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::ParseError, fmt::format("{}:{}: bad number '{}'", path.string(), line, field));
  }
  return v;
}

}  // namespace

std::vector<MaterialSample> Dataset::calibration_samples() const { return gather(*this, calibration); }
std::vector<MaterialSample> Dataset::test_samples() const { return gather(*this, test); }

Dataset make_dataset(std::vector<MaterialSample> samples) {
  Dataset ds;
  ds.samples = std::move(samples);
  ds.calibration.resize(ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i) ds.calibration[i] = i;
  return ds;
}

void assign_split(Dataset& dataset, const std::function<bool(const MaterialSample&)>& is_test) {
  dataset.calibration.clear();
  dataset.test.clear();
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    (is_test(dataset.samples[i]) ? dataset.test : dataset.calibration).push_back(i);
  }
}

void validate_split(const Dataset& dataset) {
  std::vector<int> seen(dataset.samples.size(), 0);
  for (const auto* slice : {&dataset.calibration, &dataset.test}) {
    for (auto i : *slice) {
      if (i >= seen.size()) throw Error(ErrorCode::InvalidArgument, fmt::format("split index {} out of range", i));
      if (seen[i]++ != 0) throw Error(ErrorCode::InvalidArgument, fmt::format("sample {} in both slices", i));
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] == 0) throw Error(ErrorCode::InvalidArgument, fmt::format("sample {} in no slice", i));
  }
}

double normalize_parameter(double raw, const DatasetMeta& meta) noexcept {
  const double range = meta.param_max - meta.param_min;
  return range == 0.0 ? 0.0 : (raw - meta.param_min) / range;
}

double denormalize_parameter(double t, const DatasetMeta& meta) noexcept {
  return meta.param_min + t * (meta.param_max - meta.param_min);
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".json");
  return p;
}

void write_dataset(const std::filesystem::path& csv, const std::vector<RawRecord>& rows, const DatasetMeta& meta) {
  {
    std::ofstream out(csv);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", csv.string()));
    out << "lambda,stress_mpa,param_raw\n";
    for (const auto& r : rows) out << fmt::format("{},{},{}\n", r.lambda, r.stress_mpa, r.param_raw);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("write failed for {}", csv.string()));
  }
  nlohmann::ordered_json side;
  side["param_min"] = meta.param_min;
  side["param_max"] = meta.param_max;
  side["material_label"] = meta.material_label;
  side["source"] = meta.source;
  const auto side_path = sidecar_path(csv);
  std::ofstream out(side_path);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", side_path.string()));
  out << side.dump(2) << '\n';
}

std::vector<RawRecord> read_dataset_rows(const std::filesystem::path& csv) {
  if (!std::filesystem::exists(csv)) throw Error(ErrorCode::FileNotFound, csv.string());
  std::ifstream in(csv);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read {}", csv.string()));
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, fmt::format("{}: missing header", csv.string()));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "lambda,stress_mpa,param_raw") {
    throw Error(ErrorCode::ParseError, fmt::format("{}: unexpected header '{}'", csv.string(), line));
  }
  std::vector<RawRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::string_view view(line);
    std::array<std::string_view, 3> fields;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto comma = view.find(',');
      if ((k < 2) == (comma == std::string_view::npos)) {
        throw Error(ErrorCode::ParseError, fmt::format("{}:{}: expected 3 fields", csv.string(), line_no));
      }
      fields[k] = view.substr(0, comma);
      view = comma == std::string_view::npos ? std::string_view{} : view.substr(comma + 1);
    }
    RawRecord r{parse_double(fields[0], csv, line_no), parse_double(fields[1], csv, line_no),
                parse_double(fields[2], csv, line_no)};
    if (!(r.lambda > 0.0)) {
      throw Error(ErrorCode::InvalidStretch, fmt::format("{}:{}: lambda = {}", csv.string(), line_no, r.lambda));
    }
    rows.push_back(r);
  }
  return rows;
}

DatasetMeta read_sidecar(const std::filesystem::path& csv) {
  const auto path = sidecar_path(csv);
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::FileNotFound, path.string());
  std::ifstream in(path);
  try {
    const auto doc = nlohmann::json::parse(in);
    DatasetMeta meta;
    meta.param_min = doc.at("param_min").get<double>();
    meta.param_max = doc.at("param_max").get<double>();
    meta.material_label = doc.value("material_label", std::string{});
    meta.source = doc.value("source", std::string{});
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, fmt::format("{}: {}", path.string(), e.what()));
  }
}

Dataset load_dataset(const std::vector<std::filesystem::path>& csvs) {
  std::vector<MaterialSample> samples;
  std::vector<DatasetMeta> metas;
  for (const auto& csv : csvs) {
    const auto meta = read_sidecar(csv);
    for (const auto& r : read_dataset_rows(csv)) {
      samples.push_back({r.lambda, r.stress_mpa, {normalize_parameter(r.param_raw, meta)}});
    }
    metas.push_back(meta);
  }
  auto ds = make_dataset(std::move(samples));
  ds.sources = std::move(metas);
  return ds;
}

}  // namespace pann
