#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace pann {

struct MaterialSample {
  double lambda = 1.0;
  double stress = 0.0;  // MPa
  std::vector<double> t;
};

/// Sidecar metadata of one dataset file.
struct DatasetMeta {
  double param_min = 0.0;
  double param_max = 1.0;
  std::string material_label;
  std::string source;
};

/// One CSV row before parameter normalization.
struct RawRecord {
  double lambda = 1.0;
  double stress_mpa = 0.0;
  double param_raw = 0.0;
};

/// Samples plus a disjoint calibration / test partition covering every index.
struct Dataset {
  std::vector<MaterialSample> samples;
  std::vector<std::size_t> calibration;
  std::vector<std::size_t> test;
  std::vector<DatasetMeta> sources;

  [[nodiscard]] std::vector<MaterialSample> calibration_samples() const;
  [[nodiscard]] std::vector<MaterialSample> test_samples() const;
};

/// All samples in the calibration slice.
Dataset make_dataset(std::vector<MaterialSample> samples);

/// Moves samples matching `is_test` to the test slice; the rest are calibration.
void assign_split(Dataset& dataset, const std::function<bool(const MaterialSample&)>& is_test);

/// Throws InvalidArgument unless the slices are disjoint and cover all samples.
void validate_split(const Dataset& dataset);

/// (raw - min) / (max - min); 0 when the range is degenerate.
double normalize_parameter(double raw, const DatasetMeta& meta) noexcept;
double denormalize_parameter(double t, const DatasetMeta& meta) noexcept;

/// `data.csv` -> `data.json`
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Writes `lambda,stress_mpa,param_raw` rows and the JSON sidecar next to it.
void write_dataset(const std::filesystem::path& csv, const std::vector<RawRecord>& rows, const DatasetMeta& meta);

std::vector<RawRecord> read_dataset_rows(const std::filesystem::path& csv);
DatasetMeta read_sidecar(const std::filesystem::path& csv);

/// Reads every file with its sidecar and normalizes the parameter column.
/// All samples land in the calibration slice.
Dataset load_dataset(const std::vector<std::filesystem::path>& csvs);

}  // namespace pann
