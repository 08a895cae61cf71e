#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pann::cli {

struct GlobalOptions {
  std::filesystem::path out = ".";
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string kernels = "auto";
};

struct GenDataOptions {
  std::string oracle = "mooney-rivlin";  // or neo-hookean
  std::vector<double> c10_cubic{114.3, -207.3, 23.99, -1.143};
  std::vector<double> c01_cubic{0.0, 0.0, 24.0, -0.8};
  std::vector<double> c11_cubic{0.0, 0.0, 3.0, 0.0};
  double neo_c = 0.5;
  std::vector<double> grid{1.0, 2.0, 20.0};  // lambda_min, lambda_max, count
  std::vector<double> params;                // raw parameter values; oracle default when empty
  std::vector<double> param_range;           // raw min, max; oracle default when empty
  double noise = 0.0;                        // standard deviation of additive noise, MPa
  std::string label;
};

/// How samples are moved to the test slice.
struct SplitOptions {
  std::vector<double> test_params;  // raw parameter values held out
  std::optional<double> calib_lambda_max;
};

struct CalibrateOptions {
  std::vector<std::string> data;
  std::string arch = "monotonic";
  std::size_t nodes = 8;
  std::size_t epochs = 20000;
  std::size_t restarts = 5;
  double learning_rate = 2e-3;
  SplitOptions split;
};

struct EvaluateOptions {
  std::string model;
  std::vector<std::string> data;
  SplitOptions split;
  std::string slice = "test";  // all | calibration | test
};

struct ScanOptions {
  std::vector<std::string> models;
  std::vector<std::string> builtin;  // neo-hookean, sign-flipped, i2-only, mooney-rivlin
  double builtin_c = 0.5;
  std::vector<double> t_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> grid{0.5, 3.0, 26.0};  // lambda_min, lambda_max, count per axis
  std::size_t directions = 200;
  std::string generator = "fibonacci";
};

struct HyperparamOptions {
  std::vector<std::string> data;
  std::vector<std::size_t> nodes{2, 4, 8, 16, 32, 64};
  std::vector<std::string> archs{"convex-monotonic", "monotonic", "unrestricted-1hl", "unrestricted-2hl"};
  std::size_t epochs = 20000;
  std::size_t restarts = 1;
  double learning_rate = 2e-3;
};

struct ReportOptions {
  std::vector<std::string> models;
  std::vector<std::string> data;
  std::vector<double> lambda_range;  // min, max; data range when empty
  std::vector<double> t_grid{0.0, 0.5, 1.0};  // used when no data is given
  std::size_t points = 101;
};

void cmd_gendata(const GlobalOptions& g, const GenDataOptions& o);
void cmd_calibrate(const GlobalOptions& g, const CalibrateOptions& o);
void cmd_evaluate(const GlobalOptions& g, const EvaluateOptions& o);
void cmd_scan(const GlobalOptions& g, const ScanOptions& o);
void cmd_hyperparam(const GlobalOptions& g, const HyperparamOptions& o);
void cmd_report(const GlobalOptions& g, const ReportOptions& o);

/// Parses and dispatches; returns the process exit code.
int run(int argc, char** argv);

}  // namespace pann::cli
