#include <CLI11.hpp>
#include <fmt/format.h>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "json_config.hpp"
#include "pann/error.hpp"

namespace pann::cli {

namespace {

/// 0 success, 1 usage, 2 domain or data error, 3 missing file or I/O failure.
int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound:
    case ErrorCode::IoError: return 3;
    default: return 2;
  }
}

void add_split(CLI::App* cmd, SplitOptions& s) {
  cmd->add_option("--test-params", s.test_params, "Raw parameter values moved to the test slice")->delimiter(',');
  cmd->add_option("--calib-lambda-max", s.calib_lambda_max, "Samples with larger stretch go to the test slice");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Parametrized hyperelastic potentials: data generation, calibration and stability scans", "pann"};
  app.require_subcommand(1);
  // Global flags may follow the subcommand name.
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON document with option values; command-line flags take precedence");

  GlobalOptions g;
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Base random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for independent restarts")->capture_default_str();
  app.add_option("--kernels", g.kernels, "Dense kernel variant: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
      ->capture_default_str();

  GenDataOptions gd;
  auto* gendata = app.add_subcommand("gendata", "Write synthetic uniaxial datasets from an analytic law");
  gendata->add_option("--oracle", gd.oracle)->check(CLI::IsMember({"mooney-rivlin", "neo-hookean"}))->capture_default_str();
  gendata->add_option("--c10-cubic", gd.c10_cubic, "a,b,c,d of a G^3 + b G^2 + c G + d")->delimiter(',')->expected(4);
  gendata->add_option("--c01-cubic", gd.c01_cubic)->delimiter(',')->expected(4);
  gendata->add_option("--c11-cubic", gd.c11_cubic)->delimiter(',')->expected(4);
  gendata->add_option("--neo-c", gd.neo_c, "Neo-Hookean coefficient in MPa")->capture_default_str();
  gendata->add_option("--grid", gd.grid, "lambda_min,lambda_max,count")->delimiter(',')->expected(3);
  gendata->add_option("--params", gd.params, "Raw parameter values, one file each")->delimiter(',');
  gendata->add_option("--param-range", gd.param_range, "Raw min,max used for normalization")->delimiter(',')->expected(2);
  gendata->add_option("--noise", gd.noise, "Standard deviation of additive stress noise in MPa")->capture_default_str();
  gendata->add_option("--label", gd.label, "Material label and file prefix");

  CalibrateOptions cal;
  auto* calibrate = app.add_subcommand("calibrate", "Fit a network potential to uniaxial data");
  calibrate->add_option("--data", cal.data, "Dataset CSV files")->required()->delimiter(',');
  calibrate->add_option("--arch", cal.arch)
      ->check(CLI::IsMember({"convex-monotonic", "monotonic", "unrestricted-1hl", "unrestricted-2hl"}))
      ->capture_default_str();
  calibrate->add_option("--nodes", cal.nodes)->capture_default_str();
  calibrate->add_option("--epochs", cal.epochs)->capture_default_str();
  calibrate->add_option("--restarts", cal.restarts)->capture_default_str();
  calibrate->add_option("--lr", cal.learning_rate)->capture_default_str();
  add_split(calibrate, cal.split);

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "Residuals of a model on a dataset slice");
  evaluate->add_option("--model", ev.model)->required();
  evaluate->add_option("--data", ev.data)->required()->delimiter(',');
  evaluate->add_option("--slice", ev.slice)->check(CLI::IsMember({"all", "calibration", "test"}))->capture_default_str();
  add_split(evaluate, ev.split);

  ScanOptions sc;
  auto* scan = app.add_subcommand("scan", "Ellipticity and Baker-Ericksen scan over the principal-stretch plane");
  scan->add_option("--model", sc.models, "Model JSON files")->delimiter(',');
  scan->add_option("--builtin", sc.builtin, "Analytic laws: neo-hookean, sign-flipped, i2-only, mooney-rivlin")
      ->delimiter(',');
  scan->add_option("--builtin-c", sc.builtin_c)->capture_default_str();
  scan->add_option("--t-grid", sc.t_grid, "Normalized parameter values")->delimiter(',');
  scan->add_option("--grid", sc.grid, "lambda_min,lambda_max,count per axis")->delimiter(',')->expected(3);
  scan->add_option("--directions", sc.directions)->capture_default_str();
  scan->add_option("--generator", sc.generator)->check(CLI::IsMember({"fibonacci", "spherical"}))->capture_default_str();

  HyperparamOptions hp;
  auto* hyper = app.add_subcommand("hyperparam", "Loss and sparsity across node counts and architectures");
  hyper->add_option("--data", hp.data)->required()->delimiter(',');
  hyper->add_option("--nodes", hp.nodes)->delimiter(',');
  hyper->add_option("--archs", hp.archs)->delimiter(',');
  hyper->add_option("--epochs", hp.epochs)->capture_default_str();
  hyper->add_option("--restarts", hp.restarts)->capture_default_str();
  hyper->add_option("--lr", hp.learning_rate)->capture_default_str();

  ReportOptions rep;
  auto* report = app.add_subcommand("report", "SVG stress and coefficient plots");
  report->add_option("--model", rep.models)->required()->delimiter(',');
  report->add_option("--data", rep.data)->delimiter(',');
  report->add_option("--lambda-range", rep.lambda_range)->delimiter(',')->expected(2);
  report->add_option("--t-grid", rep.t_grid)->delimiter(',');
  report->add_option("--points", rep.points)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help requests exit 0; every parse failure shares the usage code.
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*gendata) cmd_gendata(g, gd);
    if (*calibrate) cmd_calibrate(g, cal);
    if (*evaluate) cmd_evaluate(g, ev);
    if (*scan) cmd_scan(g, sc);
    if (*hyper) cmd_hyperparam(g, hp);
    if (*report) cmd_report(g, rep);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace pann::cli
