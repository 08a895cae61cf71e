#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "pann/calibration.hpp"
#include "pann/constitutive.hpp"
#include "pann/dataset.hpp"
#include "pann/error.hpp"
#include "pann/model_io.hpp"
#include "pann/stability.hpp"
#include "svg.hpp"

namespace pann::cli {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::IoError, fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", path.string()));
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, fmt::format("write failed for {}", path.string()));
}

Cubic to_cubic(const std::vector<double>& c, const char* name) {
  if (c.size() != 4) throw Error(ErrorCode::InvalidArgument, fmt::format("{} needs 4 coefficients", name));
  return {{c[0], c[1], c[2], c[3]}};
}

struct Range {
  double lo, hi;
  std::size_t n;
};

Range to_range(const std::vector<double>& g, const char* name) {
  if (g.size() != 3 || !(g[2] >= 1.0) || g[2] != std::floor(g[2])) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("{} expects min,max,count", name));
  }
  return {g[0], g[1], static_cast<std::size_t>(g[2])};
}

std::vector<double> linspace(const Range& r) {
  std::vector<double> v(r.n);
  for (std::size_t i = 0; i < r.n; ++i) {
    v[i] = r.n == 1 ? r.lo : r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(r.n - 1);
  }
  return v;
}

std::vector<fs::path> to_paths(const std::vector<std::string>& names) {
  std::vector<fs::path> out;
  for (const auto& n : names) {
    if (!fs::exists(n)) throw Error(ErrorCode::FileNotFound, n);
    out.emplace_back(n);
  }
  return out;
}

Dataset load_with_split(const std::vector<std::string>& files, const SplitOptions& split) {
  if (files.empty()) throw Error(ErrorCode::EmptyDataset, "no data files given");
  auto ds = load_dataset(to_paths(files));
  std::vector<double> held_out;
  for (double raw : split.test_params) held_out.push_back(normalize_parameter(raw, ds.sources.front()));
  assign_split(ds, [&](const MaterialSample& s) {
    if (split.calib_lambda_max && s.lambda > *split.calib_lambda_max) return true;
    return std::any_of(held_out.begin(), held_out.end(),
                       [&](double t) { return !s.t.empty() && std::abs(s.t[0] - t) <= 1e-12; });
  });
  validate_split(ds);
  return ds;
}

std::string join(const std::vector<double>& v) { return fmt::format("{}", fmt::join(v, ";")); }

/// Unique labels from file stems; repeated stems get an index suffix.
std::vector<std::string> labels_for(const std::vector<std::string>& files) {
  std::map<std::string, int> count;
  for (const auto& f : files) ++count[fs::path(f).stem().string()];
  std::vector<std::string> out;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto stem = fs::path(files[i]).stem().string();
    out.push_back(count[stem] > 1 ? fmt::format("{}_{}", stem, i) : stem);
  }
  return out;
}

nlohmann::ordered_json record_to_json(const CalibrationRecord& r) {
  nlohmann::ordered_json j;
  j["restart_rank"] = r.restart_rank;
  j["restart_index"] = r.restart_index;
  j["seed"] = r.seed;
  j["status"] = std::string(to_string(r.status));
  j["epochs_run"] = r.epochs_run;
  j["initial_mse"] = r.initial_mse;
  j["final_mse"] = r.final_mse;
  j["log10_mse"] = r.log10_mse;
  j["learning_rate"] = r.adam.learning_rate;
  j["beta1"] = r.adam.beta1;
  j["beta2"] = r.adam.beta2;
  j["epsilon"] = r.adam.epsilon;
  j["kernels"] = std::string(r.kernels);
  return j;
}

TrainConfig train_config(const GlobalOptions& g, std::size_t epochs, std::size_t restarts, double lr) {
  TrainConfig c;
  c.epochs = epochs;
  c.restarts = restarts;
  c.seed = g.seed;
  c.adam.learning_rate = lr;
  c.threads = g.threads;
  c.kernels = kernels::parse_kernel_choice(g.kernels);
  return c;
}

std::vector<std::vector<double>> distinct_parameters(std::span<const MaterialSample> samples) {
  std::set<std::vector<double>> seen;
  for (const auto& s : samples) seen.insert(s.t);
  return {seen.begin(), seen.end()};
}

}  // namespace

// ---------------------------------------------------------------------------

void cmd_gendata(const GlobalOptions& g, const GenDataOptions& o) {
  MooneyRivlinParametrized law;
  std::vector<double> params = o.params;
  std::vector<double> range = o.param_range;
  if (o.oracle == "mooney-rivlin") {
    law.c10 = to_cubic(o.c10_cubic, "--c10-cubic");
    law.c01 = to_cubic(o.c01_cubic, "--c01-cubic");
    law.c11 = to_cubic(o.c11_cubic, "--c11-cubic");
    if (range.empty()) range = {0.09, 0.11};
    if (params.empty()) params = {0.09, 0.10, 0.11};
  } else if (o.oracle == "neo-hookean") {
    law = neo_hookean(o.neo_c);
    if (range.empty()) range = {0.0, 1.0};
    if (params.empty()) params = {0.5};
  } else {
    throw Error(ErrorCode::InvalidArgument, fmt::format("unknown oracle '{}'", o.oracle));
  }
  if (range.size() != 2 || !(range[0] <= range[1])) {
    throw Error(ErrorCode::InvalidArgument, "--param-range expects min,max with min <= max");
  }
  law.param_min = range[0];
  law.param_max = range[1];
  const auto lambdas = linspace(to_range(o.grid, "--grid"));
  const MaterialLaw material{law, o.oracle};
  const DatasetMeta meta{range[0], range[1], o.label.empty() ? o.oracle : o.label, fmt::format("synthetic {}", o.oracle)};

  ensure_dir(g.out);
  std::mt19937_64 rng(g.seed);
  std::normal_distribution<double> noise(0.0, o.noise > 0.0 ? o.noise : 1.0);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double t = normalize_parameter(params[k], meta);
    std::vector<RawRecord> rows;
    for (double lambda : lambdas) {
      double p = uniaxial_stress(material, lambda, std::vector<double>{t});
      if (o.noise > 0.0) p += noise(rng);
      rows.push_back({lambda, p, params[k]});
    }
    write_dataset(g.out / fmt::format("{}_{}.csv", meta.material_label, k), rows, meta);
  }
}

void cmd_calibrate(const GlobalOptions& g, const CalibrateOptions& o) {
  const auto ds = load_with_split(o.data, o.split);
  const auto calib = ds.calibration_samples();
  const auto test = ds.test_samples();
  const ArchitectureSpec arch{parse_architecture(o.arch), o.nodes, 1};
  auto results = calibrate(calib, train_config(g, o.epochs, o.restarts, o.learning_rate), arch);

  ensure_dir(g.out);
  auto csv = open_out(g.out / "records.csv");
  csv << "rank,restart,seed,status,epochs_run,initial_mse,final_mse,log10_mse,test_mse,learning_rate,beta1,beta2,"
         "epsilon,kernels\n";
  bool any_ok = false;
  for (auto& r : results) {
    const auto& rec = r.record;
    any_ok |= rec.status == RestartStatus::Completed;
    const MaterialLaw law{r.model, o.arch};
    const auto ev = evaluate(law, test);
    r.model.metadata = nlohmann::ordered_json::object();
    r.model.metadata["calibration"] = record_to_json(rec);
    r.model.metadata["data"] = o.data;
    r.model.metadata["calibration_samples"] = calib.size();
    r.model.metadata["test_samples"] = test.size();
    if (ev.defined) r.model.metadata["test_mse"] = ev.mse;
    save_model(r.model, g.out / fmt::format("model_{}.json", rec.restart_rank));
    csv << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", rec.restart_rank, rec.restart_index, rec.seed,
                       to_string(rec.status), rec.epochs_run, rec.initial_mse, rec.final_mse, rec.log10_mse,
                       ev.defined ? fmt::format("{}", ev.mse) : std::string{}, rec.adam.learning_rate, rec.adam.beta1,
                       rec.adam.beta2, rec.adam.epsilon, rec.kernels);
  }
  if (!csv) throw Error(ErrorCode::IoError, "write failed for records.csv");
  if (!any_ok) throw Error(ErrorCode::InvalidArgument, "every restart diverged");
}

void cmd_evaluate(const GlobalOptions& g, const EvaluateOptions& o) {
  const MaterialLaw law{load_model(o.model), fs::path(o.model).stem().string()};
  const auto ds = load_with_split(o.data, o.split);
  std::vector<MaterialSample> samples;
  if (o.slice == "all") {
    samples = ds.samples;
  } else if (o.slice == "calibration") {
    samples = ds.calibration_samples();
  } else if (o.slice == "test") {
    samples = ds.test_samples();
  } else {
    throw Error(ErrorCode::InvalidArgument, fmt::format("unknown slice '{}'", o.slice));
  }
  const auto ev = evaluate(law, samples);

  ensure_dir(g.out);
  auto csv = open_out(g.out / "residuals.csv");
  csv << "lambda,t,stress_data,stress_model,residual\n";
  for (const auto& r : ev.rows) {
    csv << fmt::format("{},{},{},{},{}\n", r.lambda, join(r.t), r.stress_data, r.stress_model, r.residual);
  }
  nlohmann::ordered_json summary;
  summary["model"] = o.model;
  summary["slice"] = o.slice;
  summary["samples"] = ev.rows.size();
  summary["defined"] = ev.defined;
  if (ev.defined) {
    summary["mse"] = ev.mse;
    summary["log10_mse"] = ev.mse > 0.0 ? std::log10(ev.mse) : -std::numeric_limits<double>::infinity();
  }
  write_text(g.out / "evaluation.json", summary.dump(2) + "\n");

  const auto params = distinct_parameters(samples);
  for (std::size_t k = 0; k < params.size(); ++k) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : samples)
      if (s.t == params[k]) pts.emplace_back(s.lambda, s.stress);
    std::stable_sort(pts.begin(), pts.end());
    std::vector<double> lambdas, data;
    for (const auto& [l, p] : pts) lambdas.push_back(l), data.push_back(p);
    write_curve_csv(g.out / fmt::format("curve_{}.csv", k), law, lambdas, data, params[k]);
  }
}

void cmd_scan(const GlobalOptions& g, const ScanOptions& o) {
  std::vector<MaterialLaw> laws;
  const auto labels = labels_for(o.models);
  for (std::size_t i = 0; i < o.models.size(); ++i) {
    if (!fs::exists(o.models[i])) throw Error(ErrorCode::FileNotFound, o.models[i]);
    laws.push_back({load_model(o.models[i]), labels[i]});
  }
  for (const auto& name : o.builtin) {
    if (name == "neo-hookean") {
      laws.push_back({neo_hookean(o.builtin_c), name});
    } else if (name == "sign-flipped") {
      laws.push_back({sign_flipped_neo_hookean(o.builtin_c), name});
    } else if (name == "i2-only") {
      laws.push_back({i2_only(o.builtin_c), name});
    } else if (name == "mooney-rivlin") {
      laws.push_back({default_mooney_rivlin_oracle(), name});
    } else {
      throw Error(ErrorCode::InvalidArgument, fmt::format("unknown builtin law '{}'", name));
    }
  }
  if (laws.empty()) throw Error(ErrorCode::InvalidArgument, "scan needs --model or --builtin");

  std::vector<std::vector<double>> t_grid;
  for (double t : o.t_grid) t_grid.push_back({t});
  const auto axis = linspace(to_range(o.grid, "--grid"));
  const StretchGrid grid{axis, axis};
  DirectionSet dirs;
  if (o.generator == "fibonacci") {
    dirs = DirectionSet::fibonacci(o.directions);
  } else if (o.generator == "spherical") {
    dirs = DirectionSet::spherical_grid(o.directions);
  } else {
    throw Error(ErrorCode::InvalidArgument, fmt::format("unknown direction generator '{}'", o.generator));
  }

  ensure_dir(g.out);
  auto summary = open_out(g.out / "scan_summary.csv");
  summary << "label,t,points,failed,elliptic_fraction,compressible_fraction,be_fraction,mono_fraction\n";
  std::vector<StabilityReport> reports;
  for (const auto& law : laws) {
    auto report = scan_invariant_plane(law, t_grid, grid, dirs);
    write_text(g.out / fmt::format("scan_{}.json", law.label), report_to_json(report).dump(2) + "\n");
    write_report_csv(g.out / fmt::format("scan_{}.csv", law.label), report);
    for (const auto& a : report.per_parameter) {
      const double ok = static_cast<double>(a.points - a.failed);
      summary << fmt::format("{},{},{},{},{},{},{},{}\n", law.label, join(a.t), a.points, a.failed,
                             a.elliptic_fraction, ok > 0 ? static_cast<double>(a.compressible_elliptic) / ok : 0.0,
                             a.be_fraction, ok > 0 ? static_cast<double>(a.mono_ok) / ok : 0.0);
    }
    reports.push_back(std::move(report));
  }
  if (!summary) throw Error(ErrorCode::IoError, "write failed for scan_summary.csv");

  if (reports.size() >= 2) {
    auto cmp = open_out(g.out / "comparison.csv");
    cmp << "t";
    for (const auto& r : reports) cmp << ',' << r.label;
    cmp << '\n';
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      cmp << join(t_grid[k]);
      for (const auto& r : reports) cmp << fmt::format(",{}", r.per_parameter[k].elliptic_fraction);
      cmp << '\n';
    }
  }
}

void cmd_hyperparam(const GlobalOptions& g, const HyperparamOptions& o) {
  const auto ds = load_with_split(o.data, {});
  const auto calib = ds.calibration_samples();
  const auto config = train_config(g, o.epochs, o.restarts, o.learning_rate);

  ensure_dir(g.out);
  auto csv = open_out(g.out / "hyperparam.csv");
  csv << "architecture,n,total_params,best_mse,best_log10_mse,nonzero,nonzero_fraction\n";
  for (const auto& name : o.archs) {
    const auto arch = parse_architecture(name);
    for (std::size_t n : o.nodes) {
      const auto results = calibrate(calib, config, {arch, n, 1});
      const auto& best = results.front();
      const auto sp = sparsity(best.model);
      csv << fmt::format("{},{},{},{},{},{},{}\n", name, n, sp.total, best.record.final_mse, best.record.log10_mse,
                         sp.nonzero, static_cast<double>(sp.nonzero) / static_cast<double>(sp.total));
    }
  }
  if (!csv) throw Error(ErrorCode::IoError, "write failed for hyperparam.csv");
}

void cmd_report(const GlobalOptions& g, const ReportOptions& o) {
  if (o.models.empty()) throw Error(ErrorCode::InvalidArgument, "report needs at least one --model");
  std::vector<MaterialSample> samples;
  if (!o.data.empty()) samples = load_with_split(o.data, {}).samples;
  auto params = distinct_parameters(samples);
  if (params.empty())
    for (double t : o.t_grid) params.push_back({t});

  double lo = 1.0, hi = 2.0;
  if (o.lambda_range.size() == 2) {
    lo = o.lambda_range[0], hi = o.lambda_range[1];
  } else if (!o.lambda_range.empty()) {
    throw Error(ErrorCode::InvalidArgument, "--lambda-range expects min,max");
  } else if (!samples.empty()) {
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end(),
                                              [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
    lo = mn->lambda, hi = mx->lambda;
  }
  const auto lambdas = linspace({lo, hi, std::max<std::size_t>(o.points, 2)});

  ensure_dir(g.out);
  const auto labels = labels_for(o.models);
  for (std::size_t mi = 0; mi < o.models.size(); ++mi) {
    if (!fs::exists(o.models[mi])) throw Error(ErrorCode::FileNotFound, o.models[mi]);
    const MaterialLaw law{load_model(o.models[mi]), labels[mi]};
    Chart chart{fmt::format("Uniaxial tension: {}", labels[mi]), "stretch", "first Piola-Kirchhoff stress [MPa]", {}};
    for (std::size_t k = 0; k < params.size(); ++k) {
      Series curve{fmt::format("model t={}", join(params[k])), lambdas, {}, false, k};
      for (double l : lambdas) curve.y.push_back(uniaxial_stress(law, l, params[k]));
      chart.series.push_back(std::move(curve));
      Series pts{fmt::format("data t={}", join(params[k])), {}, {}, true, k};
      for (const auto& s : samples)
        if (s.t == params[k]) pts.x.push_back(s.lambda), pts.y.push_back(s.stress);
      if (!pts.x.empty()) chart.series.push_back(std::move(pts));
    }
    write_svg(g.out / fmt::format("{}_stress.svg", labels[mi]), chart);

    Chart coeff{fmt::format("Stress coefficients: {}", labels[mi]), "stretch", "coefficient [MPa]", {}};
    for (std::size_t k = 0; k < params.size(); ++k) {
      Series c1{fmt::format("dpsi/dI1 t={}", join(params[k])), lambdas, {}, false, 2 * k};
      Series c2{fmt::format("dpsi/dI2 t={}", join(params[k])), lambdas, {}, false, 2 * k + 1};
      for (double l : lambdas) {
        const auto inv = uniaxial_invariants(l);
        const auto c = stress_coefficients(law, {inv.i1_bar, inv.i2_bar, params[k]});
        c1.y.push_back(c[0]);
        c2.y.push_back(c[1]);
      }
      coeff.series.push_back(std::move(c1));
      coeff.series.push_back(std::move(c2));
    }
    write_svg(g.out / fmt::format("{}_coefficients.svg", labels[mi]), coeff);
  }
}

}  // namespace pann::cli
