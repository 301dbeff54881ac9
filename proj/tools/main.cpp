#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "levyest/adaptive.hpp"
#include "levyest/bench.hpp"
#include "levyest/estimator.hpp"
#include "levyest/models.hpp"
#include "levyest/run_config.hpp"

namespace {

using namespace levyest;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.precision(17);
  return out;
}

void write_curve_csv(const std::string& path,
                     const std::vector<SelectionTrace>& traces) {
  auto out = open_out(path);
  out << "x0,h_hat,g_hat,n_hat\n";
  for (const auto& t : traces) {
    out << t.x0 << ',' << t.h_hat << ',' << t.estimate << ',';
    if (t.levy_value) out << *t.levy_value;
    out << '\n';
  }
}

void write_curve_csv(const std::string& path,
                     const std::vector<PointEstimate>& curve) {
  auto out = open_out(path);
  out << "x0,h,g_hat,n_hat\n";
  for (const auto& p : curve) {
    out << p.x0 << ',' << p.h << ',' << p.value << ',';
    if (p.levy_value) out << *p.levy_value;
    out << '\n';
  }
}

void write_trace_csv(const std::string& path,
                     const std::vector<SelectionTrace>& traces) {
  auto out = open_out(path);
  out << "x0,h,v,a,criterion,chosen\n";
  for (const auto& t : traces)
    for (const auto& row : t.rows)
      out << t.x0 << ',' << row.h << ',' << row.v << ',' << row.a << ','
          << row.criterion << ',' << (row.chosen ? 1 : 0) << '\n';
}

int run_simulate(const RunConfig& cfg) {
  if (!cfg.model)
    throw config_error("simulate needs a [model] section");
  if (!cfg.scheme)
    throw config_error("simulate needs a [sampling] section");
  const auto data = sample_increments(*cfg.model, *cfg.scheme, cfg.seed);
  const std::string path = cfg.out_prefix + ".increments.csv";
  data.to_csv(path);
  std::cout << "wrote " << path << " (" << data.size()
            << " increments, model " << cfg.model->name() << ")\n";
  return 0;
}

int run_estimate(const RunConfig& cfg, const std::string& data_path) {
  const auto data = IncrementSeries::from_csv(data_path);

  double lo = 0.0, hi = 0.0;
  if (cfg.est_lo && cfg.est_hi) {
    lo = *cfg.est_lo;
    hi = *cfg.est_hi;
  } else if (cfg.model) {
    const auto iv = cfg.model->default_eval_interval();
    lo = cfg.est_lo.value_or(iv.first);
    hi = cfg.est_hi.value_or(iv.second);
  } else {
    throw config_error(
        "estimate needs [estimate] eval_lo/eval_hi or a [model] section");
  }
  const auto points = eval_grid(lo, hi, cfg.est_points);

  if (cfg.estimate_mode == "fixed") {
    CurveOptions opts;
    opts.path = cfg.path;
    opts.min_bins = cfg.min_bins;
    const auto curve =
        estimate_curve(data, cfg.kernel, *cfg.fixed_h, points, opts);
    const std::string path = cfg.out_prefix + ".curve.csv";
    write_curve_csv(path, curve);
    std::cout << "wrote " << path << " (" << curve.size() << " points, h="
              << *cfg.fixed_h << ")\n";
    return 0;
  }

  const AdaptiveConfig acfg = cfg.make_adaptive(data.n_delta_bar());
  const auto traces =
      adaptive_curve(data, cfg.kernel, acfg, points, cfg.model);
  const std::string curve_path = cfg.out_prefix + ".curve.csv";
  const std::string trace_path = cfg.out_prefix + ".trace.csv";
  write_curve_csv(curve_path, traces);
  write_trace_csv(trace_path, traces);
  std::cout << "wrote " << curve_path << " and " << trace_path << " ("
            << traces.size() << " points, grid size "
            << acfg.grid.size() << ")\n";
  return 0;
}

int run_bench(const RunConfig& cfg) {
  const ExperimentSpec spec = cfg.make_experiment();
  const bool irregular =
      !std::holds_alternative<RegularScheme>(spec.scheme);

  RiskReport report;
  nlohmann::ordered_json json;
  if (irregular) {
    const IrregularReport ir = irregular_experiment(spec);
    report = ir.report;
    json = report_to_json(report);
    json["irregular_diagnostics"] = {
        {"delta_bar", ir.diagnostics.delta_bar},
        {"delta_sq_bar", ir.diagnostics.delta_sq_bar},
        {"condition_value", ir.diagnostics.condition_value},
        {"threshold", ir.diagnostics.threshold},
        {"condition_ok", ir.diagnostics.condition_ok},
    };
    if (!ir.diagnostics.condition_ok)
      std::cerr << "warning: sampling balance "
                << ir.diagnostics.condition_value << " exceeds 1/n = "
                << ir.diagnostics.threshold
                << "; risk bounds may degrade\n";
  } else {
    report = run_experiment(spec);
    json = report_to_json(report);
  }

  if (cfg.output_format != "csv") {
    const std::string path = cfg.out_prefix + ".report.json";
    auto out = open_out(path);
    out << json.dump(2) << '\n';
    std::cout << "wrote " << path << '\n';
  }
  if (cfg.output_format != "json") {
    const std::string path = cfg.out_prefix + ".summary.csv";
    auto out = open_out(path);
    out << report_csv_summary_header() << '\n'
        << report_csv_summary_row(report) << '\n';
    std::cout << "wrote " << path << '\n';
  }

  const int ok = static_cast<int>(report.replications.size()) - report.n_failed;
  std::cout << report.model_name << ": n_delta_bar=" << report.n_delta_bar
            << " mean_mise=" << report.mean_mise << " (" << ok << "/"
            << report.replications.size() << " replications)\n";
  if (ok == 0) {
    std::cerr << "error: every replication failed";
    if (!report.replications.empty())
      std::cerr << " (first: " << report.replications.front().error << ")";
    std::cerr << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "levyest: simulate pure-jump processes, estimate x*density(x) curves "
      "from increments, and run Monte Carlo risk benchmarks"};
  app.require_subcommand(1);

  std::string config_path, data_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  int threads_override = -1;

  auto add_common = [&](CLI::App* sub, bool with_threads) {
    sub->add_option("--config", config_path, "INI-style run configuration")
        ->required();
    sub->add_option("--seed", seed_override, "override [run] seed");
    sub->add_option("--out", out_override, "override [output] out prefix");
    if (with_threads)
      sub->add_option("--threads", threads_override,
                      "worker threads (0 = all cores)");
  };

  CLI::App* simulate =
      app.add_subcommand("simulate", "draw increments, write a CSV");
  add_common(simulate, false);
  CLI::App* estimate = app.add_subcommand(
      "estimate", "fixed-bandwidth or adaptive curve from an increments CSV");
  add_common(estimate, false);
  estimate->add_option("--data", data_path, "increments CSV (delta,z)")
      ->required();
  CLI::App* bench =
      app.add_subcommand("bench", "Monte Carlo risk experiment");
  add_common(bench, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = RunConfig::from_file(config_path);
    for (const auto* sub : app.get_subcommands()) {
      if (sub->count("--seed") > 0) cfg.seed = seed_override;
      if (sub->count("--out") > 0) cfg.out_prefix = out_override;
      if (sub->get_option_no_throw("--threads") != nullptr &&
          sub->count("--threads") > 0)
        cfg.threads = threads_override;
    }
    if (simulate->parsed()) return run_simulate(cfg);
    if (estimate->parsed()) return run_estimate(cfg, data_path);
    return run_bench(cfg);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
