// qcs_lab: quantized-compressive-sensing experiment runner.
//
// Subcommands:
//   run <config-file> | run --preset exp-a|exp-b|exp-c|exp-d
//   check [--seed S]
//   plot <csv> <out.svg>
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure,
// 3 property-suite failure.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "qcs/qcs.hpp"

namespace {

struct RunArgs {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out_dir = ".";
  bool no_timestamp = false;
  bool fixed_matrix = false;
  bool plot = false;
  int jobs = 1;
};

int do_run(const RunArgs& args) {
  qcs::ExperimentConfig cfg;
  if (!args.preset.empty()) {
    cfg = qcs::preset(args.preset);
  } else if (!args.config_path.empty()) {
    cfg = qcs::parse_config_file(args.config_path);
  } else {
    std::cerr << "run: either a config file or --preset is required\n";
    return 1;
  }
  if (args.seed) cfg.master_seed = *args.seed;
  if (args.trials) cfg.trials = *args.trials;
  if (args.fixed_matrix) cfg.fixed_matrix = true;

  qcs::RunOptions opts;
  opts.out_dir = args.out_dir;
  opts.timestamp = !args.no_timestamp;
  opts.jobs = args.jobs;

  const qcs::RunResult result = qcs::run_experiment(cfg, opts);
  std::cout << qcs::format_summary(cfg, result);
  if (args.plot) {
    std::filesystem::path svg = result.csv_path;
    svg.replace_extension(".svg");
    qcs::emit_plot(result.sweep, svg);
    std::cout << "  svg: " << svg.string() << "\n";
  }
  if (result.triangle_failures > 0 || result.optimality_failures > 0) {
    std::cerr << "run: per-trial inequality checks failed\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantized compressive sensing laboratory"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run an experiment sweep");
  run->add_option("config", run_args.config_path, "config file (key = value lines)");
  run->add_option("--preset", run_args.preset, "built-in experiment: exp-a, exp-b, exp-c, exp-d");
  run->add_option("--seed", run_args.seed, "master seed override");
  run->add_option("--trials", run_args.trials, "trial count override");
  run->add_option("--out-dir", run_args.out_dir, "output directory (default .)");
  run->add_flag("--no-timestamp", run_args.no_timestamp, "omit the CSV timestamp header");
  run->add_flag("--fixed-matrix", run_args.fixed_matrix,
                "reuse one operator and dither across trials of a grid point");
  run->add_flag("--plot", run_args.plot, "also emit an SVG plot next to the CSV");
  run->add_option("--jobs", run_args.jobs, "worker threads (output is identical for any count)")
      ->check(CLI::PositiveNumber);

  std::uint64_t check_seed = 1;
  CLI::App* check = app.add_subcommand("check", "run the property-check suite");
  check->add_option("--seed", check_seed, "suite seed (default 1)");

  std::string plot_csv, plot_out;
  CLI::App* plot = app.add_subcommand("plot", "render a CSV sweep as an SVG log-log plot");
  plot->add_option("csv", plot_csv, "input CSV produced by run")->required();
  plot->add_option("out", plot_out, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return do_run(run_args);
    if (check->parsed()) {
      const qcs::PropertyReport report = qcs::run_property_suite(check_seed);
      qcs::print(report, std::cout);
      return report.all_pass() ? 0 : 3;
    }
    if (plot->parsed()) {
      const auto records = qcs::read_csv(plot_csv);
      const qcs::SweepResult sweep = qcs::aggregate_trials(records);
      qcs::emit_plot(sweep, plot_out);
      std::cout << "svg: " << plot_out << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
