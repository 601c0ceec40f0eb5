#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bench/experiment.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kIoExit = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace ahc::bench;

  CLI::App app{"Active hierarchical clustering experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::size_t workers = 0;
  auto* run = app.add_subcommand("run", "Run an experiment grid and write trials.csv and summary.csv");
  run->add_option("config", config_path, "Experiment config (INI)")->required();
  run->add_option("--output-dir", output_dir, "Output directory (default: experiment.output_dir)");
  run->add_option("--workers", workers, "Worker threads (default: experiment.workers)")->check(CLI::PositiveNumber);

  auto* single = app.add_subcommand("single", "Run one clustering and write the tree, trace and query budget");
  single->add_option("config", config_path, "single_run config (INI)")->required();
  single->add_option("--output-dir", output_dir, "Output directory (default: experiment.output_dir)");

  std::string summary_path;
  std::string x_axis = "n";
  std::string y_axis = "queries";
  std::string algorithm;
  auto* slope = app.add_subcommand("slope", "Log-log slope of a summary column against n");
  slope->add_option("summary", summary_path, "summary.csv from `bench run`")->required();
  slope->add_option("--x", x_axis, "x column")->check(CLI::IsMember({"n"}));
  slope->add_option("--y", y_axis, "y column")->check(CLI::IsMember({"queries", "time"}));
  slope->add_option("--algorithm", algorithm, "Algorithm to fit (required when the summary holds several)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*run) {
      const ExperimentConfig config = load_config(config_path);
      const auto dir = output_dir.empty() ? config.output_dir : std::filesystem::path(output_dir);
      const ExperimentFiles files = run_experiment(config, dir, workers == 0 ? config.workers : workers);
      std::cout << "wrote " << files.trials.string() << '\n' << "wrote " << files.summary.string() << '\n';
      if (files.plot) std::cout << "wrote " << files.plot->string() << '\n';
    } else if (*single) {
      const ExperimentConfig config = load_config(config_path);
      const auto dir = output_dir.empty() ? config.output_dir : std::filesystem::path(output_dir);
      const SingleRunFiles files = run_single(config, dir);
      std::cout << "unique pairs queried: " << files.report.unique_pairs_queried
                << " (fraction " << files.report.fraction_of_total << ")\n"
                << "wrote " << files.tree.string() << ", " << files.trace.string() << ", " << files.budget.string()
                << '\n';
    } else if (*slope) {
      std::ifstream in(summary_path);
      if (!in) throw IoError("cannot open " + summary_path);
      const auto rows = read_summary_csv(in);
      std::optional<Algorithm> which;
      if (!algorithm.empty()) which = parse_algorithm(algorithm);
      const SlopeFit fit = fit_summary_slope(rows, y_axis == "time" ? SlopeTarget::Time : SlopeTarget::Queries, which);
      std::cout << "slope " << fit.slope << "\nintercept " << fit.intercept << "\nresidual " << fit.residual
                << "\npoints " << fit.points << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoExit;
  } catch (const ahc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ahc::ErrorCode::Io ? kIoExit : 1;
  }
  return 0;
}
