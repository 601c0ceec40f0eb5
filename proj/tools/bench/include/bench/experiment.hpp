#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <ahc/active_cluster.hpp>
#include <ahc/hbm.hpp>

namespace ahc::bench {

/// Invalid or incomplete experiment configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written (exit code 3).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { NoiseThreshold, SuccessVsS, OutlierVsSigma, ProbeScaling, RuntimeScaling, SingleRun };
enum class Algorithm { ActiveSpectral, ActiveKmeans, Heurspec, HierSpectral, HierKmeans, SingleLinkage };

const char* to_string(ExperimentKind kind) noexcept;
const char* to_string(Algorithm algorithm) noexcept;
ExperimentKind parse_experiment_kind(const std::string& text);
Algorithm parse_algorithm(const std::string& text);
bool is_active(Algorithm algorithm) noexcept;

/// Planted hierarchy used for every instance of an experiment.
struct HbmConfig {
  std::size_t depth = 1;          // balanced binary depth; ignored when leaf_size > 0
  std::size_t leaf_size = 0;      // > 0: depth = ceil(log2(n / leaf_size)) for each n
  std::vector<double> levels;     // constant value per depth, root split first; empty = even bands
  double lo = 0.2;                // even bands: root split value
  double hi = 0.9;                // even bands: leaf value
  double width = 0.0;             // > 0: band [v - width, v + width] per level, uniform draws
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::SingleRun;
  std::vector<Algorithm> algorithms;
  std::vector<std::size_t> n;
  std::vector<double> sigma;
  std::vector<std::size_t> s;  // empty: s = ceil(s_factor * ln n)
  double s_factor = 1.0;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  HbmConfig hbm;
  int k = 2;
  int kmax = 5;
  std::uint64_t outlier_triplets = 20000;  // 0 = exact enumeration
  std::size_t max_depth = 0;
  bool record_wall_time = true;
  bool plot = true;
  std::size_t workers = 1;
  std::filesystem::path output_dir = "results";

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// INI-style config (see configs/ for the schema).
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

struct GridPoint {
  std::size_t n = 0;
  double sigma = 0.0;
  std::size_t s = 0;
};

/// n-major, then sigma, then s.
std::vector<GridPoint> expand_grid(const ExperimentConfig& config);

std::size_t default_s(std::size_t n, double factor);

/// The spec of the instance shared by all algorithms of one trial.
NoisyHbmSpec instance_spec(const ExperimentConfig& config, const GridPoint& point, std::uint64_t trial_seed);

/// Seed of trial `trial` at grid point `grid_index`.
std::uint64_t trial_seed(std::uint64_t master, std::size_t grid_index, std::size_t trial);

struct TrialRecord {
  Algorithm algorithm = Algorithm::ActiveSpectral;
  std::size_t n = 0;
  double sigma = 0.0;
  std::size_t s = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double outlier_fraction = 0.0;
  std::uint64_t unique_queries = 0;
  double wall_time_ms = 0.0;
  std::string error_tag;  // empty when the run completed
  // Not written to the CSV.
  std::uint64_t requested_pairs = 0;  // sum over splits of C(|S|,2) + (|C|-|S|)|S| (active only)
};

struct TrialOutput {
  TrialRecord record;
  std::optional<ClusterTree> tree;
  SplitLog log;
};

/// Runs one algorithm on one instance.
TrialOutput run_trial(const ExperimentConfig& config, Algorithm algorithm, const GridPoint& point,
                      std::uint64_t seed, const HbmInstance& instance);

struct SummaryRow {
  Algorithm algorithm = Algorithm::ActiveSpectral;
  std::size_t n = 0;
  double sigma = 0.0;
  std::size_t s = 0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double success_rate = 0.0;
  double success_se = 0.0;
  double outlier_mean = 0.0;
  double outlier_se = 0.0;
  double queries_mean = 0.0;
  double queries_se = 0.0;
  double time_mean_ms = 0.0;
  double time_se_ms = 0.0;
};

/// Groups consecutive records with equal (algorithm, n, sigma, s). Failed trials count as
/// unsuccessful and are left out of the outlier, query and time means.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

/// Runs every (grid point, trial) task, all algorithms per task, on `workers` threads.
/// Records come back ordered by grid point, algorithm, trial.
std::vector<TrialRecord> run_trials(const ExperimentConfig& config, std::size_t workers);

struct ExperimentFiles {
  std::filesystem::path trials;
  std::filesystem::path summary;
  std::optional<std::filesystem::path> plot;
};

/// run_trials, then writes trials.csv, summary.csv and (optionally) plot.gp into `dir`.
ExperimentFiles run_experiment(const ExperimentConfig& config, const std::filesystem::path& dir,
                               std::size_t workers);

struct SingleRunFiles {
  std::filesystem::path tree;
  std::filesystem::path trace;
  std::filesystem::path budget;
  QueryBudgetReport report;
};

/// First algorithm at the single grid point, trial 0: writes tree.txt, trace.tsv, budget.txt.
SingleRunFiles run_single(const ExperimentConfig& config, const std::filesystem::path& dir);

// CSV

inline constexpr const char* kTrialHeader =
    "algorithm,n,sigma,s,seed,success,outlier_fraction,unique_queries,wall_time_ms,error_tag";
inline constexpr const char* kSummaryHeader =
    "algorithm,n,sigma,s,trials,failures,success_rate,success_se,outlier_mean,outlier_se,queries_mean,queries_se,"
    "time_mean_ms,time_se_ms";

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_trials_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(std::istream& in);
void write_gnuplot(std::ostream& out, const ExperimentConfig& config, const std::string& summary_file);

// Log-log regression

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square residual in log space
  std::size_t points = 0;
};

/// Ordinary least squares on (ln x, ln y). Needs at least 3 points with x, y > 0.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

enum class SlopeTarget { Queries, Time };

/// Slope of queries_mean or time_mean_ms against n for one algorithm of a summary.
/// Rows sharing an n are averaged. `algorithm` may be omitted when the summary holds one.
SlopeFit fit_summary_slope(const std::vector<SummaryRow>& rows, SlopeTarget target,
                           std::optional<Algorithm> algorithm = std::nullopt);

}  // namespace ahc::bench
