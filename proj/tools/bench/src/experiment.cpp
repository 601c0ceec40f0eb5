#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include <ahc/metrics.hpp>
#include <ahc/random.hpp>

#include "bench/experiment.hpp"

namespace ahc::bench {

namespace {

FlatClusterer spectral_for(int k) {
  return k == 2 ? FlatClusterer::spectral() : FlatClusterer{FlatKind::SpectralKway};
}

ClusterTree cluster(const ExperimentConfig& config, Algorithm algorithm, const GridPoint& point, std::uint64_t seed,
                    SimilarityOracle& oracle, SplitLog& log) {
  std::vector<ObjectId> ids(point.n);
  std::iota(ids.begin(), ids.end(), ObjectId{0});

  ActiveConfig active;
  active.s = point.s;
  active.k = config.k;
  active.seed = seed;
  active.max_depth = config.max_depth;

  switch (algorithm) {
    case Algorithm::ActiveSpectral:
      active.subroutine = spectral_for(config.k);
      return active_cluster(oracle, ids, active, &log);
    case Algorithm::ActiveKmeans:
      active.subroutine = FlatClusterer::kmeans();
      return active_cluster(oracle, ids, active, &log);
    case Algorithm::Heurspec:
      active.k = config.kmax;
      active.subroutine = FlatClusterer{FlatKind::SpectralKway};
      active.heuristics = Heuristics::all();
      return heurspec_cluster(oracle, ids, active, &log);
    case Algorithm::HierSpectral:
      return nonactive_hierarchical(oracle, ids, config.k, spectral_for(config.k), seed, &log, config.max_depth);
    case Algorithm::HierKmeans:
      return nonactive_hierarchical(oracle, ids, config.k, FlatClusterer::kmeans(), seed, &log, config.max_depth);
    case Algorithm::SingleLinkage:
      return single_linkage(oracle.submatrix(ids));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm");
}

double std_error(double sum, double sum_sq, std::size_t count) {
  if (count < 2) return 0.0;
  const double c = static_cast<double>(count);
  const double mean = sum / c;
  const double var = std::max(0.0, (sum_sq - c * mean * mean) / (c - 1.0));
  return std::sqrt(var / c);
}

void create_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

TrialOutput run_trial(const ExperimentConfig& config, Algorithm algorithm, const GridPoint& point,
                      std::uint64_t seed, const HbmInstance& instance) {
  TrialOutput out;
  TrialRecord& rec = out.record;
  rec.algorithm = algorithm;
  rec.n = point.n;
  rec.sigma = point.sigma;
  rec.s = point.s;
  rec.seed = seed;

  SimilarityOracle oracle = SimilarityOracle::from_matrix(instance.similarities);
  const auto start = std::chrono::steady_clock::now();
  try {
    out.tree.emplace(cluster(config, algorithm, point, derive_seed(seed, 0xa1), oracle, out.log));
  } catch (const Error& e) {
    rec.error_tag = to_string(e.code());
  } catch (const std::exception&) {
    rec.error_tag = "Exception";
  }
  const auto stop = std::chrono::steady_clock::now();
  rec.wall_time_ms =
      config.record_wall_time ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
  rec.unique_queries = oracle.unique_pairs();
  if (is_active(algorithm)) rec.requested_pairs = requested_pairs_bound(out.log);

  if (out.tree) {
    rec.success = exact_split_recovery(out.tree->root_partition(), instance.truth.root_partition());
    const OutlierFractionMode mode = config.outlier_triplets == 0
                                         ? OutlierFractionMode::exact()
                                         : OutlierFractionMode::sampled(config.outlier_triplets, derive_seed(seed, 0x0f));
    rec.outlier_fraction = outlier_fraction(*out.tree, instance.truth, mode);
  } else {
    rec.outlier_fraction = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  std::vector<SummaryRow> rows;
  std::size_t i = 0;
  while (i < records.size()) {
    const TrialRecord& first = records[i];
    std::size_t j = i;
    while (j < records.size() && records[j].algorithm == first.algorithm && records[j].n == first.n &&
           records[j].sigma == first.sigma && records[j].s == first.s) {
      ++j;
    }
    SummaryRow row;
    row.algorithm = first.algorithm;
    row.n = first.n;
    row.sigma = first.sigma;
    row.s = first.s;
    row.trials = j - i;

    std::size_t ok = 0;
    double succ = 0.0, out = 0.0, out2 = 0.0, q = 0.0, q2 = 0.0, t = 0.0, t2 = 0.0;
    for (std::size_t r = i; r < j; ++r) {
      const TrialRecord& rec = records[r];
      if (rec.success) succ += 1.0;
      if (!rec.error_tag.empty()) {
        ++row.failures;
        continue;
      }
      ++ok;
      const double u = static_cast<double>(rec.unique_queries);
      out += rec.outlier_fraction;
      out2 += rec.outlier_fraction * rec.outlier_fraction;
      q += u;
      q2 += u * u;
      t += rec.wall_time_ms;
      t2 += rec.wall_time_ms * rec.wall_time_ms;
    }
    const double trials = static_cast<double>(row.trials);
    row.success_rate = succ / trials;
    row.success_se = std::sqrt(row.success_rate * (1.0 - row.success_rate) / trials);
    if (ok > 0) {
      const double c = static_cast<double>(ok);
      row.outlier_mean = out / c;
      row.outlier_se = std_error(out, out2, ok);
      row.queries_mean = q / c;
      row.queries_se = std_error(q, q2, ok);
      row.time_mean_ms = t / c;
      row.time_se_ms = std_error(t, t2, ok);
    } else {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.outlier_mean = row.outlier_se = row.queries_mean = row.queries_se = row.time_mean_ms = row.time_se_ms = nan;
    }
    rows.push_back(row);
    i = j;
  }
  return rows;
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& config, std::size_t workers) {
  config.validate();
  const std::vector<GridPoint> grid = expand_grid(config);
  const std::size_t trials = config.trials;
  const std::size_t algos = config.algorithms.size();
  const std::size_t tasks = grid.size() * trials;
  std::vector<TrialRecord> records(tasks * algos);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= tasks || failed.load()) return;
      const std::size_t g = task / trials;
      const std::size_t t = task % trials;
      try {
        const std::uint64_t seed = trial_seed(config.seed, g, t);
        const HbmInstance instance = generate(instance_spec(config, grid[g], seed));
        for (std::size_t a = 0; a < algos; ++a) {
          records[(g * algos + a) * trials + t] = run_trial(config, config.algorithms[a], grid[g], seed, instance).record;
        }
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, tasks));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

ExperimentFiles run_experiment(const ExperimentConfig& config, const std::filesystem::path& dir, std::size_t workers) {
  const std::vector<TrialRecord> records = run_trials(config, workers);
  create_dir(dir);
  ExperimentFiles files{dir / "trials.csv", dir / "summary.csv", std::nullopt};

  auto trials_out = open_out(files.trials);
  write_trials_csv(trials_out, records);
  close_out(trials_out, files.trials);

  auto summary_out = open_out(files.summary);
  write_summary_csv(summary_out, summarize(records));
  close_out(summary_out, files.summary);

  if (config.plot) {
    files.plot = dir / "plot.gp";
    auto plot_out = open_out(*files.plot);
    write_gnuplot(plot_out, config, "summary.csv");
    close_out(plot_out, *files.plot);
  }
  return files;
}

SingleRunFiles run_single(const ExperimentConfig& config, const std::filesystem::path& dir) {
  config.validate();
  const std::vector<GridPoint> grid = expand_grid(config);
  if (grid.size() != 1) throw ConfigError("single run needs exactly one grid point");
  const std::uint64_t seed = trial_seed(config.seed, 0, 0);
  const HbmInstance instance = generate(instance_spec(config, grid[0], seed));
  const TrialOutput result = run_trial(config, config.algorithms.front(), grid[0], seed, instance);
  if (!result.tree) throw Error(ErrorCode::SplitFailed, "clustering failed: " + result.record.error_tag);

  create_dir(dir);
  SingleRunFiles files{dir / "tree.txt", dir / "trace.tsv", dir / "budget.txt", {}};
  files.report.unique_pairs_queried = result.record.unique_queries;
  files.report.fraction_of_total =
      static_cast<double>(result.record.unique_queries) / static_cast<double>(pair_count(grid[0].n));

  auto tree_out = open_out(files.tree);
  write_tree(tree_out, *result.tree);
  close_out(tree_out, files.tree);

  auto trace_out = open_out(files.trace);
  result.log.write_tsv(trace_out);
  close_out(trace_out, files.trace);

  auto budget_out = open_out(files.budget);
  budget_out << "algorithm\t" << to_string(result.record.algorithm) << '\n'
             << "n\t" << grid[0].n << '\n'
             << "unique_pairs_queried\t" << files.report.unique_pairs_queried << '\n'
             << "total_pairs\t" << pair_count(grid[0].n) << '\n'
             << "fraction_of_total\t" << files.report.fraction_of_total << '\n'
             << "first_split_recovered\t" << (result.record.success ? "true" : "false") << '\n';
  close_out(budget_out, files.budget);
  return files;
}

}  // namespace ahc::bench
