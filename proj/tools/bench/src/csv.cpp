#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "bench/experiment.hpp"

namespace ahc::bench {

namespace {

// Shortest representation that round-trips, so rereading gives the same doubles.
std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw IoError("bad number '" + text + "' in CSV");
  return v;
}

std::uint64_t parse_uint(const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw IoError("bad integer '" + text + "' in CSV");
  return v;
}

Algorithm parse_algorithm_cell(const std::string& text) {
  try {
    return parse_algorithm(text);
  } catch (const ConfigError& e) {
    throw IoError(e.what());
  }
}

std::vector<std::vector<std::string>> read_rows(std::istream& in, const char* header, std::size_t columns) {
  std::string line;
  if (!std::getline(in, line) || line != header) throw IoError("unexpected CSV header");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_row(line);
    if (row.size() != columns) throw IoError("CSV row has " + std::to_string(row.size()) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << kTrialHeader << '\n';
  for (const TrialRecord& r : records) {
    out << to_string(r.algorithm) << ',' << r.n << ',' << fmt(r.sigma) << ',' << r.s << ',' << r.seed << ','
        << (r.success ? 1 : 0) << ',' << fmt(r.outlier_fraction) << ',' << r.unique_queries << ','
        << fmt(r.wall_time_ms) << ',' << r.error_tag << '\n';
  }
}

std::vector<TrialRecord> read_trials_csv(std::istream& in) {
  std::vector<TrialRecord> out;
  for (const auto& row : read_rows(in, kTrialHeader, 10)) {
    TrialRecord r;
    r.algorithm = parse_algorithm_cell(row[0]);
    r.n = parse_uint(row[1]);
    r.sigma = parse_double(row[2]);
    r.s = parse_uint(row[3]);
    r.seed = parse_uint(row[4]);
    r.success = parse_uint(row[5]) != 0;
    r.outlier_fraction = parse_double(row[6]);
    r.unique_queries = parse_uint(row[7]);
    r.wall_time_ms = parse_double(row[8]);
    r.error_tag = row[9];
    out.push_back(std::move(r));
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const SummaryRow& r : rows) {
    out << to_string(r.algorithm) << ',' << r.n << ',' << fmt(r.sigma) << ',' << r.s << ',' << r.trials << ','
        << r.failures << ',' << fmt(r.success_rate) << ',' << fmt(r.success_se) << ',' << fmt(r.outlier_mean) << ','
        << fmt(r.outlier_se) << ',' << fmt(r.queries_mean) << ',' << fmt(r.queries_se) << ','
        << fmt(r.time_mean_ms) << ',' << fmt(r.time_se_ms) << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::vector<SummaryRow> out;
  for (const auto& row : read_rows(in, kSummaryHeader, 14)) {
    SummaryRow r;
    r.algorithm = parse_algorithm_cell(row[0]);
    r.n = parse_uint(row[1]);
    r.sigma = parse_double(row[2]);
    r.s = parse_uint(row[3]);
    r.trials = parse_uint(row[4]);
    r.failures = parse_uint(row[5]);
    r.success_rate = parse_double(row[6]);
    r.success_se = parse_double(row[7]);
    r.outlier_mean = parse_double(row[8]);
    r.outlier_se = parse_double(row[9]);
    r.queries_mean = parse_double(row[10]);
    r.queries_se = parse_double(row[11]);
    r.time_mean_ms = parse_double(row[12]);
    r.time_se_ms = parse_double(row[13]);
    out.push_back(r);
  }
  return out;
}

void write_gnuplot(std::ostream& out, const ExperimentConfig& config, const std::string& summary_file) {
  // Columns of summary.csv: 2 n, 3 sigma, 4 s, 7 success_rate, 8 success_se, 9 outlier_mean,
  // 10 outlier_se, 11 queries_mean, 12 queries_se, 13 time_mean_ms, 14 time_se_ms.
  int x = 3, y = 7, e = 8;
  std::string xlabel = "sigma", ylabel = "first-split success rate";
  bool loglog = false;
  switch (config.kind) {
    case ExperimentKind::NoiseThreshold:
    case ExperimentKind::SingleRun:
      break;
    case ExperimentKind::SuccessVsS:
      x = 4;
      xlabel = "s";
      break;
    case ExperimentKind::OutlierVsSigma:
      y = 9, e = 10;
      ylabel = "outlier fraction";
      break;
    case ExperimentKind::ProbeScaling:
      x = 2, y = 11, e = 12;
      xlabel = "n", ylabel = "unique pairs queried";
      loglog = true;
      break;
    case ExperimentKind::RuntimeScaling:
      x = 2, y = 13, e = 14;
      xlabel = "n", ylabel = "wall time (ms)";
      loglog = true;
      break;
  }
  out << "# gnuplot -p plot.gp\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel '" << xlabel << "'\n"
      << "set ylabel '" << ylabel << "'\n";
  if (loglog) out << "set logscale xy\n";
  out << "set title '" << to_string(config.kind) << "'\n"
      << "plot \\\n";
  for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
    const char* name = to_string(config.algorithms[a]);
    out << "  \"< awk -F, 'NR==1 || $1==\\\"" << name << "\\\"' " << summary_file << "\" using " << x << ':' << y
        << ':' << e << " with yerrorlines title '" << name << '\'' << (a + 1 < config.algorithms.size() ? ", \\" : "")
        << '\n';
  }
}

}  // namespace ahc::bench
