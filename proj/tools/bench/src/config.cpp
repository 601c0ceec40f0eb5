#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <ahc/random.hpp>

#include "bench/experiment.hpp"

namespace ahc::bench {

namespace {

namespace pt = boost::property_tree;

struct Named {
  const char* name;
  int value;
};

constexpr Named kKinds[] = {
    {"noise_threshold", static_cast<int>(ExperimentKind::NoiseThreshold)},
    {"success_vs_s", static_cast<int>(ExperimentKind::SuccessVsS)},
    {"outlier_vs_sigma", static_cast<int>(ExperimentKind::OutlierVsSigma)},
    {"probe_scaling", static_cast<int>(ExperimentKind::ProbeScaling)},
    {"runtime_scaling", static_cast<int>(ExperimentKind::RuntimeScaling)},
    {"single_run", static_cast<int>(ExperimentKind::SingleRun)},
};

constexpr Named kAlgorithms[] = {
    {"active_spectral", static_cast<int>(Algorithm::ActiveSpectral)},
    {"active_kmeans", static_cast<int>(Algorithm::ActiveKmeans)},
    {"heurspec", static_cast<int>(Algorithm::Heurspec)},
    {"hier_spectral", static_cast<int>(Algorithm::HierSpectral)},
    {"hier_kmeans", static_cast<int>(Algorithm::HierKmeans)},
    {"single_linkage", static_cast<int>(Algorithm::SingleLinkage)},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": '" + text + "' is not a number");
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": '" + text + "' is not a non-negative integer");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key + ": '" + text + "' is not a boolean");
}

const std::set<std::string> kKnownKeys = {
    "experiment.kind", "experiment.algorithms", "experiment.trials", "experiment.seed",
    "experiment.workers", "experiment.record_wall_time", "experiment.plot", "experiment.output_dir",
    "grid.n", "grid.sigma", "grid.s", "grid.s_factor",
    "hbm.depth", "hbm.leaf_size", "hbm.levels", "hbm.lo", "hbm.hi", "hbm.width",
    "algorithm.k", "algorithm.kmax", "algorithm.outlier_triplets", "algorithm.max_depth",
};

std::size_t depth_for(const HbmConfig& hbm, std::size_t n) {
  if (hbm.leaf_size == 0) return hbm.depth;
  // Smallest depth whose largest leaf, ceil(n / 2^depth), fits in leaf_size.
  std::size_t depth = 1;
  while (((n + (std::size_t{1} << depth) - 1) >> depth) > hbm.leaf_size && (std::size_t{1} << depth) < n) ++depth;
  return depth;
}

}  // namespace

const char* to_string(ExperimentKind kind) noexcept {
  for (const auto& k : kKinds) {
    if (k.value == static_cast<int>(kind)) return k.name;
  }
  return "unknown";
}

const char* to_string(Algorithm algorithm) noexcept {
  for (const auto& a : kAlgorithms) {
    if (a.value == static_cast<int>(algorithm)) return a.name;
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  for (const auto& k : kKinds) {
    if (text == k.name) return static_cast<ExperimentKind>(k.value);
  }
  throw ConfigError("unknown experiment kind '" + text + "'");
}

Algorithm parse_algorithm(const std::string& text) {
  for (const auto& a : kAlgorithms) {
    if (text == a.name) return static_cast<Algorithm>(a.value);
  }
  throw ConfigError("unknown algorithm '" + text + "'");
}

bool is_active(Algorithm algorithm) noexcept {
  return algorithm == Algorithm::ActiveSpectral || algorithm == Algorithm::ActiveKmeans ||
         algorithm == Algorithm::Heurspec;
}

std::size_t default_s(std::size_t n, double factor) {
  return static_cast<std::size_t>(std::ceil(factor * std::log(static_cast<double>(n))));
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& config) {
  std::vector<GridPoint> out;
  for (std::size_t n : config.n) {
    for (double sigma : config.sigma) {
      if (config.s.empty()) {
        out.push_back({n, sigma, default_s(n, config.s_factor)});
      } else {
        for (std::size_t s : config.s) out.push_back({n, sigma, s});
      }
    }
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t grid_index, std::size_t trial) {
  return derive_seed(derive_seed(master, grid_index), trial);
}

NoisyHbmSpec instance_spec(const ExperimentConfig& config, const GridPoint& point, std::uint64_t seed) {
  const HbmConfig& h = config.hbm;
  const std::size_t depth = depth_for(h, point.n);
  std::vector<double> levels = h.levels;
  if (levels.empty()) {
    for (const Band& b : even_level_bands(depth, h.lo, h.hi)) levels.push_back(b.lo);
  }
  if (levels.size() != depth + 1) {
    throw ConfigError("hbm.levels needs depth + 1 = " + std::to_string(depth + 1) + " values");
  }
  NoisyHbmSpec spec;
  spec.n = point.n;
  spec.shape = BalancedShape{depth};
  spec.indexing = BandIndexing::ByDepth;
  spec.sigma = point.sigma;
  spec.seed = seed;
  spec.mode = h.width > 0.0 ? IdealMode::Uniform : IdealMode::Constant;
  for (double v : levels) spec.bands.push_back(Band{v - h.width, v + h.width});
  return spec;
}

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw ConfigError("experiment.algorithms is empty");
  if (n.empty()) throw ConfigError("grid.n is empty");
  if (sigma.empty()) throw ConfigError("grid.sigma is empty");
  if (trials < 1) throw ConfigError("experiment.trials must be >= 1");
  if (workers < 1) throw ConfigError("experiment.workers must be >= 1");
  if (!(s_factor > 0.0)) throw ConfigError("grid.s_factor must be > 0");
  if (k < 2) throw ConfigError("algorithm.k must be >= 2");
  if (kmax < 1) throw ConfigError("algorithm.kmax must be >= 1");
  for (double sg : sigma) {
    if (sg < 0.0) throw ConfigError("grid.sigma values must be >= 0");
  }
  if (hbm.leaf_size == 0 && hbm.depth < 1) throw ConfigError("hbm.depth must be >= 1");
  if (hbm.leaf_size > 0 && !hbm.levels.empty()) throw ConfigError("hbm.levels cannot be combined with hbm.leaf_size");
  if (hbm.width < 0.0) throw ConfigError("hbm.width must be >= 0");
  if (kind == ExperimentKind::SingleRun && expand_grid(*this).size() != 1) {
    throw ConfigError("single_run needs exactly one grid point");
  }
  for (const GridPoint& p : expand_grid(*this)) {
    if (p.n < 2) throw ConfigError("grid.n values must be >= 2");
    if (p.s < 2) throw ConfigError("s must be >= 2 (n = " + std::to_string(p.n) + ")");
    if (p.s < static_cast<std::size_t>(k)) throw ConfigError("s must be >= k");
    try {
      const NoisyHbmSpec spec = instance_spec(*this, p, 0);
      resolve_bands(spec, planted_tree(spec));
    } catch (const Error& e) {
      throw ConfigError(std::string("hbm: ") + e.what());
    }
  }
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      if (!kKnownKeys.count(section + "." + key)) throw ConfigError("unknown key " + section + "." + key);
    }
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return trim(*v);
    return std::nullopt;
  };

  ExperimentConfig c;
  if (auto v = get("experiment.kind")) {
    c.kind = parse_experiment_kind(*v);
  } else {
    throw ConfigError("experiment.kind is required");
  }
  if (auto v = get("experiment.algorithms")) {
    for (const auto& a : split_list(*v)) c.algorithms.push_back(parse_algorithm(a));
  }
  if (auto v = get("experiment.trials")) c.trials = to_uint("experiment.trials", *v);
  if (auto v = get("experiment.seed")) c.seed = to_uint("experiment.seed", *v);
  if (auto v = get("experiment.workers")) c.workers = to_uint("experiment.workers", *v);
  if (auto v = get("experiment.record_wall_time")) c.record_wall_time = to_bool("experiment.record_wall_time", *v);
  if (auto v = get("experiment.plot")) c.plot = to_bool("experiment.plot", *v);
  if (auto v = get("experiment.output_dir")) c.output_dir = *v;

  if (auto v = get("grid.n")) {
    for (const auto& x : split_list(*v)) c.n.push_back(to_uint("grid.n", x));
  }
  if (auto v = get("grid.sigma")) {
    for (const auto& x : split_list(*v)) c.sigma.push_back(to_double("grid.sigma", x));
  }
  if (auto v = get("grid.s")) {
    for (const auto& x : split_list(*v)) c.s.push_back(to_uint("grid.s", x));
  }
  if (auto v = get("grid.s_factor")) c.s_factor = to_double("grid.s_factor", *v);

  if (auto v = get("hbm.depth")) c.hbm.depth = to_uint("hbm.depth", *v);
  if (auto v = get("hbm.leaf_size")) c.hbm.leaf_size = to_uint("hbm.leaf_size", *v);
  if (auto v = get("hbm.levels")) {
    for (const auto& x : split_list(*v)) c.hbm.levels.push_back(to_double("hbm.levels", x));
  }
  if (auto v = get("hbm.lo")) c.hbm.lo = to_double("hbm.lo", *v);
  if (auto v = get("hbm.hi")) c.hbm.hi = to_double("hbm.hi", *v);
  if (auto v = get("hbm.width")) c.hbm.width = to_double("hbm.width", *v);

  if (auto v = get("algorithm.k")) c.k = static_cast<int>(to_uint("algorithm.k", *v));
  if (auto v = get("algorithm.kmax")) c.kmax = static_cast<int>(to_uint("algorithm.kmax", *v));
  if (auto v = get("algorithm.outlier_triplets")) c.outlier_triplets = to_uint("algorithm.outlier_triplets", *v);
  if (auto v = get("algorithm.max_depth")) c.max_depth = to_uint("algorithm.max_depth", *v);

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config(in);
}

}  // namespace ahc::bench
