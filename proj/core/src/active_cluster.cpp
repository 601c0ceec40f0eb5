#include "ahc/active_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ahc/random.hpp"
#include "ahc/spectral.hpp"

namespace ahc {

namespace {

double median_of(std::vector<double> values) {
  const std::size_t m = values.size();
  std::sort(values.begin(), values.end());
  return m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

// Linear interpolation between closest ranks.
double quantile_of(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double mean_similarity(SimilarityOracle& oracle, ObjectId x, std::span<const ObjectId> members,
                       std::uint64_t& requested) {
  double sum = 0.0;
  for (ObjectId y : members) sum += oracle.query(x, y);
  requested += members.size();
  return sum / static_cast<double>(members.size());
}

std::vector<ObjectId> sorted_unique(std::span<const ObjectId> objects) {
  std::vector<ObjectId> out(objects.begin(), objects.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw Error(ErrorCode::InvalidArgument, "object list contains duplicates");
  }
  return out;
}

void check_objects(const SimilarityOracle& oracle, std::span<const ObjectId> objects) {
  if (objects.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one object");
  for (ObjectId id : objects) {
    if (id >= oracle.size()) throw Error(ErrorCode::OutOfRange, "object id " + std::to_string(id) + " out of range");
  }
}

class Recursion {
 public:
  Recursion(SimilarityOracle& oracle, const ActiveConfig& config, bool heuristic, SplitLog* log)
      : oracle_(oracle), config_(config), heuristic_(heuristic), log_(log) {}

  ClusterNode build(std::vector<ObjectId> objects, std::uint64_t seed, std::size_t depth) {
    if (objects.size() <= config_.s || objects.size() < 2 ||
        (config_.max_depth != 0 && depth >= config_.max_depth)) {
      return make_leaf(std::move(objects), seed);
    }

    SplitTrace trace;
    trace.depth = depth;
    trace.cluster = objects;

    Rng rng(seed);
    std::vector<ObjectId> shuffled = objects;
    shuffle_prefix(std::span<ObjectId>(shuffled), config_.s, rng);
    trace.sample.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(config_.s));
    std::sort(trace.sample.begin(), trace.sample.end());

    const Matrix w = oracle_.submatrix(trace.sample);
    trace.pairs_requested = pair_count(trace.sample.size());

    std::vector<std::size_t> kept(trace.sample.size());
    for (std::size_t a = 0; a < kept.size(); ++a) kept[a] = a;
    if (heuristic_ && config_.heuristics.degree_filter) kept = degree_filter(w, trace);

    Matrix wk(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t a = 0; a < kept.size(); ++a) {
      for (std::size_t b = 0; b < kept.size(); ++b) {
        wk(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            w(static_cast<Eigen::Index>(kept[a]), static_cast<Eigen::Index>(kept[b]));
      }
    }

    const std::uint64_t sub_seed = derive_seed(seed, 0);
    int k = config_.k;
    try {
      if (heuristic_ && config_.heuristics.eigengap_k) k = choose_k(wk, sub_seed);
      trace.k = k;
      if (k == 1) {
        trace.children = {objects};
        trace.unique_pairs_after = oracle_.unique_pairs();
        if (log_ != nullptr) log_->splits.push_back(std::move(trace));
        return ClusterNode::leaf(std::move(objects));
      }
      trace.seed_partition = subroutine(wk, k, sub_seed);
      trace.seed_partition.check();
    } catch (const SplitFailure&) {
      throw;
    } catch (const Error& e) {
      throw SplitFailure(std::move(trace), e.what());
    }

    std::vector<std::vector<ObjectId>> seeds;
    for (const auto& group : trace.seed_partition.groups()) {
      if (group.empty()) continue;
      std::vector<ObjectId> ids;
      for (std::size_t a : group) ids.push_back(trace.sample[kept[a]]);
      seeds.push_back(std::move(ids));
    }
    if (seeds.size() < 2) throw SplitFailure(std::move(trace), "seed partition has fewer than two clusters");

    double tau = -std::numeric_limits<double>::infinity();
    const bool new_clusters = heuristic_ && config_.heuristics.new_clusters;
    if (new_clusters) tau = threshold(wk, trace.seed_partition);
    trace.new_cluster_threshold = tau;

    // Objects placed by averaging: everything outside the kept sample, ascending.
    std::vector<bool> in_seed(objects.size(), false);
    for (const auto& ids : seeds) {
      for (ObjectId id : ids) {
        in_seed[static_cast<std::size_t>(std::lower_bound(objects.begin(), objects.end(), id) - objects.begin())] =
            true;
      }
    }

    trace.children = seeds;
    std::vector<std::vector<ObjectId>> fresh;
    for (std::size_t p = 0; p < objects.size(); ++p) {
      if (in_seed[p]) continue;
      const ObjectId x = objects[p];
      std::vector<double> alpha(seeds.size());
      for (std::size_t j = 0; j < seeds.size(); ++j) {
        alpha[j] = mean_similarity(oracle_, x, seeds[j], trace.pairs_requested);
      }
      const std::size_t best = static_cast<std::size_t>(std::max_element(alpha.begin(), alpha.end()) - alpha.begin());
      trace.assigned.push_back(x);
      trace.scores.push_back(alpha);
      if (!new_clusters || alpha[best] >= tau) {
        trace.children[best].push_back(x);
        continue;
      }
      std::size_t join = npos;
      double join_score = tau;
      for (std::size_t c = 0; c < fresh.size(); ++c) {
        const double score = mean_similarity(oracle_, x, fresh[c], trace.pairs_requested);
        if (score > join_score) {
          join_score = score;
          join = c;
        }
      }
      if (join == npos) {
        fresh.push_back({x});
      } else {
        fresh[join].push_back(x);
      }
    }
    for (auto& c : fresh) trace.children.push_back(std::move(c));
    for (auto& c : trace.children) std::sort(c.begin(), c.end());
    trace.unique_pairs_after = oracle_.unique_pairs();

    std::vector<std::vector<ObjectId>> children = trace.children;
    if (log_ != nullptr) log_->splits.push_back(std::move(trace));

    ClusterNode node;
    node.members = std::move(objects);
    for (std::size_t j = 0; j < children.size(); ++j) {
      node.children.push_back(build(std::move(children[j]), derive_seed(seed, j + 1), depth + 1));
    }
    return node;
  }

 private:
  ClusterNode make_leaf(std::vector<ObjectId> objects, std::uint64_t seed) {
    if (!config_.refine_leaves || objects.size() < 2) return ClusterNode::leaf(std::move(objects));
    const int k = config_.subroutine.kind == FlatKind::SpectralBinary ? 2 : std::max(config_.k, 2);
    return nonactive_hierarchical(oracle_, objects, k, config_.subroutine, derive_seed(seed, 0x1eaf)).to_node();
  }

  FlatPartition subroutine(const Matrix& w, int k, std::uint64_t seed) const {
    if (heuristic_ && config_.heuristics.eigengap_k) {
      return k == 2 ? spectral_split(w, seed) : spectral_kway(w, k, seed);
    }
    return config_.subroutine(w, k, seed);
  }

  std::vector<std::size_t> degree_filter(const Matrix& w, SplitTrace& trace) const {
    const Eigen::Index m = w.rows();
    std::vector<double> degree(static_cast<std::size_t>(m));
    for (Eigen::Index a = 0; a < m; ++a) degree[static_cast<std::size_t>(a)] = w.row(a).sum() - w(a, a);
    const double med = median_of(degree);
    std::vector<double> dev(degree.size());
    for (std::size_t a = 0; a < degree.size(); ++a) dev[a] = std::abs(degree[a] - med);
    const double mad = median_of(dev);

    std::vector<std::size_t> kept;
    const double cut = med - config_.heuristics.degree_c * mad;
    for (std::size_t a = 0; a < degree.size(); ++a) {
      // With MAD = 0 the rule would drop everything below the median; keep all instead.
      if (mad > 0.0 && degree[a] < cut) {
        trace.discarded.push_back(trace.sample[a]);
      } else {
        kept.push_back(a);
      }
    }
    if (kept.size() < 2) {
      throw Error(ErrorCode::DegenerateSample, "degree filter left fewer than two sampled objects");
    }
    return kept;
  }

  int choose_k(const Matrix& w, std::uint64_t seed) const {
    const int kmax = std::min<int>(config_.k, static_cast<int>(w.rows()) - 1);
    if (kmax < 1) return 1;
    EigenOptions options;
    options.seed = seed;
    const EigenResult eig = smallest_eigenpairs(laplacian(w), static_cast<std::size_t>(kmax) + 1, options);
    std::vector<double> values(eig.values.data(), eig.values.data() + eig.values.size());
    // The Laplacian is PSD; clip rounding noise so the sequence stays ascending.
    for (double& v : values) v = std::max(v, 0.0);
    std::sort(values.begin(), values.end());
    return eigengap_select_k(values, kmax);
  }

  double threshold(const Matrix& w, const FlatPartition& part) const {
    if (config_.heuristics.new_cluster_threshold) return *config_.heuristics.new_cluster_threshold;
    std::vector<double> within;
    for (const auto& group : part.groups()) {
      if (group.size() < 2) continue;
      for (std::size_t a : group) {
        double sum = 0.0;
        for (std::size_t b : group) {
          if (a != b) sum += w(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
        within.push_back(sum / static_cast<double>(group.size() - 1));
      }
    }
    if (within.empty()) return -std::numeric_limits<double>::infinity();
    return quantile_of(std::move(within), config_.heuristics.new_cluster_quantile);
  }

  SimilarityOracle& oracle_;
  const ActiveConfig& config_;
  bool heuristic_;
  SplitLog* log_;
};

void check_config(const ActiveConfig& config, bool eigengap) {
  if (config.s < 2) throw Error(ErrorCode::InvalidArgument, "sample size s must be >= 2");
  if (eigengap) {
    if (config.k < 1) throw Error(ErrorCode::InvalidArgument, "kmax must be >= 1");
    return;
  }
  if (config.k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2");
  if (config.s < static_cast<std::size_t>(config.k)) throw Error(ErrorCode::InvalidArgument, "s must be >= k");
}

ClusterTree run(SimilarityOracle& oracle, std::span<const ObjectId> objects, const ActiveConfig& config,
                bool heuristic, SplitLog* log) {
  check_objects(oracle, objects);
  Recursion recursion(oracle, config, heuristic, log);
  return ClusterTree(recursion.build(sorted_unique(objects), config.seed, 0));
}

}  // namespace

void SplitLog::write_tsv(std::ostream& out) const {
  out << "depth\tcluster_size\tsample_size\tk\tchild_sizes\tpairs_requested\tunique_pairs\n";
  for (const SplitTrace& t : splits) {
    out << t.depth << '\t' << t.cluster.size() << '\t' << t.sample.size() << '\t' << t.k << '\t';
    for (std::size_t j = 0; j < t.children.size(); ++j) out << (j ? "," : "") << t.children[j].size();
    out << '\t' << t.pairs_requested << '\t' << t.unique_pairs_after << '\n';
  }
}

std::size_t assign_by_average(SimilarityOracle& oracle, ObjectId x,
                              std::span<const std::vector<ObjectId>> seed_clusters) {
  if (seed_clusters.empty()) throw Error(ErrorCode::InvalidArgument, "no seed clusters");
  std::size_t best = 0;
  double best_alpha = -std::numeric_limits<double>::infinity();
  std::uint64_t ignored = 0;
  for (std::size_t j = 0; j < seed_clusters.size(); ++j) {
    if (seed_clusters[j].empty()) throw Error(ErrorCode::InvalidArgument, "empty seed cluster");
    const double alpha = mean_similarity(oracle, x, seed_clusters[j], ignored);
    if (alpha > best_alpha) {
      best_alpha = alpha;
      best = j;
    }
  }
  return best;
}

ClusterTree active_cluster(SimilarityOracle& oracle, std::span<const ObjectId> objects, const ActiveConfig& config,
                           SplitLog* log) {
  check_config(config, false);
  return run(oracle, objects, config, false, log);
}

ClusterTree heurspec_cluster(SimilarityOracle& oracle, std::span<const ObjectId> objects,
                             const ActiveConfig& config, SplitLog* log) {
  if (config.subroutine.kind == FlatKind::KMeansRows) {
    throw Error(ErrorCode::InvalidArgument, "heurspec needs a spectral subroutine");
  }
  const Heuristics& h = config.heuristics;
  if (h.new_cluster_quantile < 0.0 || h.new_cluster_quantile > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "new-cluster quantile must lie in [0, 1]");
  }
  if (h.degree_c < 0.0) throw Error(ErrorCode::InvalidArgument, "degree constant must be >= 0");
  check_config(config, h.eigengap_k);
  return run(oracle, objects, config, true, log);
}

namespace {

ClusterNode nonactive(SimilarityOracle& oracle, std::vector<ObjectId> objects, int k, const FlatClusterer& sub,
                      std::uint64_t seed, std::size_t depth, SplitLog* log, std::size_t max_depth) {
  if (objects.size() < 2 * static_cast<std::size_t>(k) || (max_depth != 0 && depth >= max_depth)) {
    return ClusterNode::leaf(std::move(objects));
  }
  const Matrix w = oracle.submatrix(objects);
  FlatPartition part = sub(w, k, derive_seed(seed, 0));
  part.check();

  std::vector<std::vector<ObjectId>> children;
  for (const auto& group : part.groups()) {
    if (group.empty()) continue;
    std::vector<ObjectId> ids;
    for (std::size_t a : group) ids.push_back(objects[a]);
    children.push_back(std::move(ids));
  }
  if (log != nullptr) {
    SplitTrace trace;
    trace.depth = depth;
    trace.cluster = objects;
    trace.sample = objects;
    trace.seed_partition = part;
    trace.k = k;
    trace.children = children;
    trace.pairs_requested = pair_count(objects.size());
    trace.unique_pairs_after = oracle.unique_pairs();
    log->splits.push_back(std::move(trace));
  }
  ClusterNode node;
  node.members = std::move(objects);
  if (children.size() < 2) return node;
  for (std::size_t j = 0; j < children.size(); ++j) {
    node.children.push_back(
        nonactive(oracle, std::move(children[j]), k, sub, derive_seed(seed, j + 1), depth + 1, log, max_depth));
  }
  return node;
}

}  // namespace

ClusterTree nonactive_hierarchical(SimilarityOracle& oracle, std::span<const ObjectId> objects, int k,
                                   const FlatClusterer& subroutine, std::uint64_t seed, SplitLog* log,
                                   std::size_t max_depth) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2");
  check_objects(oracle, objects);
  return ClusterTree(nonactive(oracle, sorted_unique(objects), k, subroutine, seed, 0, log, max_depth));
}

std::uint64_t requested_pairs_bound(const SplitLog& log) {
  std::uint64_t total = 0;
  for (const SplitTrace& t : log.splits) {
    const std::uint64_t s = t.sample.size();
    total += pair_count(s) + (t.cluster.size() - s) * s;
  }
  return total;
}

}  // namespace ahc
