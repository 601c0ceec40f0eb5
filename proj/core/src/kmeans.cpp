#include "ahc/kmeans.hpp"

#include <limits>
#include <numeric>
#include <random>

#include "ahc/random.hpp"

namespace ahc {

namespace {

struct Run {
  std::vector<int> labels;
  Matrix centroids;
  double wcss = 0.0;
  std::size_t iterations = 0;
  std::vector<double> log;
};

Matrix seed_plus_plus(const Matrix& points, int k, Rng& rng) {
  const Eigen::Index m = points.rows();
  Matrix centroids(k, points.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(m), false);
  std::vector<double> d2(static_cast<std::size_t>(m), std::numeric_limits<double>::infinity());

  Eigen::Index pick = std::uniform_int_distribution<Eigen::Index>(0, m - 1)(rng);
  for (int c = 0; c < k; ++c) {
    if (c > 0) {
      const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
      if (total > 0.0) {
        double target = std::uniform_real_distribution<double>(0.0, total)(rng);
        pick = m - 1;
        for (Eigen::Index i = 0; i < m; ++i) {
          target -= d2[static_cast<std::size_t>(i)];
          if (target < 0.0 && d2[static_cast<std::size_t>(i)] > 0.0) {
            pick = i;
            break;
          }
        }
        while (d2[static_cast<std::size_t>(pick)] == 0.0 && pick > 0) --pick;
      } else {
        // Every point coincides with a center already; fall back to an unused index.
        std::vector<Eigen::Index> unused;
        for (Eigen::Index i = 0; i < m; ++i) {
          if (!chosen[static_cast<std::size_t>(i)]) unused.push_back(i);
        }
        pick = unused[std::uniform_int_distribution<std::size_t>(0, unused.size() - 1)(rng)];
      }
    }
    chosen[static_cast<std::size_t>(pick)] = true;
    centroids.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], d);
    }
  }
  return centroids;
}

double assign(const Matrix& points, const Matrix& centroids, std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    total += best_d;
  }
  return total;
}

void repair_empty(const Matrix& points, Matrix& centroids, std::vector<int>& labels) {
  const int k = static_cast<int>(centroids.rows());
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  for (int e = 0; e < k; ++e) {
    if (sizes[static_cast<std::size_t>(e)] != 0) continue;
    Eigen::Index far = -1;
    double far_d = -1.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const int l = labels[static_cast<std::size_t>(i)];
      if (sizes[static_cast<std::size_t>(l)] < 2) continue;
      const double d = (points.row(i) - centroids.row(l)).squaredNorm();
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    const int from = labels[static_cast<std::size_t>(far)];
    --sizes[static_cast<std::size_t>(from)];
    ++sizes[static_cast<std::size_t>(e)];
    labels[static_cast<std::size_t>(far)] = e;
    centroids.row(e) = points.row(far);
  }
}

double update(const Matrix& points, const std::vector<int>& labels, Matrix& centroids) {
  centroids.setZero();
  std::vector<double> counts(static_cast<std::size_t>(centroids.rows()), 0.0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    centroids.row(l) += points.row(i);
    counts[static_cast<std::size_t>(l)] += 1.0;
  }
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) centroids.row(c) /= counts[static_cast<std::size_t>(c)];
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    total += (points.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return total;
}

Run lloyd(const Matrix& points, int k, std::size_t max_iter, Rng& rng) {
  Run run;
  run.labels.assign(static_cast<std::size_t>(points.rows()), -1);
  run.centroids = seed_plus_plus(points, k, rng);
  std::vector<int> next(run.labels.size());
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    assign(points, run.centroids, next);
    repair_empty(points, run.centroids, next);
    const bool changed = next != run.labels;
    run.labels = next;
    run.wcss = update(points, run.labels, run.centroids);
    run.log.push_back(run.wcss);
    run.iterations = iter + 1;
    if (!changed) break;
  }
  return run;
}

}  // namespace

KMeansResult kmeans_lloyd(const Matrix& points, int k, const KMeansOptions& options) {
  const Eigen::Index m = points.rows();
  if (k < 1 || k > m) throw Error(ErrorCode::InvalidArgument, "k-means needs 1 <= k <= number of points");
  if (options.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "k-means needs at least one iteration");

  KMeansResult out;
  out.partition.k = k;
  if (k == m) {
    out.partition.labels.resize(static_cast<std::size_t>(m));
    std::iota(out.partition.labels.begin(), out.partition.labels.end(), 0);
    out.centroids = points;
    out.wcss = 0.0;
    out.wcss_log = {0.0};
    return out;
  }

  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
  bool have = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(options.seed, r));
    Run run = lloyd(points, k, options.max_iter, rng);
    if (!have || run.wcss < out.wcss) {
      have = true;
      out.partition.labels = std::move(run.labels);
      out.centroids = std::move(run.centroids);
      out.wcss = run.wcss;
      out.iterations = run.iterations;
      out.wcss_log = std::move(run.log);
      out.best_restart = r;
    }
  }
  return out;
}

}  // namespace ahc
