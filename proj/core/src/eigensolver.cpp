#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "ahc/random.hpp"
#include "ahc/spectral.hpp"

namespace ahc {

namespace {

// Remove the all-ones component from every column.
void deflate_constant(Matrix& x) {
  const Eigen::RowVectorXd means = x.colwise().mean();
  x.rowwise() -= means;
}

Matrix orthonormalize(const Matrix& x) {
  Eigen::HouseholderQR<Matrix> qr(x);
  return qr.householderQ() * Matrix::Identity(x.rows(), x.cols());
}

std::size_t default_max_iter(Eigen::Index m) {
  const double md = static_cast<double>(m);
  return static_cast<std::size_t>(10.0 * md * std::log(std::max(md, 1.0))) + 1000;
}

}  // namespace

void canonicalize_sign(Eigen::Ref<Vector> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

EigenResult smallest_eigenpairs(const Laplacian& lap, std::size_t count, const EigenOptions& options) {
  const Matrix& L = lap.matrix;
  const Eigen::Index m = L.rows();
  if (m == 0 || L.cols() != m) throw Error(ErrorCode::InvalidArgument, "Laplacian must be square and nonempty");
  if (count == 0 || count > static_cast<std::size_t>(m)) {
    throw Error(ErrorCode::InvalidArgument, "requested " + std::to_string(count) + " eigenpairs of a " +
                                                std::to_string(m) + "x" + std::to_string(m) + " Laplacian");
  }

  EigenResult result;
  result.values.resize(static_cast<Eigen::Index>(count));
  result.vectors.resize(m, static_cast<Eigen::Index>(count));
  result.values(0) = 0.0;
  result.vectors.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(m)));

  const auto wanted = static_cast<Eigen::Index>(count) - 1;
  if (wanted == 0) return result;

  // Small problems use the whole complement of the constant vector: Rayleigh-Ritz is then
  // exact after one step.
  Eigen::Index block = wanted + static_cast<Eigen::Index>(options.guard);
  if (m - 1 <= 2 * block) block = m - 1;
  const std::size_t max_iter = options.max_iter ? options.max_iter : default_max_iter(m);
  const double threshold = options.tol * std::max(1.0, L.norm());
  double shift = 2.0 * L.diagonal().maxCoeff();
  if (!(shift > 0.0)) shift = 1.0;

  Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(m)));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix x(m, block);
  for (Eigen::Index c = 0; c < block; ++c) {
    for (Eigen::Index r = 0; r < m; ++r) x(r, c) = gauss(rng);
  }
  deflate_constant(x);
  x = orthonormalize(x);

  Eigen::SelfAdjointEigenSolver<Matrix> ritz;
  Matrix lx;
  Matrix v;
  Matrix lv;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    lx.noalias() = L * x;
    Matrix h = x.transpose() * lx;
    h = 0.5 * (h + h.transpose()).eval();
    ritz.compute(h);
    v.noalias() = x * ritz.eigenvectors();
    lv.noalias() = lx * ritz.eigenvectors();

    worst = 0.0;
    for (Eigen::Index k = 0; k < wanted; ++k) {
      const double residual = (lv.col(k) - ritz.eigenvalues()(k) * v.col(k)).norm();
      worst = std::max(worst, residual);
    }
    result.iterations = iter;
    if (worst <= threshold) break;
    if (iter == max_iter) throw NoConvergence(worst, iter);

    Matrix y = shift * v - lv;
    deflate_constant(y);
    x = orthonormalize(y);
  }

  result.max_residual = worst;
  for (Eigen::Index k = 0; k < wanted; ++k) {
    result.values(k + 1) = ritz.eigenvalues()(k);
    result.vectors.col(k + 1) = v.col(k).normalized();
  }
  for (Eigen::Index k = 0; k < result.vectors.cols(); ++k) canonicalize_sign(result.vectors.col(k));
  return result;
}

Eigenpair smallest_nonconstant_eigvec(const Laplacian& lap, const EigenOptions& options) {
  if (lap.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 nodes for a non-constant eigenvector");
  EigenResult r = smallest_eigenpairs(lap, 2, options);
  return Eigenpair{r.values(1), r.vectors.col(1)};
}

Eigenpair smallest_nonconstant_eigvec(const Laplacian& lap, double tol, std::size_t max_iter) {
  EigenOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return smallest_nonconstant_eigvec(lap, options);
}

}  // namespace ahc
