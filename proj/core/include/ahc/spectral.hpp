#pragma once

#include <cstdint>
#include <span>

#include "ahc/common.hpp"

namespace ahc {

/// Unnormalized graph Laplacian L = D - W, with D built from off-diagonal row sums
/// (the diagonal of W never enters L).
struct Laplacian {
  Matrix matrix;

  Eigen::Index size() const { return matrix.rows(); }
};

/// Throws InvalidArgument if W is not square or not symmetric within 1e-9.
Laplacian laplacian(const Matrix& similarities);

struct EigenOptions {
  double tol = 1e-8;          // residual bound, relative to max(1, |L|_F)
  std::size_t max_iter = 0;   // 0 selects 10 * m * ln(m) + 1000
  std::size_t guard = 4;      // extra block vectors beyond the ones requested
  std::uint64_t seed = 0x5eed;
};

/// Ascending eigenvalues and unit eigenvectors (as columns).
struct EigenResult {
  Vector values;
  Matrix vectors;
  std::size_t iterations = 0;
  double max_residual = 0.0;
};

struct Eigenpair {
  double value = 0.0;
  Vector vector;
};

class NoConvergence : public Error {
 public:
  NoConvergence(double residual, std::size_t iterations)
      : Error(ErrorCode::NoConvergence, "eigensolver stopped after " + std::to_string(iterations) +
                                            " iterations with residual " + std::to_string(residual)),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// The `count` smallest eigenpairs of L. The first is always (0, 1/sqrt(m)); the rest
/// come from block power iteration on cI - L, c = 2 * max_i L_ii, with the all-ones
/// direction projected out at every step and a Rayleigh-Ritz rotation per iteration.
/// Each vector's sign is fixed so its first entry with |v_i| > 1e-12 is positive.
EigenResult smallest_eigenpairs(const Laplacian& lap, std::size_t count, const EigenOptions& options = {});

/// (lambda_2, v_2): the smallest eigenpair orthogonal to the constant vector.
Eigenpair smallest_nonconstant_eigvec(const Laplacian& lap, double tol = 1e-8, std::size_t max_iter = 0);
Eigenpair smallest_nonconstant_eigvec(const Laplacian& lap, const EigenOptions& options);

void canonicalize_sign(Eigen::Ref<Vector> v);

}  // namespace ahc
