#include <cmath>
#include <string>

#include "ahc/spectral.hpp"

namespace ahc {

Laplacian laplacian(const Matrix& similarities) {
  const Eigen::Index m = similarities.rows();
  if (similarities.cols() != m) throw Error(ErrorCode::InvalidArgument, "similarity matrix must be square");
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (std::abs(similarities(i, j) - similarities(j, i)) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument,
                    "similarity matrix not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
  Laplacian lap{-similarities};
  for (Eigen::Index i = 0; i < m; ++i) {
    lap.matrix(i, i) = 0.0;
    lap.matrix(i, i) = -lap.matrix.row(i).sum();
  }
  return lap;
}

}  // namespace ahc
