#include "hdcml/linalg.h"

#include <algorithm>
#include <limits>

namespace hdcml {

PseudoInverse pseudo_inverse(const Matrix& a, std::optional<int> max_rank) {
  if (a.size() == 0) return {Matrix::Zero(a.cols(), a.rows()), 0};
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double cutoff = static_cast<double>(std::max(a.rows(), a.cols())) *
                        std::numeric_limits<double>::epsilon() * sigma[0];
  int rank = 0;
  while (rank < sigma.size() && sigma[rank] > cutoff) ++rank;
  if (max_rank) rank = std::min(rank, std::max(*max_rank, 0));

  const auto v = svd.matrixV().leftCols(rank);
  const auto u = svd.matrixU().leftCols(rank);
  const Eigen::VectorXd inv = sigma.head(rank).cwiseInverse();
  return {v * inv.asDiagonal() * u.transpose(), rank};
}

double moore_penrose_residual(const Matrix& a, const Matrix& a_pinv) {
  const double norm = a.norm();
  if (norm == 0.0) return 0.0;
  return (a * a_pinv * a - a).norm() / norm;
}

}  // namespace hdcml
