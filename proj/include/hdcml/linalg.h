#pragma once

#include <optional>

#include "hdcml/hypervector.h"

namespace hdcml {

struct PseudoInverse {
  Matrix matrix;
  int rank = 0;
};

// Moore-Penrose pseudo-inverse by thin SVD. Singular values below
// max(rows, cols) * eps * sigma_max are treated as zero; when `max_rank` is
// given, at most that many leading singular values are inverted.
PseudoInverse pseudo_inverse(const Matrix& a, std::optional<int> max_rank = std::nullopt);

// ||A A+ A - A||_F / ||A||_F
double moore_penrose_residual(const Matrix& a, const Matrix& a_pinv);

}  // namespace hdcml
