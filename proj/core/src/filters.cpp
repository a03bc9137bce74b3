#include "mtmv/filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtmv::filters {

namespace {

inline Eigen::Index clamp_index(Eigen::Index i, Eigen::Index n) {
  return std::max<Eigen::Index>(0, std::min(i, n - 1));
}

} // namespace

Matrix averaging3() {
  return Matrix::Constant(3, 3, 1.0 / 9.0);
}

Matrix gaussian3(double sigma) {
  if (sigma <= 0.0) {
    throw std::invalid_argument("gaussian3: sigma must be positive");
  }
  Matrix k(3, 3);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const double dx = c - 1;
      const double dy = r - 1;
      k(r, c) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
  }
  k /= k.sum();
  return k;
}

Matrix laplacian3(double alpha) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("laplacian3: alpha must lie in [0, 1]");
  }
  const double corner = alpha / 4.0;
  const double edge = (1.0 - alpha) / 4.0;
  Matrix k(3, 3);
  k << corner, edge, corner,
       edge, -1.0, edge,
       corner, edge, corner;
  k *= 4.0 / (alpha + 1.0);
  return k;
}

Matrix prewitt_horizontal3() {
  Matrix k(3, 3);
  k << 1, 1, 1,
       0, 0, 0,
       -1, -1, -1;
  return k;
}

Matrix convolve3_replicate(const Matrix& image, const Matrix& kernel) {
  if (kernel.rows() != 3 || kernel.cols() != 3) {
    throw std::invalid_argument("convolve3_replicate: kernel must be 3x3");
  }
  const Eigen::Index rows = image.rows();
  const Eigen::Index cols = image.cols();
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          acc += kernel(di + 1, dj + 1) *
                 image(clamp_index(i + di, rows), clamp_index(j + dj, cols));
        }
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix max3_replicate(const Matrix& image) {
  const Eigen::Index rows = image.rows();
  const Eigen::Index cols = image.cols();
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      double best = image(i, j);
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          best = std::max(best, image(clamp_index(i + di, rows), clamp_index(j + dj, cols)));
        }
      }
      out(i, j) = best;
    }
  }
  return out;
}

} // namespace mtmv::filters
