#include "mtmv/simplex.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace mtmv {

Vector project_to_simplex(const Vector& v) {
  const Eigen::Index n = v.size();
  if (n == 0) {
    throw std::invalid_argument("project_to_simplex: empty input");
  }
  if (!v.allFinite()) {
    throw std::invalid_argument("project_to_simplex: non-finite input");
  }

  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());

  // Find the largest j with u_j + (1 - sum_{i<=j} u_i) / j > 0; the threshold
  // from that prefix defines the projection.
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) {
      theta = candidate;
    }
  }

  return (v.array() - theta).max(0.0);
}

ViewWeights solve_view_weights(const Vector& errors, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("solve_view_weights: lambda must be positive");
  }
  if (errors.size() == 0) {
    throw std::invalid_argument("solve_view_weights: empty error vector");
  }
  if (!errors.allFinite() || (errors.array() < 0.0).any()) {
    throw std::invalid_argument("solve_view_weights: errors must be finite and nonnegative");
  }
  ViewWeights w;
  w.lambda = lambda;
  w.pi = project_to_simplex(-errors / (2.0 * lambda));
  return w;
}

} // namespace mtmv
