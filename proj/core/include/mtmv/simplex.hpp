#pragma once

#include "mtmv/types.hpp"

namespace mtmv {

// Per-(task, view) reconstruction weights, flattened task-major: entry
// t * V + v weights view v of task t. Lives on the probability simplex.
struct ViewWeights {
  Vector pi;
  double lambda = 1.0; // strength of the squared-norm spreading penalty
};

// Euclidean projection onto the probability simplex
// { x : x >= 0, sum(x) = 1 }, via the sort-based exact algorithm.
Vector project_to_simplex(const Vector& v);

// Minimizes dot(errors, pi) + lambda * ||pi||^2 over the simplex. The exact
// solution is the projection of -errors / (2 lambda). Larger lambda spreads
// the weights toward uniform; smaller lambda concentrates them on the views
// with the smallest reconstruction error.
ViewWeights solve_view_weights(const Vector& errors, double lambda);

} // namespace mtmv
