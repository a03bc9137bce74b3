#pragma once

#include <vector>

#include "mtmv/types.hpp"

// Supervised half of the model: per-task regression weights mapping latent
// features to one-hot labels, tied across tasks through a shared coupling
// matrix, plus an optional task-shared noise-absorbing weight block.
namespace mtmv {

// Shared positive-semidefinite coupling of the task weight matrices. Unit
// trace; the small ridge keeps its inverse well defined when some latent
// directions are unused.
struct CouplingMatrix {
  Matrix d;
  double ridge_eps = 1e-8;
};

// Task-shared weights intended to absorb label noise. Row-sparsity is
// encouraged through an iteratively reweighted l2,1 penalty; irls_eps floors
// the row norms so the reweighting never divides by zero.
struct NoiseWeights {
  Matrix wd;
  double irls_eps = 1e-8;
};

// Symmetric PSD square root via eigendecomposition. Eigenvalues in
// [-1e-10, 0) are clamped to zero; anything more negative is rejected.
Matrix matrix_sqrt_psd(const Matrix& m);

// (D + eps I)^-1 + its transpose: the matrix that appears wherever the
// coupling penalty tr(W^T D^-1 W) is differentiated.
Matrix compute_dd(const CouplingMatrix& d);

// Exact ridge-regression solve for one task's weights:
//   W = (F_l F_l^T + gamma DD)^-1 F_l Y^T.
// labeled_features is joint_dim x n_labeled, one_hot is classes x n_labeled.
Matrix update_task_weights(const Matrix& labeled_features, const Matrix& one_hot,
                           const CouplingMatrix& d, double gamma);

// Anti-noise variant: solves against the label residual left after the shared
// noise weights, W = (F F^T + gamma DD)^-1 (F Y^T - F F^T Wd).
Matrix update_task_weights_noisy(const Matrix& labeled_features, const Matrix& one_hot,
                                 const CouplingMatrix& d, const NoiseWeights& wd,
                                 double gamma);

// One reweighted least-squares step for the shared noise weights:
//   Wd = (sum_t F F^T + mu E)^-1 (sum_t F Y^T - sum_t F F^T W_t),
// where E is diagonal with e_kk = 1 / (2 max(||row k of previous Wd||, eps)).
NoiseWeights update_noise_weights(const std::vector<Matrix>& labeled_features,
                                  const std::vector<Matrix>& one_hot,
                                  const std::vector<Matrix>& task_weights, double mu,
                                  const NoiseWeights& prev);

struct CouplingUpdate {
  CouplingMatrix coupling;
  // Value of the minimized trace penalty at the optimum,
  // (trace((W W^T)^{1/2}))^2, surfaced for objective reporting.
  double optimal_value = 0.0;
};

// Variational closed form for the coupling: stack the task weights side by
// side into W and take D = (W W^T)^{1/2} / trace((W W^T)^{1/2}). An all-zero
// W (the cold start) falls back to D = I / joint_dim.
CouplingUpdate update_coupling(const std::vector<Matrix>& task_weights,
                               double ridge_eps = 1e-8);

} // namespace mtmv
