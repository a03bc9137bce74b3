#include "mtmv/regression.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mtmv {

namespace {

// Solves A X = B for symmetric positive-definite A, with a descriptive error
// (including a condition estimate) when the factorization fails.
Matrix solve_spd(const Matrix& a, const Matrix& b, const char* where) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) {
    return llt.solve(b);
  }
  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    return ldlt.solve(b);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  throw std::runtime_error(std::string(where) +
                           ": system is singular even after the ridge (eigenvalue range [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "])");
}

void check_same_columns(const Matrix& features, const Matrix& one_hot, const char* where) {
  if (features.cols() != one_hot.cols()) {
    throw std::invalid_argument(std::string(where) + ": features have " +
                                std::to_string(features.cols()) + " columns but labels have " +
                                std::to_string(one_hot.cols()));
  }
  if (features.cols() == 0) {
    throw std::invalid_argument(std::string(where) + ": no labeled instances");
  }
}

} // namespace

Matrix matrix_sqrt_psd(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix_sqrt_psd: matrix must be square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw std::invalid_argument("matrix_sqrt_psd: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("matrix_sqrt_psd: eigendecomposition failed");
  }
  Vector ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-10) {
      throw std::invalid_argument("matrix_sqrt_psd: matrix has eigenvalue " +
                                  std::to_string(ev[i]) + " below the PSD tolerance");
    }
    ev[i] = std::max(ev[i], 0.0);
  }
  const Matrix s =
      es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (s + s.transpose());
}

Matrix compute_dd(const CouplingMatrix& d) {
  if (d.d.rows() != d.d.cols()) {
    throw std::invalid_argument("compute_dd: coupling matrix must be square");
  }
  const Matrix ridged = d.d + d.ridge_eps * Matrix::Identity(d.d.rows(), d.d.cols());
  const Matrix inv = solve_spd(ridged, Matrix::Identity(d.d.rows(), d.d.cols()), "compute_dd");
  return inv + inv.transpose();
}

Matrix update_task_weights(const Matrix& labeled_features, const Matrix& one_hot,
                           const CouplingMatrix& d, double gamma) {
  check_same_columns(labeled_features, one_hot, "update_task_weights");
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("update_task_weights: gamma must be positive");
  }
  if (d.d.rows() != labeled_features.rows()) {
    throw std::invalid_argument("update_task_weights: coupling dimension " +
                                std::to_string(d.d.rows()) + " does not match feature dimension " +
                                std::to_string(labeled_features.rows()));
  }
  const Matrix a = labeled_features * labeled_features.transpose() + gamma * compute_dd(d);
  const Matrix rhs = labeled_features * one_hot.transpose();
  return solve_spd(a, rhs, "update_task_weights");
}

Matrix update_task_weights_noisy(const Matrix& labeled_features, const Matrix& one_hot,
                                 const CouplingMatrix& d, const NoiseWeights& wd,
                                 double gamma) {
  check_same_columns(labeled_features, one_hot, "update_task_weights_noisy");
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("update_task_weights_noisy: gamma must be positive");
  }
  if (wd.wd.rows() != labeled_features.rows() || wd.wd.cols() != one_hot.rows()) {
    throw std::invalid_argument("update_task_weights_noisy: noise weight shape mismatch");
  }
  const Matrix gram = labeled_features * labeled_features.transpose();
  const Matrix a = gram + gamma * compute_dd(d);
  const Matrix rhs = labeled_features * one_hot.transpose() - gram * wd.wd;
  return solve_spd(a, rhs, "update_task_weights_noisy");
}

NoiseWeights update_noise_weights(const std::vector<Matrix>& labeled_features,
                                  const std::vector<Matrix>& one_hot,
                                  const std::vector<Matrix>& task_weights, double mu,
                                  const NoiseWeights& prev) {
  if (labeled_features.empty() || labeled_features.size() != one_hot.size() ||
      labeled_features.size() != task_weights.size()) {
    throw std::invalid_argument("update_noise_weights: per-task input lists must align");
  }
  if (!(mu > 0.0)) {
    throw std::invalid_argument("update_noise_weights: mu must be positive");
  }
  const Eigen::Index k = labeled_features.front().rows();
  const Eigen::Index c = one_hot.front().rows();
  if (prev.wd.rows() != k || prev.wd.cols() != c) {
    throw std::invalid_argument("update_noise_weights: previous noise weight shape mismatch");
  }

  Matrix gram_sum = Matrix::Zero(k, k);
  Matrix rhs = Matrix::Zero(k, c);
  for (std::size_t t = 0; t < labeled_features.size(); ++t) {
    check_same_columns(labeled_features[t], one_hot[t], "update_noise_weights");
    const Matrix gram = labeled_features[t] * labeled_features[t].transpose();
    gram_sum += gram;
    rhs += labeled_features[t] * one_hot[t].transpose() - gram * task_weights[t];
  }

  // Reweighting diagonal from the previous iterate's row norms; the floor
  // keeps rows that have shrunk to zero from pinning the system.
  Vector e(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    e[i] = 1.0 / (2.0 * std::max(prev.wd.row(i).norm(), prev.irls_eps));
  }

  Matrix a = gram_sum + mu * Matrix(e.asDiagonal());
  NoiseWeights out;
  out.irls_eps = prev.irls_eps;
  out.wd = solve_spd(a, rhs, "update_noise_weights");
  return out;
}

CouplingUpdate update_coupling(const std::vector<Matrix>& task_weights, double ridge_eps) {
  if (task_weights.empty()) {
    throw std::invalid_argument("update_coupling: no task weights");
  }
  const Eigen::Index k = task_weights.front().rows();
  Eigen::Index total_cols = 0;
  for (const Matrix& w : task_weights) {
    if (w.rows() != k) {
      throw std::invalid_argument("update_coupling: task weights disagree on feature dimension");
    }
    total_cols += w.cols();
  }

  Matrix stacked(k, total_cols);
  Eigen::Index offset = 0;
  for (const Matrix& w : task_weights) {
    stacked.middleCols(offset, w.cols()) = w;
    offset += w.cols();
  }

  CouplingUpdate out;
  out.coupling.ridge_eps = ridge_eps;
  if (stacked.cwiseAbs().maxCoeff() == 0.0) {
    // Cold start: every task weight is zero, so fall back to the uninformative
    // uniform coupling.
    out.coupling.d = Matrix::Identity(k, k) / static_cast<double>(k);
    out.optimal_value = 0.0;
    return out;
  }

  Matrix gram = stacked * stacked.transpose();
  gram = 0.5 * (gram + gram.transpose());
  const Matrix root = matrix_sqrt_psd(gram);
  const double tr = root.trace();
  out.coupling.d = root / tr;
  out.coupling.d = 0.5 * (out.coupling.d + out.coupling.d.transpose());
  out.optimal_value = tr * tr;
  return out;
}

} // namespace mtmv
