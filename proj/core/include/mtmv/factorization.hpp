#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mtmv/types.hpp"

// Nonnegative factorization layer. Each (task, view) pair has a basis
// B = [B_specific | B_common] whose trailing columns are the cross-view
// common directions, and factor blocks F arranged labeled-columns-first.
// The common factor block of a task is stored once and shared by all views.
namespace mtmv {

// Added to multiplicative-update denominators so a zero denominator cannot
// produce a division by zero. Small enough to leave healthy entries alone.
inline constexpr double kDenominatorGuard = 1e-12;

// Per-task factor storage. specific_* hold one ks x n block per view; the
// common_* blocks (kc rows) are the single shared storage every view of the
// task references.
struct FactorBlocks {
  std::vector<Matrix> specific_labeled;
  std::vector<Matrix> specific_unlabeled;
  Matrix common_labeled;
  Matrix common_unlabeled;

  int views() const { return static_cast<int>(specific_labeled.size()); }
  int ks() const {
    return specific_labeled.empty() ? 0 : static_cast<int>(specific_labeled.front().rows());
  }
  int kc() const { return static_cast<int>(common_labeled.rows()); }
  int n_labeled() const { return static_cast<int>(common_labeled.cols()); }
  int n_unlabeled() const { return static_cast<int>(common_unlabeled.cols()); }
  int joint_dim() const { return ks() * views() + kc(); }
};

// Elementwise split m = plus - minus with plus = (|m| + m) / 2 and
// minus = (|m| - m) / 2; both halves are nonnegative.
std::pair<Matrix, Matrix> pos_neg_split(const Matrix& m);

// Nonnegative halves of the supervised pull H = W W^T F_l - W Y on the
// labeled joint features, split so multiplicative updates stay nonnegative:
//   plus  = (W W^T)^+ F_l + W^- Y,
//   minus = (W W^T)^- F_l + W^+ Y.
// Always plus - minus == H. With noise weights given, W is replaced by
// (W + Wd) including the Gram term.
struct HSplit {
  Matrix plus;
  Matrix minus;
};
HSplit compute_h_split(const Matrix& task_weights, const Matrix& labeled_features,
                       const Matrix& one_hot, const Matrix* noise_weights = nullptr);

// Multiplicative basis update B <- B .* (X F^T) ./ (B F F^T + guard) for one
// view; view_factor is that view's full [specific; common] factor over all
// instances. Zero entries stay zero; the reconstruction error never rises.
Matrix update_basis(const Matrix& basis, const Matrix& x, const Matrix& view_factor);

// One sweep of the square-root multiplicative factor updates for a task. All
// ratios are computed from `snapshot` (the pre-sweep factor values) and the
// freshly updated bases, then applied at once, so the result does not depend
// on view order. The labeled rules add the supervised split h scaled by beta;
// the unlabeled rules are reconstruction-only. The common block aggregates
// its numerator and denominator across views and is updated exactly once.
FactorBlocks update_factor_blocks(const FactorBlocks& snapshot,
                                  const std::vector<Matrix>& bases,
                                  const std::vector<Matrix>& x_views,
                                  const std::vector<double>& view_weights,
                                  const HSplit& h, double beta);

// [specific block of view v; common block], labeled columns first:
// the (ks + kc) x n factor that pairs with that view's basis.
Matrix view_factor(const FactorBlocks& blocks, int v);
// Labeled-only and unlabeled-only slices of the same stacking.
Matrix view_factor_labeled(const FactorBlocks& blocks, int v);
Matrix view_factor_unlabeled(const FactorBlocks& blocks, int v);

// Joint feature matrix: specific blocks of every view stacked in view order,
// then the common block; labeled columns first. joint_dim x n rows.
Matrix assemble_joint_features(const FactorBlocks& blocks);
// Labeled columns only (joint_dim x n_labeled).
Matrix assemble_labeled_features(const FactorBlocks& blocks);

// Inverse of assemble_joint_features for a known layout.
FactorBlocks disassemble_joint_features(const Matrix& joint, int views, int ks, int kc,
                                        int n_labeled);

// JSON description of the row layout of the joint feature matrix (which rows
// belong to which view's specific block and which to the common block).
std::string feature_block_map_json(int views, int ks, int kc);

} // namespace mtmv
