#include "mtmv/factorization.hpp"

#include <stdexcept>

#include <json.hpp>

namespace mtmv {

std::pair<Matrix, Matrix> pos_neg_split(const Matrix& m) {
  const Matrix abs = m.cwiseAbs();
  return {0.5 * (abs + m), 0.5 * (abs - m)};
}

HSplit compute_h_split(const Matrix& task_weights, const Matrix& labeled_features,
                       const Matrix& one_hot, const Matrix* noise_weights) {
  Matrix w = task_weights;
  if (noise_weights != nullptr) {
    if (noise_weights->rows() != w.rows() || noise_weights->cols() != w.cols()) {
      throw std::invalid_argument("compute_h_split: noise weight shape mismatch");
    }
    w += *noise_weights;
  }
  if (w.rows() != labeled_features.rows()) {
    throw std::invalid_argument("compute_h_split: weight rows do not match feature rows");
  }
  if (w.cols() != one_hot.rows()) {
    throw std::invalid_argument("compute_h_split: weight columns do not match class count");
  }
  if (labeled_features.cols() != one_hot.cols()) {
    throw std::invalid_argument("compute_h_split: labeled feature/label column mismatch");
  }

  Matrix gram = w * w.transpose();
  gram = 0.5 * (gram + gram.transpose());
  const auto [gram_pos, gram_neg] = pos_neg_split(gram);
  const auto [w_pos, w_neg] = pos_neg_split(w);

  HSplit h;
  h.plus = gram_pos * labeled_features + w_neg * one_hot;
  h.minus = gram_neg * labeled_features + w_pos * one_hot;
  return h;
}

Matrix update_basis(const Matrix& basis, const Matrix& x, const Matrix& view_factor) {
  if (basis.rows() != x.rows()) {
    throw std::invalid_argument("update_basis: basis/data row mismatch");
  }
  if (basis.cols() != view_factor.rows()) {
    throw std::invalid_argument("update_basis: basis/factor dimension mismatch");
  }
  if (view_factor.cols() != x.cols()) {
    throw std::invalid_argument("update_basis: factor/data column mismatch");
  }
  const Matrix numerator = x * view_factor.transpose();
  const Matrix gram = view_factor * view_factor.transpose();
  const Matrix denominator = basis * gram;
  return basis.array() * (numerator.array() / (denominator.array() + kDenominatorGuard));
}

namespace {

// out = snapshot .* sqrt(num ./ (den + guard)), the common shape of all four
// factor update rules.
Matrix apply_sqrt_rule(const Matrix& snapshot, const Matrix& num, const Matrix& den) {
  return snapshot.array() * (num.array() / (den.array() + kDenominatorGuard)).sqrt();
}

} // namespace

FactorBlocks update_factor_blocks(const FactorBlocks& snapshot,
                                  const std::vector<Matrix>& bases,
                                  const std::vector<Matrix>& x_views,
                                  const std::vector<double>& view_weights,
                                  const HSplit& h, double beta) {
  const int v_count = snapshot.views();
  const int ks = snapshot.ks();
  const int kc = snapshot.kc();
  const int n_l = snapshot.n_labeled();
  const int n_u = snapshot.n_unlabeled();

  if (static_cast<int>(bases.size()) != v_count ||
      static_cast<int>(x_views.size()) != v_count ||
      static_cast<int>(view_weights.size()) != v_count) {
    throw std::invalid_argument("update_factor_blocks: per-view input lists must align");
  }
  if (beta < 0.0) {
    throw std::invalid_argument("update_factor_blocks: beta must be nonnegative");
  }
  if (beta > 0.0 &&
      (h.plus.rows() != snapshot.joint_dim() || h.plus.cols() != n_l ||
       h.minus.rows() != snapshot.joint_dim() || h.minus.cols() != n_l)) {
    throw std::invalid_argument("update_factor_blocks: supervised split shape mismatch");
  }

  FactorBlocks out = snapshot;

  Matrix common_num_l = Matrix::Zero(kc, n_l);
  Matrix common_den_l = Matrix::Zero(kc, n_l);
  Matrix common_num_u = Matrix::Zero(kc, n_u);
  Matrix common_den_u = Matrix::Zero(kc, n_u);

  for (int v = 0; v < v_count; ++v) {
    const Matrix& b = bases[v];
    const Matrix& x = x_views[v];
    if (b.cols() != ks + kc) {
      throw std::invalid_argument("update_factor_blocks: basis of view " + std::to_string(v) +
                                  " has wrong column count");
    }
    if (x.cols() != n_l + n_u || x.rows() != b.rows()) {
      throw std::invalid_argument("update_factor_blocks: data of view " + std::to_string(v) +
                                  " has wrong shape");
    }
    const double weight = view_weights[v];

    const Matrix f_l = view_factor_labeled(snapshot, v);
    const Matrix f_u = view_factor_unlabeled(snapshot, v);

    // Full (ks + kc)-row products, sliced afterwards, so the specific and
    // common rows come from a single pass over the data.
    const Matrix data_l = weight * (b.transpose() * x.leftCols(n_l));
    const Matrix recon_l = weight * (b.transpose() * (b * f_l));
    const Matrix data_u = weight * (b.transpose() * x.rightCols(n_u));
    const Matrix recon_u = weight * (b.transpose() * (b * f_u));

    Matrix num_l = data_l.topRows(ks);
    Matrix den_l = recon_l.topRows(ks);
    if (beta > 0.0) {
      // The gradient of the supervised term is +h.plus - h.minus, so its
      // positive half lands in the denominator of the descent ratio.
      num_l += beta * h.minus.middleRows(static_cast<Eigen::Index>(v) * ks, ks);
      den_l += beta * h.plus.middleRows(static_cast<Eigen::Index>(v) * ks, ks);
    }
    out.specific_labeled[v] = apply_sqrt_rule(snapshot.specific_labeled[v], num_l, den_l);
    out.specific_unlabeled[v] =
        apply_sqrt_rule(snapshot.specific_unlabeled[v], data_u.topRows(ks), recon_u.topRows(ks));

    common_num_l += data_l.bottomRows(kc);
    common_den_l += recon_l.bottomRows(kc);
    common_num_u += data_u.bottomRows(kc);
    common_den_u += recon_u.bottomRows(kc);
  }

  if (beta > 0.0) {
    common_num_l += beta * h.minus.bottomRows(kc);
    common_den_l += beta * h.plus.bottomRows(kc);
  }
  out.common_labeled = apply_sqrt_rule(snapshot.common_labeled, common_num_l, common_den_l);
  out.common_unlabeled = apply_sqrt_rule(snapshot.common_unlabeled, common_num_u, common_den_u);
  return out;
}

Matrix view_factor_labeled(const FactorBlocks& blocks, int v) {
  Matrix f(blocks.ks() + blocks.kc(), blocks.n_labeled());
  f.topRows(blocks.ks()) = blocks.specific_labeled[v];
  f.bottomRows(blocks.kc()) = blocks.common_labeled;
  return f;
}

Matrix view_factor_unlabeled(const FactorBlocks& blocks, int v) {
  Matrix f(blocks.ks() + blocks.kc(), blocks.n_unlabeled());
  f.topRows(blocks.ks()) = blocks.specific_unlabeled[v];
  f.bottomRows(blocks.kc()) = blocks.common_unlabeled;
  return f;
}

Matrix view_factor(const FactorBlocks& blocks, int v) {
  if (v < 0 || v >= blocks.views()) {
    throw std::invalid_argument("view_factor: view index out of range");
  }
  Matrix f(blocks.ks() + blocks.kc(), blocks.n_labeled() + blocks.n_unlabeled());
  f.topLeftCorner(blocks.ks(), blocks.n_labeled()) = blocks.specific_labeled[v];
  f.topRightCorner(blocks.ks(), blocks.n_unlabeled()) = blocks.specific_unlabeled[v];
  f.bottomLeftCorner(blocks.kc(), blocks.n_labeled()) = blocks.common_labeled;
  f.bottomRightCorner(blocks.kc(), blocks.n_unlabeled()) = blocks.common_unlabeled;
  return f;
}

Matrix assemble_joint_features(const FactorBlocks& blocks) {
  const int ks = blocks.ks();
  const int kc = blocks.kc();
  const int n_l = blocks.n_labeled();
  const int n_u = blocks.n_unlabeled();
  Matrix joint(blocks.joint_dim(), n_l + n_u);
  for (int v = 0; v < blocks.views(); ++v) {
    joint.block(static_cast<Eigen::Index>(v) * ks, 0, ks, n_l) = blocks.specific_labeled[v];
    joint.block(static_cast<Eigen::Index>(v) * ks, n_l, ks, n_u) = blocks.specific_unlabeled[v];
  }
  joint.block(static_cast<Eigen::Index>(blocks.views()) * ks, 0, kc, n_l) = blocks.common_labeled;
  joint.block(static_cast<Eigen::Index>(blocks.views()) * ks, n_l, kc, n_u) =
      blocks.common_unlabeled;
  return joint;
}

Matrix assemble_labeled_features(const FactorBlocks& blocks) {
  const int ks = blocks.ks();
  const int kc = blocks.kc();
  const int n_l = blocks.n_labeled();
  Matrix joint(blocks.joint_dim(), n_l);
  for (int v = 0; v < blocks.views(); ++v) {
    joint.middleRows(static_cast<Eigen::Index>(v) * ks, ks) = blocks.specific_labeled[v];
  }
  joint.bottomRows(kc) = blocks.common_labeled;
  return joint;
}

FactorBlocks disassemble_joint_features(const Matrix& joint, int views, int ks, int kc,
                                        int n_labeled) {
  if (joint.rows() != static_cast<Eigen::Index>(views) * ks + kc) {
    throw std::invalid_argument("disassemble_joint_features: row count does not match layout");
  }
  if (n_labeled < 0 || n_labeled > joint.cols()) {
    throw std::invalid_argument("disassemble_joint_features: labeled count out of range");
  }
  const Eigen::Index n_u = joint.cols() - n_labeled;
  FactorBlocks blocks;
  blocks.specific_labeled.resize(views);
  blocks.specific_unlabeled.resize(views);
  for (int v = 0; v < views; ++v) {
    blocks.specific_labeled[v] = joint.block(static_cast<Eigen::Index>(v) * ks, 0, ks, n_labeled);
    blocks.specific_unlabeled[v] =
        joint.block(static_cast<Eigen::Index>(v) * ks, n_labeled, ks, n_u);
  }
  blocks.common_labeled = joint.block(static_cast<Eigen::Index>(views) * ks, 0, kc, n_labeled);
  blocks.common_unlabeled =
      joint.block(static_cast<Eigen::Index>(views) * ks, n_labeled, kc, n_u);
  return blocks;
}

std::string feature_block_map_json(int views, int ks, int kc) {
  nlohmann::json blocks = nlohmann::json::array();
  for (int v = 0; v < views; ++v) {
    blocks.push_back({{"block", "view" + std::to_string(v) + "_specific"},
                      {"first_row", v * ks},
                      {"rows", ks}});
  }
  blocks.push_back({{"block", "common"}, {"first_row", views * ks}, {"rows", kc}});
  nlohmann::json doc = {
      {"format_version", 1},
      {"joint_dim", views * ks + kc},
      {"blocks", std::move(blocks)},
  };
  return doc.dump(2) + "\n";
}

} // namespace mtmv
