#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtmv/dataset.hpp"
#include "mtmv/trainer.hpp"
#include "mtmv/types.hpp"

namespace mtmv {

// Argmax-per-column class prediction from task weights applied to (typically
// unlabeled) joint features. Ties resolve to the lowest class index.
std::vector<int> predict_labels(const Matrix& task_weights, const Matrix& features);

// Rows = true class, columns = predicted class.
Eigen::MatrixXi confusion_counts(const std::vector<int>& truth, const std::vector<int>& predicted,
                                 int num_classes);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_f1 = 0.0;
  // Per-class 2TP / (2TP + FP + FN), averaged over classes.
  double macro_dice = 0.0;
  // For single-label problems the per-sample Jaccard overlap equals accuracy.
  double sample_jaccard = 0.0;
};
// Macro averages run over all num_classes classes; a class with no true or
// predicted instances contributes 0 (the 0/0 convention).
ClassificationMetrics classification_metrics(const std::vector<int>& truth,
                                             const std::vector<int>& predicted,
                                             int num_classes);

struct ClusteringMetrics {
  double nmi = 0.0; // mutual information over the arithmetic mean of entropies
  double ari = 0.0; // adjusted Rand index (pair counting); can be negative
  double homogeneity = 0.0;
  double completeness = 0.0;
};
// Degenerate partitions with zero entropy score 1 by convention where they
// make the normalizer vanish.
ClusteringMetrics clustering_metrics(const std::vector<int>& truth,
                                     const std::vector<int>& assigned);

struct KMeansResult {
  std::vector<int> assignment;
  double inertia = 0.0;
  std::vector<double> inertia_trace; // per Lloyd pass of the winning restart
};
// Lloyd's algorithm with distance-weighted (k-means++-style) seeding; points
// are columns. Runs `restarts` seeded restarts and keeps the lowest inertia.
// Deterministic per seed.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 10);

struct SoftmaxParams {
  double l2 = 1e-4;
  int epochs = 300;
  double step = 0.05; // fixed full-batch gradient step
};
// Multinomial logistic regression trained from zero weights by full-batch
// gradient descent; returns predictions on test_x. With zero epochs all
// scores tie and every prediction is class 0.
std::vector<int> softmax_classifier(const Matrix& train_x, const std::vector<int>& train_y,
                                    int num_classes, const Matrix& test_x,
                                    const SoftmaxParams& params, std::uint64_t seed);

namespace detail {
// Mean cross-entropy loss and its gradient for the softmax classifier;
// exposed for gradient checking.
double softmax_nll(const Matrix& weights, const Matrix& x, const Matrix& one_hot, double l2,
                   Matrix* grad);
} // namespace detail

// One noise-sweep measurement: both algorithms trained on the same corrupted
// dataset, accuracy on the unlabeled instances against clean ground truth,
// averaged over tasks.
struct SweepCell {
  std::string algorithm; // "mtmvcsf" or "an_mtmvcsf"
  double fraction = 0.0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
};
struct SweepSummaryRow {
  std::string algorithm;
  double fraction = 0.0;
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0; // sample standard deviation over seeds
};
struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepSummaryRow> summary; // one row per (fraction, algorithm)
};

// For every fraction x seed: inject label noise with that seed, fit both
// algorithms (their hyperparameter seeds set to the cell seed), and score
// unlabeled predictions against the clean labels. Requires clean_labels.
SweepResult noise_sweep(const MultiViewDataset& ds, const Hyperparams& hp_standard,
                        const Hyperparams& hp_anti_noise, const std::vector<double>& fractions,
                        const std::vector<std::uint64_t>& seeds);

std::string sweep_cells_csv(const SweepResult& result);
std::string sweep_summary_json(const SweepResult& result);

enum class EvalMode { classify, cluster };

// One metric value for one arm ("latent" or "raw"); task < 0 denotes the
// across-task mean row.
struct ComparisonRow {
  std::string arm;
  int task = 0;
  std::string metric;
  double value = 0.0;
};
struct ComparisonResult {
  EvalMode mode = EvalMode::classify;
  std::vector<ComparisonRow> rows;
};

struct EvalProtocolParams {
  SoftmaxParams softmax;
  int kmeans_restarts = 10;
};

// Trains the standard algorithm, then compares its unlabeled latent features
// against the column-stacked raw views under an identical protocol: a 50/50
// split + softmax classifier (classify) or k-means with k = C (cluster).
// Splits, seeds, and learner settings are shared by both arms.
ComparisonResult latent_vs_raw(const MultiViewDataset& ds, const Hyperparams& hp, EvalMode mode,
                               std::uint64_t seed, const EvalProtocolParams& params = {});

std::string comparison_csv(const ComparisonResult& result);
std::string comparison_json(const ComparisonResult& result);

} // namespace mtmv
