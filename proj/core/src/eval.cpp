#include "mtmv/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "mtmv/io_util.hpp"

namespace mtmv {

std::vector<int> predict_labels(const Matrix& task_weights, const Matrix& features) {
  if (task_weights.rows() != features.rows()) {
    throw std::invalid_argument("predict_labels: weight/feature dimension mismatch");
  }
  const Matrix scores = task_weights.transpose() * features; // classes x n
  std::vector<int> out(static_cast<std::size_t>(scores.cols()));
  for (Eigen::Index j = 0; j < scores.cols(); ++j) {
    int best = 0;
    for (Eigen::Index c = 1; c < scores.rows(); ++c) {
      if (scores(c, j) > scores(best, j)) {
        best = static_cast<int>(c);
      }
    }
    out[static_cast<std::size_t>(j)] = best;
  }
  return out;
}

Eigen::MatrixXi confusion_counts(const std::vector<int>& truth, const std::vector<int>& predicted,
                                 int num_classes) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("confusion_counts: label list length mismatch");
  }
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(num_classes, num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= num_classes || predicted[i] < 0 ||
        predicted[i] >= num_classes) {
      throw std::invalid_argument("confusion_counts: label outside [0, num_classes)");
    }
    counts(truth[i], predicted[i]) += 1;
  }
  return counts;
}

ClassificationMetrics classification_metrics(const std::vector<int>& truth,
                                             const std::vector<int>& predicted,
                                             int num_classes) {
  if (truth.empty()) {
    throw std::invalid_argument("classification_metrics: empty label lists");
  }
  const Eigen::MatrixXi counts = confusion_counts(truth, predicted, num_classes);
  const double n = static_cast<double>(truth.size());

  double correct = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    correct += counts(c, c);
  }

  double precision_sum = 0.0;
  double f1_sum = 0.0;
  double dice_sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    const double tp = counts(c, c);
    const double fp = counts.col(c).sum() - tp;
    const double fn = counts.row(c).sum() - tp;
    const double precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
    const double dice = (2.0 * tp + fp + fn) > 0.0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
    precision_sum += precision;
    // Per-class F1 equals the per-class Dice overlap for single-label data.
    f1_sum += dice;
    dice_sum += dice;
  }

  ClassificationMetrics m;
  m.accuracy = correct / n;
  m.macro_precision = precision_sum / num_classes;
  m.macro_f1 = f1_sum / num_classes;
  m.macro_dice = dice_sum / num_classes;
  m.sample_jaccard = m.accuracy;
  return m;
}

namespace {

// Contingency table between two integer labelings, keyed by value.
struct Contingency {
  std::map<int, int> row_sums;
  std::map<int, int> col_sums;
  std::map<std::pair<int, int>, int> cells;
  int n = 0;
};

Contingency build_contingency(const std::vector<int>& a, const std::vector<int>& b) {
  Contingency c;
  c.n = static_cast<int>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    c.row_sums[a[i]] += 1;
    c.col_sums[b[i]] += 1;
    c.cells[{a[i], b[i]}] += 1;
  }
  return c;
}

double entropy(const std::map<int, int>& counts, int n) {
  double h = 0.0;
  for (const auto& [label, count] : counts) {
    if (count > 0) {
      const double p = static_cast<double>(count) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

double mutual_information(const Contingency& c) {
  double mi = 0.0;
  for (const auto& [cell, count] : c.cells) {
    if (count == 0) {
      continue;
    }
    const double pij = static_cast<double>(count) / c.n;
    const double pi = static_cast<double>(c.row_sums.at(cell.first)) / c.n;
    const double pj = static_cast<double>(c.col_sums.at(cell.second)) / c.n;
    mi += pij * std::log(pij / (pi * pj));
  }
  return std::max(mi, 0.0);
}

double conditional_entropy(const Contingency& c, bool rows_given_cols) {
  // H(A|B) = H(A,B) - H(B).
  double joint = 0.0;
  for (const auto& [cell, count] : c.cells) {
    if (count > 0) {
      const double p = static_cast<double>(count) / c.n;
      joint -= p * std::log(p);
    }
  }
  const double hb = entropy(rows_given_cols ? c.col_sums : c.row_sums, c.n);
  return joint - hb;
}

double comb2(double x) { return x * (x - 1.0) / 2.0; }

} // namespace

ClusteringMetrics clustering_metrics(const std::vector<int>& truth,
                                     const std::vector<int>& assigned) {
  if (truth.empty() || truth.size() != assigned.size()) {
    throw std::invalid_argument("clustering_metrics: label lists must be nonempty and aligned");
  }
  const Contingency c = build_contingency(truth, assigned);
  const double h_truth = entropy(c.row_sums, c.n);
  const double h_assigned = entropy(c.col_sums, c.n);
  const double mi = mutual_information(c);

  ClusteringMetrics m;
  m.nmi = (h_truth + h_assigned) == 0.0 ? 1.0 : mi / ((h_truth + h_assigned) / 2.0);
  m.homogeneity = h_truth == 0.0 ? 1.0 : 1.0 - conditional_entropy(c, true) / h_truth;
  m.completeness =
      h_assigned == 0.0 ? 1.0 : 1.0 - conditional_entropy(c, false) / h_assigned;

  // Pair-counting adjusted Rand index.
  double index = 0.0;
  for (const auto& [cell, count] : c.cells) {
    (void)cell;
    index += comb2(count);
  }
  double sum_rows = 0.0;
  for (const auto& [label, count] : c.row_sums) {
    (void)label;
    sum_rows += comb2(count);
  }
  double sum_cols = 0.0;
  for (const auto& [label, count] : c.col_sums) {
    (void)label;
    sum_cols += comb2(count);
  }
  const double total_pairs = comb2(static_cast<double>(c.n));
  const double expected = total_pairs > 0.0 ? sum_rows * sum_cols / total_pairs : 0.0;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  const double denom = max_index - expected;
  m.ari = std::abs(denom) < 1e-15 ? 1.0 : (index - expected) / denom;
  return m;
}

namespace {

double squared_distance(const Matrix& points, Eigen::Index j, const Matrix& centers,
                        Eigen::Index c) {
  return (points.col(j) - centers.col(c)).squaredNorm();
}

KMeansResult kmeans_single(const Matrix& points, int k, std::mt19937_64& rng) {
  const Eigen::Index n = points.cols();
  Matrix centers(points.rows(), k);

  // Distance-weighted seeding: first center uniform, later centers drawn with
  // probability proportional to the squared distance to the nearest center.
  std::uniform_int_distribution<Eigen::Index> uniform_point(0, n - 1);
  centers.col(0) = points.col(uniform_point(rng));
  Vector nearest = Vector::Constant(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    for (Eigen::Index j = 0; j < n; ++j) {
      nearest[j] = std::min(nearest[j], squared_distance(points, j, centers, c - 1));
    }
    const double total = nearest.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> unif(0.0, total);
      double target = unif(rng);
      for (Eigen::Index j = 0; j < n; ++j) {
        target -= nearest[j];
        if (target <= 0.0) {
          pick = j;
          break;
        }
        pick = j;
      }
    } else {
      pick = uniform_point(rng);
    }
    centers.col(c) = points.col(pick);
  }

  KMeansResult result;
  result.assignment.assign(static_cast<std::size_t>(n), 0);
  constexpr int kMaxPasses = 100;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool changed = false;
    double inertia = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      int best = 0;
      double best_d = squared_distance(points, j, centers, 0);
      for (int c = 1; c < k; ++c) {
        const double d = squared_distance(points, j, centers, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (result.assignment[static_cast<std::size_t>(j)] != best) {
        result.assignment[static_cast<std::size_t>(j)] = best;
        changed = true;
      }
      inertia += best_d;
    }
    result.inertia = inertia;
    result.inertia_trace.push_back(inertia);
    if (!changed && pass > 0) {
      break;
    }

    // Recompute centers; an empty cluster takes the point farthest from its
    // center so no cluster dies.
    Matrix sums = Matrix::Zero(points.rows(), k);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index j = 0; j < n; ++j) {
      sums.col(result.assignment[static_cast<std::size_t>(j)]) += points.col(j);
      counts[static_cast<std::size_t>(result.assignment[static_cast<std::size_t>(j)])] += 1;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.col(c) = sums.col(c) / counts[static_cast<std::size_t>(c)];
      } else {
        Eigen::Index farthest = 0;
        double far_d = -1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
          const double d = squared_distance(points, j, centers,
                                            result.assignment[static_cast<std::size_t>(j)]);
          if (d > far_d) {
            far_d = d;
            farthest = j;
          }
        }
        centers.col(c) = points.col(farthest);
      }
    }
  }
  return result;
}

} // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts) {
  if (k < 1) {
    throw std::invalid_argument("kmeans: k must be positive");
  }
  if (points.cols() < k) {
    throw std::invalid_argument("kmeans: fewer points than clusters");
  }
  if (restarts < 1) {
    throw std::invalid_argument("kmeans: need at least one restart");
  }
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    KMeansResult candidate = kmeans_single(points, k, rng);
    if (candidate.inertia < best.inertia) {
      best = std::move(candidate);
    }
  }
  return best;
}

namespace detail {

double softmax_nll(const Matrix& weights, const Matrix& x, const Matrix& one_hot, double l2,
                   Matrix* grad) {
  const Eigen::Index n = x.cols();
  Matrix scores = weights.transpose() * x; // classes x n
  // Stable log-sum-exp per column.
  double loss = 0.0;
  Matrix probs(scores.rows(), scores.cols());
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mx = scores.col(j).maxCoeff();
    const Vector e = (scores.col(j).array() - mx).exp();
    const double z = e.sum();
    probs.col(j) = e / z;
    for (Eigen::Index c = 0; c < scores.rows(); ++c) {
      if (one_hot(c, j) > 0.0) {
        loss -= (scores(c, j) - mx - std::log(z));
      }
    }
  }
  loss /= static_cast<double>(n);
  loss += 0.5 * l2 * weights.squaredNorm();
  if (grad != nullptr) {
    *grad = x * (probs - one_hot).transpose() / static_cast<double>(n) + l2 * weights;
  }
  return loss;
}

} // namespace detail

std::vector<int> softmax_classifier(const Matrix& train_x, const std::vector<int>& train_y,
                                    int num_classes, const Matrix& test_x,
                                    const SoftmaxParams& params, std::uint64_t seed) {
  (void)seed; // the optimization is deterministic; the seed is part of the
              // protocol signature for interface stability
  if (train_x.cols() != static_cast<Eigen::Index>(train_y.size())) {
    throw std::invalid_argument("softmax_classifier: training label count mismatch");
  }
  if (train_x.rows() != test_x.rows()) {
    throw std::invalid_argument("softmax_classifier: train/test dimension mismatch");
  }
  if (num_classes < 2) {
    throw std::invalid_argument("softmax_classifier: need at least two classes");
  }
  if (params.epochs < 0 || !(params.step > 0.0) || params.l2 < 0.0) {
    throw std::invalid_argument("softmax_classifier: bad optimizer parameters");
  }

  Matrix one_hot = Matrix::Zero(num_classes, train_x.cols());
  for (Eigen::Index j = 0; j < train_x.cols(); ++j) {
    const int cls = train_y[static_cast<std::size_t>(j)];
    if (cls < 0 || cls >= num_classes) {
      throw std::invalid_argument("softmax_classifier: label outside [0, num_classes)");
    }
    one_hot(cls, j) = 1.0;
  }

  Matrix weights = Matrix::Zero(train_x.rows(), num_classes);
  Matrix grad;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    detail::softmax_nll(weights, train_x, one_hot, params.l2, &grad);
    weights -= params.step * grad;
  }
  return predict_labels(weights, test_x);
}

namespace {

std::vector<int> unlabeled_truth(const MultiViewDataset& ds, int t) {
  const TaskData& task = ds.tasks[t];
  if (task.clean_labels.empty()) {
    throw std::invalid_argument("evaluation: dataset lacks ground-truth labels for its "
                                "unlabeled instances (no truth available)");
  }
  return std::vector<int>(task.clean_labels.begin() + ds.n_labeled, task.clean_labels.end());
}

double unlabeled_accuracy(const MultiViewDataset& ds, const TrainReport& report) {
  double total = 0.0;
  for (int t = 0; t < ds.num_tasks(); ++t) {
    const std::vector<int> truth = unlabeled_truth(ds, t);
    const Matrix features_u = report.features[t].rightCols(ds.n_unlabeled());
    const std::vector<int> predicted = predict_labels(report.task_weights[t], features_u);
    total += classification_metrics(truth, predicted, ds.num_classes()).accuracy;
  }
  return total / ds.num_tasks();
}

} // namespace

SweepResult noise_sweep(const MultiViewDataset& ds, const Hyperparams& hp_standard,
                        const Hyperparams& hp_anti_noise, const std::vector<double>& fractions,
                        const std::vector<std::uint64_t>& seeds) {
  ds.validate();
  if (fractions.empty() || seeds.empty()) {
    throw std::invalid_argument("noise_sweep: need at least one fraction and one seed");
  }
  if (ds.n_unlabeled() < 1) {
    throw std::invalid_argument("noise_sweep: dataset has no unlabeled instances to score");
  }
  for (int t = 0; t < ds.num_tasks(); ++t) {
    (void)unlabeled_truth(ds, t); // fail early when ground truth is missing
  }

  SweepResult result;
  for (const double fraction : fractions) {
    std::vector<double> acc_standard;
    std::vector<double> acc_anti;
    for (const std::uint64_t seed : seeds) {
      const MultiViewDataset noisy = inject_label_noise(ds, fraction, seed);

      Hyperparams hp_s = hp_standard;
      hp_s.seed = seed;
      Hyperparams hp_a = hp_anti_noise;
      hp_a.seed = seed;

      const double a_s = unlabeled_accuracy(noisy, fit_mtmvcsf(noisy, hp_s));
      const double a_a = unlabeled_accuracy(noisy, fit_an_mtmvcsf(noisy, hp_a));
      result.cells.push_back({"mtmvcsf", fraction, seed, a_s});
      result.cells.push_back({"an_mtmvcsf", fraction, seed, a_a});
      acc_standard.push_back(a_s);
      acc_anti.push_back(a_a);
    }

    const auto summarize = [&](const std::string& name, const std::vector<double>& values) {
      const double mean =
          std::accumulate(values.begin(), values.end(), 0.0) / values.size();
      double var = 0.0;
      for (double v : values) {
        var += (v - mean) * (v - mean);
      }
      const double sd = values.size() > 1 ? std::sqrt(var / (values.size() - 1)) : 0.0;
      result.summary.push_back({name, fraction, mean, sd});
    };
    summarize("mtmvcsf", acc_standard);
    summarize("an_mtmvcsf", acc_anti);
  }
  return result;
}

std::string sweep_cells_csv(const SweepResult& result) {
  std::string out = "algorithm,fraction,seed,accuracy\n";
  for (const SweepCell& cell : result.cells) {
    out += cell.algorithm + ',' + detail::format_double(cell.fraction) + ',' +
           std::to_string(cell.seed) + ',' + detail::format_double(cell.accuracy) + '\n';
  }
  return out;
}

std::string sweep_summary_json(const SweepResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepSummaryRow& row : result.summary) {
    rows.push_back({{"algorithm", row.algorithm},
                    {"fraction", row.fraction},
                    {"mean_accuracy", row.mean_accuracy},
                    {"stddev_accuracy", row.stddev_accuracy}});
  }
  nlohmann::json doc = {{"format_version", 1}, {"summary", std::move(rows)}};
  return doc.dump(2) + "\n";
}

namespace {

Matrix stacked_raw_unlabeled(const MultiViewDataset& ds, int t) {
  Eigen::Index rows = 0;
  for (const Matrix& x : ds.tasks[t].views) {
    rows += x.rows();
  }
  Matrix stacked(rows, ds.n_unlabeled());
  Eigen::Index offset = 0;
  for (const Matrix& x : ds.tasks[t].views) {
    stacked.middleRows(offset, x.rows()) = x.rightCols(ds.n_unlabeled());
    offset += x.rows();
  }
  return stacked;
}

void push_metrics(ComparisonResult& result, const std::string& arm, int task,
                  const ClassificationMetrics& m) {
  result.rows.push_back({arm, task, "accuracy", m.accuracy});
  result.rows.push_back({arm, task, "macro_precision", m.macro_precision});
  result.rows.push_back({arm, task, "macro_f1", m.macro_f1});
  result.rows.push_back({arm, task, "macro_dice", m.macro_dice});
  result.rows.push_back({arm, task, "sample_jaccard", m.sample_jaccard});
}

void push_metrics(ComparisonResult& result, const std::string& arm, int task,
                  const ClusteringMetrics& m) {
  result.rows.push_back({arm, task, "nmi", m.nmi});
  result.rows.push_back({arm, task, "ari", m.ari});
  result.rows.push_back({arm, task, "homogeneity", m.homogeneity});
  result.rows.push_back({arm, task, "completeness", m.completeness});
}

// Appends, per arm, one mean row per metric across tasks.
void append_mean_rows(ComparisonResult& result, int n_tasks) {
  std::vector<std::pair<std::pair<std::string, std::string>, double>> sums;
  for (const ComparisonRow& row : result.rows) {
    if (row.task < 0) {
      continue;
    }
    bool found = false;
    for (auto& [key, total] : sums) {
      if (key.first == row.arm && key.second == row.metric) {
        total += row.value;
        found = true;
        break;
      }
    }
    if (!found) {
      sums.push_back({{row.arm, row.metric}, row.value});
    }
  }
  for (const auto& [key, total] : sums) {
    result.rows.push_back({key.first, -1, key.second, total / n_tasks});
  }
}

} // namespace

ComparisonResult latent_vs_raw(const MultiViewDataset& ds, const Hyperparams& hp, EvalMode mode,
                               std::uint64_t seed, const EvalProtocolParams& params) {
  ds.validate();
  if (ds.n_unlabeled() < 2) {
    throw std::invalid_argument("latent_vs_raw: need at least two unlabeled instances");
  }
  for (int t = 0; t < ds.num_tasks(); ++t) {
    (void)unlabeled_truth(ds, t);
  }

  const TrainReport report = fit_mtmvcsf(ds, hp);

  ComparisonResult result;
  result.mode = mode;
  std::mt19937_64 rng(seed);

  for (int t = 0; t < ds.num_tasks(); ++t) {
    const std::vector<int> truth = unlabeled_truth(ds, t);
    const Matrix latent = report.features[t].rightCols(ds.n_unlabeled());
    const Matrix raw = stacked_raw_unlabeled(ds, t);

    if (mode == EvalMode::cluster) {
      // One k-means seed per task, shared by both arms.
      const std::uint64_t task_seed = rng();
      const KMeansResult km_latent =
          kmeans(latent, ds.num_classes(), task_seed, params.kmeans_restarts);
      const KMeansResult km_raw =
          kmeans(raw, ds.num_classes(), task_seed, params.kmeans_restarts);
      push_metrics(result, "latent", t, clustering_metrics(truth, km_latent.assignment));
      push_metrics(result, "raw", t, clustering_metrics(truth, km_raw.assignment));
      continue;
    }

    // 50/50 split of the unlabeled instances, one shared permutation per task.
    const int n_u = ds.n_unlabeled();
    std::vector<int> order(static_cast<std::size_t>(n_u));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int n_train = n_u / 2;
    const int n_test = n_u - n_train;
    if (n_train < 1) {
      throw std::invalid_argument("latent_vs_raw: split leaves no training instances");
    }

    const auto take = [&](const Matrix& src, int begin, int count) {
      Matrix out(src.rows(), count);
      for (int j = 0; j < count; ++j) {
        out.col(j) = src.col(order[static_cast<std::size_t>(begin + j)]);
      }
      return out;
    };
    std::vector<int> train_y(static_cast<std::size_t>(n_train));
    std::vector<int> test_y(static_cast<std::size_t>(n_test));
    for (int j = 0; j < n_train; ++j) {
      train_y[static_cast<std::size_t>(j)] = truth[static_cast<std::size_t>(order[j])];
    }
    for (int j = 0; j < n_test; ++j) {
      test_y[static_cast<std::size_t>(j)] =
          truth[static_cast<std::size_t>(order[n_train + j])];
    }

    const std::uint64_t task_seed = rng();
    const std::vector<int> pred_latent =
        softmax_classifier(take(latent, 0, n_train), train_y, ds.num_classes(),
                           take(latent, n_train, n_test), params.softmax, task_seed);
    const std::vector<int> pred_raw =
        softmax_classifier(take(raw, 0, n_train), train_y, ds.num_classes(),
                           take(raw, n_train, n_test), params.softmax, task_seed);
    push_metrics(result, "latent", t, classification_metrics(test_y, pred_latent, ds.num_classes()));
    push_metrics(result, "raw", t, classification_metrics(test_y, pred_raw, ds.num_classes()));
  }

  append_mean_rows(result, ds.num_tasks());
  return result;
}

std::string comparison_csv(const ComparisonResult& result) {
  std::string out = "arm,task,metric,value\n";
  for (const ComparisonRow& row : result.rows) {
    out += row.arm + ',' + (row.task < 0 ? std::string("mean") : std::to_string(row.task)) +
           ',' + row.metric + ',' + detail::format_double(row.value) + '\n';
  }
  return out;
}

std::string comparison_json(const ComparisonResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ComparisonRow& row : result.rows) {
    nlohmann::json r = {{"arm", row.arm}, {"metric", row.metric}, {"value", row.value}};
    if (row.task < 0) {
      r["task"] = "mean";
    } else {
      r["task"] = row.task;
    }
    rows.push_back(std::move(r));
  }
  nlohmann::json doc = {
      {"format_version", 1},
      {"mode", result.mode == EvalMode::classify ? "classify" : "cluster"},
      {"rows", std::move(rows)},
  };
  return doc.dump(2) + "\n";
}

} // namespace mtmv
