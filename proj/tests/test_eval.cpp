#include <doctest.h>

#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

#include "mtmv/dataset.hpp"
#include "mtmv/eval.hpp"

using namespace mtmv;

namespace {

SynthSpec micro_synth1(std::uint64_t seed) {
  SynthSpec spec = synth1_spec(seed);
  spec.instances_per_class = 4;
  return spec;
}

Hyperparams micro_hp() {
  Hyperparams hp;
  hp.k_per_view = 4;
  hp.kc_per = 0.5;
  hp.beta = 1e-3;
  hp.max_iters = 6;
  hp.rel_tol = 0.0;
  return hp;
}

} // namespace

TEST_CASE("argmax prediction breaks ties toward the lower class") {
  Matrix w(2, 2); // two features, two classes with identical weights
  w << 0.5, 0.5, 0.25, 0.25;
  Matrix f(2, 3);
  f << 1, 2, 3, 4, 5, 6;
  const std::vector<int> pred = predict_labels(w, f);
  CHECK(pred == std::vector<int>{0, 0, 0});

  Matrix w2(2, 2);
  w2 << 0.0, 1.0, 0.0, 1.0; // class 1 dominates any positive feature column
  CHECK(predict_labels(w2, f) == std::vector<int>{1, 1, 1});
}

TEST_CASE("confusion counts place truth in rows") {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2};
  const std::vector<int> pred{0, 1, 1, 1, 2, 0};
  const Eigen::MatrixXi m = confusion_counts(truth, pred, 3);
  CHECK(m(0, 0) == 1);
  CHECK(m(0, 1) == 1);
  CHECK(m(1, 1) == 2);
  CHECK(m(2, 0) == 1);
  CHECK(m(2, 2) == 1);
  CHECK(m.sum() == 6);
}

TEST_CASE("classification metrics match the hand-computed fixture") {
  // Per class: P = (1/2, 2/3, 1), R = (1/2, 1, 1/2), F1 = (1/2, 4/5, 2/3).
  const std::vector<int> truth{0, 0, 1, 1, 2, 2};
  const std::vector<int> pred{0, 1, 1, 1, 2, 0};
  const ClassificationMetrics m = classification_metrics(truth, pred, 3);
  CHECK(m.accuracy == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
  CHECK(m.macro_precision == doctest::Approx(13.0 / 18.0).epsilon(1e-12));
  CHECK(m.macro_f1 == doctest::Approx(59.0 / 90.0).epsilon(1e-12));
  CHECK(m.macro_dice == doctest::Approx(59.0 / 90.0).epsilon(1e-12));
  CHECK(m.sample_jaccard == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("classes absent from truth and prediction contribute zero") {
  const ClassificationMetrics m = classification_metrics({0, 0}, {0, 0}, 2);
  CHECK(m.accuracy == 1.0);
  CHECK(m.macro_precision == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.macro_f1 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("clustering metrics recognize perfect and relabeled partitions") {
  const ClusteringMetrics perfect = clustering_metrics({0, 0, 1, 1}, {0, 0, 1, 1});
  CHECK(perfect.nmi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(perfect.ari == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(perfect.homogeneity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(perfect.completeness == doctest::Approx(1.0).epsilon(1e-12));

  // Cluster ids are arbitrary: a relabeling scores the same.
  const ClusteringMetrics relabeled = clustering_metrics({0, 1, 0, 1, 2}, {1, 0, 1, 0, 2});
  CHECK(relabeled.nmi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(relabeled.ari == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("clustering metrics on an independent partition") {
  // Contingency is uniform: information is zero and ARI is -1/2.
  const ClusteringMetrics m = clustering_metrics({0, 0, 1, 1}, {0, 1, 0, 1});
  CHECK(m.nmi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.ari == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(m.homogeneity == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.completeness == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("degenerate partitions follow the zero-entropy conventions") {
  // Everything in one cluster: complete but not homogeneous, ARI 0.
  const ClusteringMetrics lumped = clustering_metrics({0, 0, 1, 1}, {0, 0, 0, 0});
  CHECK(lumped.completeness == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lumped.homogeneity == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lumped.nmi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lumped.ari == doctest::Approx(0.0).epsilon(1e-12));

  // Both partitions trivial: scored as perfect agreement.
  const ClusteringMetrics trivial = clustering_metrics({0, 0}, {0, 0});
  CHECK(trivial.nmi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trivial.ari == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trivial.homogeneity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trivial.completeness == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random assignments have near-zero adjusted Rand index on average") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> cls(0, 2);
  double total = 0.0;
  const int trials = 100, n = 60;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<int> truth(n), assigned(n);
    for (int i = 0; i < n; ++i) {
      truth[i] = cls(rng);
      assigned[i] = cls(rng);
    }
    total += clustering_metrics(truth, assigned).ari;
  }
  CHECK(std::abs(total / trials) <= 0.05);
}

TEST_CASE("kmeans recovers well-separated duplicated points") {
  Matrix points(2, 9);
  const double centers[3][2] = {{0.0, 0.0}, {10.0, 10.0}, {-10.0, 10.0}};
  for (int j = 0; j < 9; ++j) {
    points(0, j) = centers[j / 3][0];
    points(1, j) = centers[j / 3][1];
  }
  const KMeansResult r = kmeans(points, 3, 5);
  CHECK(r.inertia == doctest::Approx(0.0).epsilon(1e-12));
  // Duplicates land together and the three groups get distinct ids.
  CHECK(r.assignment[0] == r.assignment[1]);
  CHECK(r.assignment[1] == r.assignment[2]);
  CHECK(r.assignment[3] == r.assignment[4]);
  CHECK(r.assignment[0] != r.assignment[3]);
  CHECK(r.assignment[3] != r.assignment[6]);
  CHECK(r.assignment[0] != r.assignment[6]);

  // Lloyd passes never increase the inertia of the winning restart.
  for (std::size_t i = 1; i < r.inertia_trace.size(); ++i) {
    CHECK(r.inertia_trace[i] <= r.inertia_trace[i - 1] + 1e-12);
  }

  const KMeansResult again = kmeans(points, 3, 5);
  CHECK(again.assignment == r.assignment);

  CHECK_THROWS_AS(kmeans(points, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(kmeans(points, 10, 1), std::invalid_argument);
}

TEST_CASE("kmeans on random data is deterministic per seed") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix points(3, 40);
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      points(i, j) = normal(rng);
    }
  }
  const KMeansResult a = kmeans(points, 4, 11, 5);
  const KMeansResult b = kmeans(points, 4, 11, 5);
  CHECK(a.assignment == b.assignment);
  CHECK(a.inertia == b.inertia);
}

TEST_CASE("softmax classifier separates a linear problem") {
  Matrix train(1, 4);
  train << -1.0, -1.0, 1.0, 1.0;
  const std::vector<int> labels{0, 0, 1, 1};
  Matrix test(1, 2);
  test << -2.0, 2.0;
  const std::vector<int> pred = softmax_classifier(train, labels, 2, test, {}, 0);
  CHECK(pred == std::vector<int>{0, 1});

  // Zero training epochs leave the weights at zero: every score ties and the
  // argmax convention sends everything to class 0.
  SoftmaxParams lazy;
  lazy.epochs = 0;
  CHECK(softmax_classifier(train, labels, 2, test, lazy, 0) == std::vector<int>{0, 0});
}

TEST_CASE("softmax loss gradient agrees with finite differences") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = 4, c = 3, n = 12;
  Matrix x(d, n), w(d, c);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      x(i, j) = normal(rng);
    }
  }
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      w(i, j) = 0.3 * normal(rng);
    }
  }
  Matrix one_hot = Matrix::Zero(c, n);
  for (int j = 0; j < n; ++j) {
    one_hot(j % c, j) = 1.0;
  }

  Matrix grad;
  detail::softmax_nll(w, x, one_hot, 1e-3, &grad);
  const double h = 1e-6;
  for (int dir = 0; dir < 5; ++dir) {
    Matrix u(d, c);
    for (Eigen::Index j = 0; j < c; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) {
        u(i, j) = normal(rng);
      }
    }
    const double forward = detail::softmax_nll(w + h * u, x, one_hot, 1e-3, nullptr);
    const double backward = detail::softmax_nll(w - h * u, x, one_hot, 1e-3, nullptr);
    const double fd = (forward - backward) / (2.0 * h);
    const double analytic = (grad.array() * u.array()).sum();
    CHECK(fd == doctest::Approx(analytic).epsilon(1e-6));
  }
}

TEST_CASE("noise sweep enumerates cells in order and summarizes per fraction") {
  const MultiViewDataset ds = generate_synth(micro_synth1(3));
  const Hyperparams hp = micro_hp();
  const std::vector<double> fractions{0.0, 0.25};
  const std::vector<std::uint64_t> seeds{1, 2};

  const SweepResult r = noise_sweep(ds, hp, hp, fractions, seeds);
  REQUIRE(r.cells.size() == fractions.size() * seeds.size() * 2);
  std::size_t idx = 0;
  for (double fraction : fractions) {
    for (std::uint64_t seed : seeds) {
      for (const char* alg : {"mtmvcsf", "an_mtmvcsf"}) {
        const SweepCell& cell = r.cells[idx++];
        CHECK(cell.algorithm == alg);
        CHECK(cell.fraction == fraction);
        CHECK(cell.seed == seed);
        CHECK(cell.accuracy >= 0.0);
        CHECK(cell.accuracy <= 1.0);
      }
    }
  }

  REQUIRE(r.summary.size() == fractions.size() * 2);
  for (const SweepSummaryRow& row : r.summary) {
    double total = 0.0;
    int count = 0;
    for (const SweepCell& cell : r.cells) {
      if (cell.algorithm == row.algorithm && cell.fraction == row.fraction) {
        total += cell.accuracy;
        ++count;
      }
    }
    REQUIRE(count == static_cast<int>(seeds.size()));
    CHECK(row.mean_accuracy == doctest::Approx(total / count).epsilon(1e-12));
    CHECK(row.stddev_accuracy >= 0.0);
  }

  const std::string csv = sweep_cells_csv(r);
  CHECK(csv.rfind("algorithm,fraction,seed,accuracy\n", 0) == 0);

  // Ground truth for the unlabeled instances is required.
  MultiViewDataset stripped = ds;
  for (auto& task : stripped.tasks) {
    task.clean_labels.clear();
  }
  CHECK_THROWS_AS(noise_sweep(stripped, hp, hp, fractions, seeds), std::invalid_argument);
}

TEST_CASE("latent-vs-raw comparison produces mean rows that average the tasks") {
  const MultiViewDataset ds = generate_synth(micro_synth1(7));
  const Hyperparams hp = micro_hp();

  const ComparisonResult r = latent_vs_raw(ds, hp, EvalMode::classify, 5);
  // Two arms x (three tasks + mean) x five classification metrics.
  REQUIRE(r.rows.size() == 2 * 4 * 5);

  std::map<std::tuple<std::string, int, std::string>, double> values;
  for (const ComparisonRow& row : r.rows) {
    values[{row.arm, row.task, row.metric}] = row.value;
    CHECK(row.value >= 0.0);
    CHECK(row.value <= 1.0);
  }
  for (const char* arm : {"latent", "raw"}) {
    const double mean = values.at({arm, -1, "accuracy"});
    const double direct = (values.at({arm, 0, "accuracy"}) + values.at({arm, 1, "accuracy"}) +
                           values.at({arm, 2, "accuracy"})) /
                          3.0;
    CHECK(mean == doctest::Approx(direct).epsilon(1e-12));
  }

  const ComparisonResult again = latent_vs_raw(ds, hp, EvalMode::classify, 5);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(again.rows[i].value == r.rows[i].value);
  }

  const std::string csv = comparison_csv(r);
  CHECK(csv.rfind("arm,task,metric,value\n", 0) == 0);
  CHECK(csv.find(",mean,") != std::string::npos);

  const ComparisonResult clustered = latent_vs_raw(ds, hp, EvalMode::cluster, 5);
  REQUIRE(clustered.rows.size() == 2 * 4 * 4); // nmi, ari, homogeneity, completeness
  for (const ComparisonRow& row : clustered.rows) {
    CHECK(row.value >= -1.0);
    CHECK(row.value <= 1.0);
  }
}
