#include <doctest.h>

#include <json.hpp>
#include <stdexcept>

#include "mtmv/dataset.hpp"
#include "mtmv/trainer.hpp"

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
  hp.gamma = 1e-4;
  hp.lambda = 10.0;
  hp.max_iters = 15;
  hp.rel_tol = 0.0;
  return hp;
}

// One task, one view, three instances; the middle column is all zero.
MultiViewDataset zero_column_dataset() {
  MultiViewDataset ds;
  ds.name = "zero_col";
  ds.n_total = 3;
  ds.n_labeled = 2;
  TaskData task;
  Matrix view(2, 3);
  view << 0.5, 0.0, 0.25, 0.5, 0.0, 0.75;
  task.views = {view};
  task.labels.classes = {0, 1};
  task.labels.num_classes = 2;
  ds.tasks = {task};
  return ds;
}

} // namespace

TEST_CASE("common block size is rounded and clamped") {
  Hyperparams hp;
  hp.k_per_view = 10;
  hp.kc_per = 0.4;
  CHECK(hp.kc() == 4);
  CHECK(hp.ks() == 6);
  CHECK(hp.joint_dim(5) == 34);

  hp.k_per_view = 2;
  hp.kc_per = 0.99; // would round to 2 == k, clamped to leave one specific row
  CHECK(hp.kc() == 1);
  hp.kc_per = 0.01; // would round to 0, clamped up to one common row
  CHECK(hp.kc() == 1);
}

TEST_CASE("hyperparameter validation rejects out-of-range settings") {
  Hyperparams hp;
  hp.validate(); // defaults are fine

  Hyperparams bad = hp;
  bad.beta = -1e-9;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = hp;
  bad.beta = 0.0;
  bad.validate(); // unsupervised training is allowed

  bad = hp;
  bad.gamma = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = hp;
  bad.lambda = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = hp;
  bad.mu = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = hp;
  bad.k_per_view = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = hp;
  bad.kc_per = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = hp;
  bad.rel_tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("initialization is deterministic and structured") {
  const MultiViewDataset ds = generate_synth(micro_synth1(1));
  Hyperparams hp = micro_hp();
  hp.seed = 42;

  const TrainState a = initialize_state(ds, hp);
  const TrainState b = initialize_state(ds, hp);
  Hyperparams other = hp;
  other.seed = 43;
  const TrainState c = initialize_state(ds, other);

  const int joint = hp.joint_dim(ds.num_views());
  CHECK(a.n_labeled == ds.n_labeled);
  for (int t = 0; t < ds.num_tasks(); ++t) {
    for (int v = 0; v < ds.num_views(); ++v) {
      // Data columns are normalized to unit sum (none are all-zero here).
      for (Eigen::Index j = 0; j < a.x[t][v].cols(); ++j) {
        CHECK(a.x[t][v].col(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
      }
      CHECK(a.basis[t][v].minCoeff() >= 0.0);
      CHECK(a.basis[t][v].maxCoeff() <= 1.0);
      CHECK((a.basis[t][v] - b.basis[t][v]).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK((a.basis[t][0] - c.basis[t][0]).cwiseAbs().maxCoeff() > 0.0);
    CHECK(a.task_weights[t].cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.factors[t].joint_dim() == joint);
    CHECK((assemble_joint_features(a.factors[t]) -
           assemble_joint_features(b.factors[t]))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  CHECK(a.noise.wd.cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.coupling.d - Matrix::Identity(joint, joint) / joint).cwiseAbs().maxCoeff() <= 1e-15);
  const double uniform = 1.0 / (ds.num_tasks() * ds.num_views());
  CHECK((a.view_weights.array() - uniform).abs().maxCoeff() <= 1e-15);
  CHECK(a.zero_columns == 0);
}

TEST_CASE("all-zero data columns are counted during normalization") {
  Hyperparams hp;
  hp.k_per_view = 2;
  const TrainState s = initialize_state(zero_column_dataset(), hp);
  CHECK(s.zero_columns == 1);
}

TEST_CASE("objective matches a direct recomputation") {
  const MultiViewDataset ds = generate_synth(micro_synth1(5));
  Hyperparams hp = micro_hp();
  hp.seed = 3;
  TrainState s = initialize_state(ds, hp);
  // Give the supervised terms something nonzero to measure.
  for (auto& w : s.task_weights) {
    w.setConstant(0.01);
  }
  s.noise.wd.setConstant(0.005);

  const int v_count = ds.num_views();
  double expected = 0.0;
  for (int t = 0; t < ds.num_tasks(); ++t) {
    for (int v = 0; v < v_count; ++v) {
      expected += s.view_weights[t * v_count + v] *
                  (s.x[t][v] - s.basis[t][v] * view_factor(s.factors[t], v)).squaredNorm();
    }
  }
  expected += hp.lambda * s.view_weights.squaredNorm();

  const Eigen::Index joint = s.coupling.d.rows();
  const Matrix inv =
      (s.coupling.d + s.coupling.ridge_eps * Matrix::Identity(joint, joint)).inverse();
  double supervised = 0.0;
  double supervised_noisy = 0.0;
  for (int t = 0; t < ds.num_tasks(); ++t) {
    const Matrix f_l = assemble_labeled_features(s.factors[t]);
    supervised += (s.y[t] - s.task_weights[t].transpose() * f_l).squaredNorm();
    supervised_noisy +=
        (s.y[t] - (s.task_weights[t] + s.noise.wd).transpose() * f_l).squaredNorm();
    supervised += hp.gamma * (s.task_weights[t].transpose() * inv * s.task_weights[t]).trace();
    supervised_noisy +=
        hp.gamma * (s.task_weights[t].transpose() * inv * s.task_weights[t]).trace();
  }
  supervised_noisy += hp.mu * l21_norm(s.noise.wd);

  CHECK(objective(s, hp) ==
        doctest::Approx(expected + hp.beta * supervised).epsilon(1e-10));
  CHECK(objective_noisy(s, hp) ==
        doctest::Approx(expected + hp.beta * supervised_noisy).epsilon(1e-10));
}

TEST_CASE("row-wise l21 norm sums the row lengths") {
  Matrix m(2, 2);
  m << 3.0, 4.0, 0.0, 0.0;
  CHECK(l21_norm(m) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("min-max normalization rescales to the unit interval") {
  const std::vector<double> scaled = min_max_normalize({5.0, 3.0, 1.0});
  CHECK(scaled[0] == 1.0);
  CHECK(scaled[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(scaled[2] == 0.0);
  CHECK(min_max_normalize({2.0, 2.0}) == std::vector<double>{0.0, 0.0});
  CHECK(min_max_normalize({}).empty());
}

TEST_CASE("training runs to the iteration cap and mostly decreases") {
  const MultiViewDataset ds = generate_synth(micro_synth1(2));
  const Hyperparams hp = micro_hp();

  const TrainReport r = fit_mtmvcsf(ds, hp);
  CHECK(r.iterations == hp.max_iters); // rel_tol 0 never triggers early stop
  CHECK_FALSE(r.converged);
  REQUIRE(r.objective_trace.size() == static_cast<std::size_t>(hp.max_iters) + 1);
  CHECK(r.objective_trace.back() < r.objective_trace.front());
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
    const double prev = r.objective_trace[i - 1];
    CHECK(r.objective_trace[i] <= prev + 1e-6 * std::max(std::abs(prev), 1.0));
  }
  CHECK(r.normalized_trace.front() == 1.0);

  REQUIRE(r.features.size() == 3);
  REQUIRE(r.bases.size() == 3);
  CHECK(r.features[0].rows() == hp.joint_dim(ds.num_views()));
  CHECK(r.features[0].cols() == ds.n_total);
  CHECK(r.features[0].minCoeff() >= 0.0);
  CHECK(r.noise_weights.size() == 0); // standard algorithm reports no noise block
  CHECK(r.view_weights.sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("a loose tolerance stops training early and sets the flag") {
  const MultiViewDataset ds = generate_synth(micro_synth1(2));
  Hyperparams hp = micro_hp();
  hp.rel_tol = 0.5;
  hp.max_iters = 50;
  const TrainReport r = fit_mtmvcsf(ds, hp);
  CHECK(r.converged);
  CHECK(r.iterations < hp.max_iters);
  CHECK(r.objective_trace.size() == static_cast<std::size_t>(r.iterations) + 1);
}

TEST_CASE("training is deterministic per seed") {
  const MultiViewDataset ds = generate_synth(micro_synth1(6));
  Hyperparams hp = micro_hp();
  hp.seed = 9;
  const TrainReport a = fit_mtmvcsf(ds, hp);
  const TrainReport b = fit_mtmvcsf(ds, hp);
  CHECK(a.objective_trace == b.objective_trace);
  for (std::size_t t = 0; t < a.features.size(); ++t) {
    CHECK((a.features[t] - b.features[t]).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(report_json(a, false) == report_json(b, false));
}

TEST_CASE("anti-noise training reports a noise block and decreases its objective") {
  const MultiViewDataset ds = generate_synth(micro_synth1(4));
  Hyperparams hp = micro_hp();
  hp.mu = 1e-3;
  const TrainReport r = fit_an_mtmvcsf(ds, hp);
  CHECK(r.noise_weights.rows() == hp.joint_dim(ds.num_views()));
  CHECK(r.noise_weights.cols() == ds.num_classes());
  CHECK(r.objective_trace.back() < r.objective_trace.front());
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
    const double prev = r.objective_trace[i - 1];
    CHECK(r.objective_trace[i] <= prev + 1e-6 * std::max(std::abs(prev), 1.0));
  }
}

TEST_CASE("a huge noise penalty reduces the anti-noise variant to the standard one") {
  const MultiViewDataset ds = generate_synth(micro_synth1(8));
  Hyperparams hp = micro_hp();
  hp.mu = 1e9;
  const TrainReport standard = fit_mtmvcsf(ds, hp);
  const TrainReport an = fit_an_mtmvcsf(ds, hp);

  CHECK(an.noise_weights.cwiseAbs().maxCoeff() <= 1e-12);
  const double rel = std::abs(an.objective_trace.back() - standard.objective_trace.back()) /
                     standard.objective_trace.back();
  CHECK(rel <= 1e-4);
  for (std::size_t t = 0; t < standard.features.size(); ++t) {
    CHECK((standard.features[t] - an.features[t]).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("report JSON carries the run description and can drop timings") {
  const MultiViewDataset ds = generate_synth(micro_synth1(2));
  Hyperparams hp = micro_hp();
  hp.max_iters = 3;
  const TrainReport r = fit_mtmvcsf(ds, hp);

  const nlohmann::json bare = nlohmann::json::parse(report_json(r, false));
  CHECK(bare.at("format_version") == 1);
  CHECK(bare.at("timings_ms").is_object());
  CHECK(bare.at("timings_ms").empty());
  CHECK(bare.at("iterations") == 3);
  CHECK(bare.at("objective_trace").size() == 4);
  CHECK(bare.at("hyperparams").at("k_per_view") == 4);

  const nlohmann::json timed = nlohmann::json::parse(report_json(r, true));
  CHECK(timed.at("timings_ms").contains("objective"));
  CHECK(timed.at("timings_ms").contains("factors"));
}
