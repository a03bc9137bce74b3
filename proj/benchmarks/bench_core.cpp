// Microbenchmarks for the numeric hot spots: the simplex projection, the PSD
// square root behind the coupling update, column normalization, the
// multiplicative factor sweep, and one full training iteration.

#include <benchmark/benchmark.h>

#include <random>

#include "mtmv/dataset.hpp"
#include "mtmv/factorization.hpp"
#include "mtmv/regression.hpp"
#include "mtmv/simplex.hpp"
#include "mtmv/trainer.hpp"

using namespace mtmv;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      m(i, j) = unit(rng);
    }
  }
  return m;
}

void BM_SimplexProjection(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = normal(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_to_simplex(v));
  }
}
BENCHMARK(BM_SimplexProjection)->Arg(16)->Arg(256)->Arg(4096);

void BM_PsdSqrt(benchmark::State& state) {
  const Eigen::Index k = state.range(0);
  const Matrix w = random_matrix(k, 12, 11);
  const Matrix gram = w * w.transpose();
  for (auto _ : state) {
    benchmark::DoNotOptimize(matrix_sqrt_psd(gram));
  }
}
BENCHMARK(BM_PsdSqrt)->Arg(32)->Arg(128);

void BM_NormalizeColumns(benchmark::State& state) {
  const Matrix m = random_matrix(200, state.range(0), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalize_columns(m));
  }
}
BENCHMARK(BM_NormalizeColumns)->Arg(100)->Arg(1000);

void BM_FactorSweep(benchmark::State& state) {
  // One task, three views, half the columns labeled.
  const int views = 3, ks = 8, kc = 8, n = 400, nl = 200, dim = 100, classes = 3;
  std::vector<Matrix> x(views), bases(views);
  for (int v = 0; v < views; ++v) {
    x[v] = normalize_columns(random_matrix(dim, n, 100 + v));
    bases[v] = random_matrix(dim, ks + kc, 200 + v);
  }
  FactorBlocks blocks;
  for (int v = 0; v < views; ++v) {
    blocks.specific_labeled.push_back(random_matrix(ks, nl, 300 + v));
    blocks.specific_unlabeled.push_back(random_matrix(ks, n - nl, 400 + v));
  }
  blocks.common_labeled = random_matrix(kc, nl, 500);
  blocks.common_unlabeled = random_matrix(kc, n - nl, 501);

  Matrix w = random_matrix(blocks.joint_dim(), classes, 600);
  Matrix y = Matrix::Zero(classes, nl);
  for (int j = 0; j < nl; ++j) {
    y(j % classes, j) = 1.0;
  }
  const HSplit h = compute_h_split(w, assemble_labeled_features(blocks), y);
  const std::vector<double> weights(views, 1.0 / views);

  for (auto _ : state) {
    benchmark::DoNotOptimize(update_factor_blocks(blocks, bases, x, weights, h, 1e-3));
  }
}
BENCHMARK(BM_FactorSweep);

void BM_TrainIteration(benchmark::State& state) {
  SynthSpec spec = synth1_spec(0);
  spec.instances_per_class = 30;
  const MultiViewDataset ds = generate_synth(spec);
  Hyperparams hp;
  hp.k_per_view = 20;
  hp.max_iters = 1;
  hp.rel_tol = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_mtmvcsf(ds, hp));
  }
}
BENCHMARK(BM_TrainIteration);

} // namespace

BENCHMARK_MAIN();
