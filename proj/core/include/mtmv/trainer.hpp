#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mtmv/dataset.hpp"
#include "mtmv/factorization.hpp"
#include "mtmv/regression.hpp"
#include "mtmv/types.hpp"

namespace mtmv {

struct Hyperparams {
  double beta = 1e-5;   // weight of the supervised (regression) terms
  double gamma = 1e-4;  // weight of the cross-task coupling penalty
  double lambda = 10.0; // view-weight spreading penalty
  double mu = 1e-4;     // anti-noise variant only: l2,1 penalty on the noise weights

  int k_per_view = 20; // per-view factor dimension ks + kc
  double kc_per = 0.6; // fraction of k_per_view given to the common block

  int max_iters = 100;
  double rel_tol = 1e-5; // stop when the relative objective change drops below this
  std::uint64_t seed = 0;

  double ridge_eps = 1e-8; // coupling-matrix inverse ridge
  double irls_eps = 1e-8;  // noise-weight row-norm floor

  // Common block size: round(kc_per * k_per_view), clamped so both blocks
  // keep at least one dimension.
  int kc() const;
  int ks() const { return k_per_view - kc(); }
  int joint_dim(int views) const { return ks() * views + kc(); }

  void validate() const; // throws std::invalid_argument
};

// Full optimization state. Members are public so tests can assemble states
// directly and probe the objective.
struct TrainState {
  std::vector<std::vector<Matrix>> x; // column-normalized views, [task][view]
  std::vector<Matrix> y;              // one-hot labels per task (classes x n_labeled)
  std::vector<std::vector<Matrix>> basis;
  std::vector<FactorBlocks> factors;
  std::vector<Matrix> task_weights;
  NoiseWeights noise; // zero for the standard algorithm
  CouplingMatrix coupling;
  Vector view_weights; // length num_tasks * num_views, task-major

  int n_labeled = 0;
  int zero_columns = 0; // all-zero data columns found while normalizing

  int num_tasks() const { return static_cast<int>(x.size()); }
  int num_views() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
};

// Normalizes the data columns and draws uniform(0,1) bases and factors from
// the seed; task weights start at zero, the coupling at I / joint_dim, the
// view weights uniform. Deterministic per seed.
TrainState initialize_state(const MultiViewDataset& ds, const Hyperparams& hp);

// Weighted reconstruction + lambda ||pi||^2 + beta (prediction error +
// gamma sum_t tr(W^T (D + ridge I)^-1 W)).
double objective(const TrainState& s, const Hyperparams& hp);
// Anti-noise objective: prediction uses (W + Wd) and mu ||Wd||_{2,1} is added
// inside the beta-scaled group.
double objective_noisy(const TrainState& s, const Hyperparams& hp);

// Sum of row l2 norms.
double l21_norm(const Matrix& m);

struct TrainReport {
  std::vector<double> objective_trace;  // length iterations + 1 (initial value first)
  std::vector<double> normalized_trace; // min-max rescaling of objective_trace
  std::vector<std::pair<std::string, double>> timings_ms; // per update phase
  bool converged = false;
  int iterations = 0;

  std::vector<Matrix> features; // joint features per task (joint_dim x n)
  std::vector<std::vector<Matrix>> bases; // final bases, [task][view]
  std::vector<Matrix> task_weights;
  Matrix noise_weights; // empty for the standard algorithm
  Vector view_weights;
  Hyperparams hyperparams;
};

// Alternating optimization: per iteration the task weights (exact solve), the
// coupling, every basis, every factor block (snapshot semantics), then the
// view weights, followed by one objective evaluation. Throws std::runtime_error
// if the objective rises by more than 10% between iterations or turns
// non-finite.
TrainReport fit_mtmvcsf(const MultiViewDataset& ds, const Hyperparams& hp);

// Anti-noise variant: adds the shared noise-weight step after the task
// weights; the supervised pull on the factors uses (W + Wd).
TrainReport fit_an_mtmvcsf(const MultiViewDataset& ds, const Hyperparams& hp);

// (trace - min) / (max - min); all zeros when the trace is flat.
std::vector<double> min_max_normalize(const std::vector<double>& trace);

// JSON rendering of a report (without the large feature matrices). Timings
// can be omitted so that reruns of the same seed byte-match.
std::string report_json(const TrainReport& report, bool include_timings = true);

} // namespace mtmv
