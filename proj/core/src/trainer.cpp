#include "mtmv/trainer.hpp"

#include "mtmv/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace mtmv {

int Hyperparams::kc() const {
  const int raw = static_cast<int>(std::llround(kc_per * k_per_view));
  return std::clamp(raw, 1, k_per_view - 1);
}

void Hyperparams::validate() const {
  if (!(beta >= 0.0)) {
    throw std::invalid_argument("hyperparams: beta must be nonnegative");
  }
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("hyperparams: gamma must be positive");
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("hyperparams: lambda must be positive");
  }
  if (!(mu > 0.0)) {
    throw std::invalid_argument("hyperparams: mu must be positive");
  }
  if (k_per_view < 2) {
    throw std::invalid_argument("hyperparams: k_per_view must be at least 2 so both the "
                                "specific and common blocks are nonempty");
  }
  if (!(kc_per > 0.0) || !(kc_per < 1.0)) {
    throw std::invalid_argument("hyperparams: kc_per must lie in (0, 1)");
  }
  if (max_iters < 0) {
    throw std::invalid_argument("hyperparams: max_iters must be nonnegative");
  }
  if (!(rel_tol >= 0.0)) {
    throw std::invalid_argument("hyperparams: rel_tol must be nonnegative");
  }
  if (!(ridge_eps > 0.0) || !(irls_eps > 0.0)) {
    throw std::invalid_argument("hyperparams: ridge_eps and irls_eps must be positive");
  }
}

namespace {

Matrix random_uniform(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      m(i, j) = unif(rng);
    }
  }
  return m;
}

} // namespace

TrainState initialize_state(const MultiViewDataset& ds, const Hyperparams& hp) {
  ds.validate();
  hp.validate();

  const int t_count = ds.num_tasks();
  const int v_count = ds.num_views();
  const int c_count = ds.num_classes();
  const int ks = hp.ks();
  const int kc = hp.kc();
  const int joint = hp.joint_dim(v_count);
  const int n_l = ds.n_labeled;
  const int n_u = ds.n_unlabeled();

  std::mt19937_64 rng(hp.seed);

  TrainState s;
  s.n_labeled = n_l;
  s.x.resize(t_count);
  s.y.resize(t_count);
  s.basis.resize(t_count);
  s.factors.resize(t_count);
  s.task_weights.resize(t_count);

  for (int t = 0; t < t_count; ++t) {
    const TaskData& task = ds.tasks[t];
    s.x[t].resize(v_count);
    for (int v = 0; v < v_count; ++v) {
      int zeros = 0;
      s.x[t][v] = normalize_columns(task.views[v], &zeros);
      s.zero_columns += zeros;
    }
    s.y[t] = task.labels.one_hot();

    s.basis[t].resize(v_count);
    for (int v = 0; v < v_count; ++v) {
      s.basis[t][v] = random_uniform(task.views[v].rows(), ks + kc, rng);
    }

    FactorBlocks& f = s.factors[t];
    f.specific_labeled.resize(v_count);
    f.specific_unlabeled.resize(v_count);
    for (int v = 0; v < v_count; ++v) {
      f.specific_labeled[v] = random_uniform(ks, n_l, rng);
      f.specific_unlabeled[v] = random_uniform(ks, n_u, rng);
    }
    // Drawn once per task: the common block is shared across its views.
    f.common_labeled = random_uniform(kc, n_l, rng);
    f.common_unlabeled = random_uniform(kc, n_u, rng);

    s.task_weights[t] = Matrix::Zero(joint, c_count);
  }

  s.noise.wd = Matrix::Zero(joint, c_count);
  s.noise.irls_eps = hp.irls_eps;
  s.coupling.d = Matrix::Identity(joint, joint) / static_cast<double>(joint);
  s.coupling.ridge_eps = hp.ridge_eps;
  s.view_weights =
      Vector::Constant(static_cast<Eigen::Index>(t_count) * v_count,
                       1.0 / static_cast<double>(t_count * v_count));
  return s;
}

namespace {

double supervised_terms(const TrainState& s, const Hyperparams& hp, bool anti_noise) {
  const Eigen::Index joint = s.coupling.d.rows();
  const Matrix ridged =
      s.coupling.d + s.coupling.ridge_eps * Matrix::Identity(joint, joint);
  Eigen::LLT<Matrix> llt(ridged);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("objective: ridged coupling matrix is not positive definite");
  }

  double prediction = 0.0;
  double coupling_penalty = 0.0;
  for (int t = 0; t < s.num_tasks(); ++t) {
    const Matrix f_l = assemble_labeled_features(s.factors[t]);
    const Matrix& w = s.task_weights[t];
    if (anti_noise) {
      prediction += (s.y[t] - (w + s.noise.wd).transpose() * f_l).squaredNorm();
    } else {
      prediction += (s.y[t] - w.transpose() * f_l).squaredNorm();
    }
    coupling_penalty += (w.transpose() * llt.solve(w)).trace();
  }

  double total = prediction + hp.gamma * coupling_penalty;
  if (anti_noise) {
    total += hp.mu * l21_norm(s.noise.wd);
  }
  return total;
}

double objective_impl(const TrainState& s, const Hyperparams& hp, bool anti_noise) {
  const int v_count = s.num_views();
  double recon = 0.0;
  for (int t = 0; t < s.num_tasks(); ++t) {
    for (int v = 0; v < v_count; ++v) {
      const double w = s.view_weights[static_cast<Eigen::Index>(t) * v_count + v];
      recon += w * (s.x[t][v] - s.basis[t][v] * view_factor(s.factors[t], v)).squaredNorm();
    }
  }
  double total = recon + hp.lambda * s.view_weights.squaredNorm();
  if (hp.beta > 0.0) {
    total += hp.beta * supervised_terms(s, hp, anti_noise);
  }
  return total;
}

} // namespace

double objective(const TrainState& s, const Hyperparams& hp) {
  return objective_impl(s, hp, false);
}

double objective_noisy(const TrainState& s, const Hyperparams& hp) {
  return objective_impl(s, hp, true);
}

double l21_norm(const Matrix& m) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    total += m.row(i).norm();
  }
  return total;
}

std::vector<double> min_max_normalize(const std::vector<double>& trace) {
  if (trace.empty()) {
    return {};
  }
  const auto [mn_it, mx_it] = std::minmax_element(trace.begin(), trace.end());
  const double mn = *mn_it;
  const double mx = *mx_it;
  std::vector<double> out(trace.size(), 0.0);
  if (mx > mn) {
    for (std::size_t i = 0; i < trace.size(); ++i) {
      out[i] = (trace[i] - mn) / (mx - mn);
    }
  }
  return out;
}

namespace {

class PhaseTimer {
 public:
  using Clock = std::chrono::steady_clock;

  void start() { begin_ = Clock::now(); }
  void stop(const std::string& phase) {
    const double ms =
        std::chrono::duration<double, std::milli>(Clock::now() - begin_).count();
    for (auto& [name, total] : totals_) {
      if (name == phase) {
        total += ms;
        return;
      }
    }
    totals_.emplace_back(phase, ms);
  }

  std::vector<std::pair<std::string, double>> totals() const { return totals_; }

 private:
  Clock::time_point begin_;
  std::vector<std::pair<std::string, double>> totals_;
};

TrainReport fit_impl(const MultiViewDataset& ds, const Hyperparams& hp, bool anti_noise) {
  TrainState s = initialize_state(ds, hp);
  const int t_count = s.num_tasks();
  const int v_count = s.num_views();

  const auto evaluate = anti_noise ? objective_noisy : objective;

  PhaseTimer timer;
  TrainReport report;
  report.hyperparams = hp;

  timer.start();
  report.objective_trace.push_back(evaluate(s, hp));
  timer.stop("objective");
  if (!std::isfinite(report.objective_trace.front())) {
    throw std::runtime_error("fit: initial objective is not finite");
  }

  for (int iter = 1; iter <= hp.max_iters; ++iter) {
    // Exact per-task weight solves.
    timer.start();
    std::vector<Matrix> labeled(t_count);
    for (int t = 0; t < t_count; ++t) {
      labeled[t] = assemble_labeled_features(s.factors[t]);
    }
    for (int t = 0; t < t_count; ++t) {
      s.task_weights[t] =
          anti_noise
              ? update_task_weights_noisy(labeled[t], s.y[t], s.coupling, s.noise, hp.gamma)
              : update_task_weights(labeled[t], s.y[t], s.coupling, hp.gamma);
    }
    timer.stop("task_weights");

    if (anti_noise) {
      timer.start();
      s.noise = update_noise_weights(labeled, s.y, s.task_weights, hp.mu, s.noise);
      timer.stop("noise_weights");
    }

    timer.start();
    const CouplingUpdate cu = update_coupling(s.task_weights, hp.ridge_eps);
    s.coupling = cu.coupling;
    timer.stop("coupling");

    // Multiplicative basis sweep (factors still at their pre-sweep values).
    timer.start();
    for (int t = 0; t < t_count; ++t) {
      for (int v = 0; v < v_count; ++v) {
        s.basis[t][v] = update_basis(s.basis[t][v], s.x[t][v], view_factor(s.factors[t], v));
      }
    }
    timer.stop("basis");

    // Factor sweep from the pre-sweep snapshot and the new bases.
    timer.start();
    for (int t = 0; t < t_count; ++t) {
      HSplit h;
      if (hp.beta > 0.0) {
        h = compute_h_split(s.task_weights[t], labeled[t], s.y[t],
                            anti_noise ? &s.noise.wd : nullptr);
      }
      std::vector<double> weights(v_count);
      for (int v = 0; v < v_count; ++v) {
        weights[v] = s.view_weights[static_cast<Eigen::Index>(t) * v_count + v];
      }
      s.factors[t] = update_factor_blocks(s.factors[t], s.basis[t], s.x[t], weights, h, hp.beta);
    }
    timer.stop("factors");

    // View weights from the fresh reconstruction errors.
    timer.start();
    Vector errors(static_cast<Eigen::Index>(t_count) * v_count);
    for (int t = 0; t < t_count; ++t) {
      for (int v = 0; v < v_count; ++v) {
        errors[static_cast<Eigen::Index>(t) * v_count + v] =
            (s.x[t][v] - s.basis[t][v] * view_factor(s.factors[t], v)).squaredNorm();
      }
    }
    s.view_weights = solve_view_weights(errors, hp.lambda).pi;
    timer.stop("view_weights");

    timer.start();
    const double obj = evaluate(s, hp);
    timer.stop("objective");

    const double prev = report.objective_trace.back();
    report.objective_trace.push_back(obj);
    report.iterations = iter;

    if (!std::isfinite(obj)) {
      throw std::runtime_error("fit: objective became non-finite at iteration " +
                               std::to_string(iter));
    }
    if (obj > 1.1 * prev) {
      throw std::runtime_error("fit: objective rose more than 10% at iteration " +
                               std::to_string(iter) + " (" + std::to_string(prev) + " -> " +
                               std::to_string(obj) + "); aborting as divergent");
    }

    const double rel = std::abs(obj - prev) / std::max(std::abs(prev), 1e-12);
    if (rel < hp.rel_tol) {
      report.converged = true;
      break;
    }
  }

  report.normalized_trace = min_max_normalize(report.objective_trace);
  report.timings_ms = timer.totals();
  report.features.reserve(t_count);
  for (int t = 0; t < t_count; ++t) {
    report.features.push_back(assemble_joint_features(s.factors[t]));
  }
  report.bases = s.basis;
  report.task_weights = s.task_weights;
  if (anti_noise) {
    report.noise_weights = s.noise.wd;
  }
  report.view_weights = s.view_weights;
  return report;
}

} // namespace

TrainReport fit_mtmvcsf(const MultiViewDataset& ds, const Hyperparams& hp) {
  return fit_impl(ds, hp, false);
}

TrainReport fit_an_mtmvcsf(const MultiViewDataset& ds, const Hyperparams& hp) {
  return fit_impl(ds, hp, true);
}

std::string report_json(const TrainReport& report, bool include_timings) {
  nlohmann::json hp = {
      {"beta", report.hyperparams.beta},
      {"gamma", report.hyperparams.gamma},
      {"lambda", report.hyperparams.lambda},
      {"mu", report.hyperparams.mu},
      {"k_per_view", report.hyperparams.k_per_view},
      {"kc_per", report.hyperparams.kc_per},
      {"max_iters", report.hyperparams.max_iters},
      {"rel_tol", report.hyperparams.rel_tol},
      {"ridge_eps", report.hyperparams.ridge_eps},
      {"irls_eps", report.hyperparams.irls_eps},
  };
  nlohmann::json doc = {
      {"format_version", 1},
      {"objective_trace", report.objective_trace},
      {"normalized_trace", report.normalized_trace},
      {"converged", report.converged},
      {"iterations", report.iterations},
      {"hyperparams", std::move(hp)},
      {"seed", report.hyperparams.seed},
  };
  nlohmann::json timings = nlohmann::json::object();
  if (include_timings) {
    for (const auto& [phase, ms] : report.timings_ms) {
      timings[phase] = ms;
    }
  }
  doc["timings_ms"] = std::move(timings);
  return doc.dump(2) + "\n";
}

} // namespace mtmv
