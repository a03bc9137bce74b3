#include "mtmv/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mtmv/filters.hpp"
#include "mtmv/io_util.hpp"

namespace mtmv {

using nlohmann::json;

Matrix LabelSet::one_hot() const {
  Matrix y = Matrix::Zero(num_classes, static_cast<Eigen::Index>(classes.size()));
  for (std::size_t j = 0; j < classes.size(); ++j) {
    y(classes[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  return y;
}

int MultiViewDataset::num_views() const {
  return tasks.empty() ? 0 : static_cast<int>(tasks.front().views.size());
}

int MultiViewDataset::num_classes() const {
  return tasks.empty() ? 0 : tasks.front().labels.num_classes;
}

void MultiViewDataset::validate() const {
  if (tasks.empty()) {
    throw std::invalid_argument("dataset: no tasks");
  }
  if (n_labeled < 1 || n_labeled > n_total) {
    throw std::invalid_argument("dataset: labeled count must lie in [1, n_total]");
  }
  const int v_count = num_views();
  const int c_count = num_classes();
  if (v_count < 1) {
    throw std::invalid_argument("dataset: tasks must have at least one view");
  }
  if (c_count < 1) {
    throw std::invalid_argument("dataset: class count must be positive");
  }
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const TaskData& task = tasks[t];
    if (static_cast<int>(task.views.size()) != v_count) {
      throw std::invalid_argument("dataset: task " + std::to_string(t) +
                                  " has a different view count");
    }
    for (std::size_t v = 0; v < task.views.size(); ++v) {
      const Matrix& x = task.views[v];
      if (x.cols() != n_total) {
        throw std::invalid_argument("dataset: task " + std::to_string(t) + " view " +
                                    std::to_string(v) + ": expected " +
                                    std::to_string(n_total) + " columns, got " +
                                    std::to_string(x.cols()));
      }
      if (x.rows() < 1) {
        throw std::invalid_argument("dataset: task " + std::to_string(t) + " view " +
                                    std::to_string(v) + " has no rows");
      }
      if (!x.allFinite()) {
        throw std::invalid_argument("dataset: task " + std::to_string(t) + " view " +
                                    std::to_string(v) + " contains non-finite entries");
      }
      if ((x.array() < 0.0).any()) {
        throw std::invalid_argument("dataset: task " + std::to_string(t) + " view " +
                                    std::to_string(v) + " contains negative entries");
      }
    }
    if (task.labels.num_classes != c_count) {
      throw std::invalid_argument("dataset: task " + std::to_string(t) +
                                  " has a different class count");
    }
    if (static_cast<int>(task.labels.classes.size()) != n_labeled) {
      throw std::invalid_argument("dataset: task " + std::to_string(t) + ": expected " +
                                  std::to_string(n_labeled) + " labels, got " +
                                  std::to_string(task.labels.classes.size()));
    }
    for (int cls : task.labels.classes) {
      if (cls < 0 || cls >= c_count) {
        throw std::invalid_argument("dataset: task " + std::to_string(t) +
                                    " has a label outside [0, " + std::to_string(c_count) + ")");
      }
    }
    if (!task.clean_labels.empty()) {
      if (static_cast<int>(task.clean_labels.size()) != n_total) {
        throw std::invalid_argument("dataset: task " + std::to_string(t) +
                                    ": clean label list must cover every instance");
      }
      for (int cls : task.clean_labels) {
        if (cls < 0 || cls >= c_count) {
          throw std::invalid_argument("dataset: task " + std::to_string(t) +
                                      " has a clean label outside [0, " +
                                      std::to_string(c_count) + ")");
        }
      }
    }
  }
}

SynthSpec synth1_spec(std::uint64_t seed) {
  SynthSpec s;
  s.name = "synth1";
  s.n_tasks = 3;
  s.classes_per_task = 3;
  s.instances_per_class = 200;
  s.mean_std = {{1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}};
  s.patch_side = 10;
  s.seed = seed;
  return s;
}

SynthSpec synth2_spec(std::uint64_t seed) {
  SynthSpec s;
  s.name = "synth2";
  s.n_tasks = 4;
  s.classes_per_task = 4;
  s.instances_per_class = 200;
  s.mean_std = {{1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}, {4.0, 4.0}};
  s.patch_side = 10;
  s.seed = seed;
  return s;
}

int normalize_columns_in_place(Matrix& m) {
  if (!m.allFinite()) {
    throw std::invalid_argument("normalize_columns: non-finite entries");
  }
  if ((m.array() < 0.0).any()) {
    throw std::invalid_argument("normalize_columns: negative entries");
  }
  int zero_columns = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double s = m.col(j).sum();
    if (s == 0.0) {
      ++zero_columns;
    } else {
      m.col(j) /= s;
    }
  }
  return zero_columns;
}

Matrix normalize_columns(const Matrix& m, int* zero_columns) {
  Matrix out = m;
  const int zeros = normalize_columns_in_place(out);
  if (zero_columns != nullptr) {
    *zero_columns = zeros;
  }
  return out;
}

namespace {

// Fills in a fixed element order so the draw sequence is reproducible.
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

// Each feature dimension is rescaled to [0, 1] across the instances of the
// view. Scaling per dimension (rather than one affine map for the whole
// matrix) keeps dimensions with small dynamic range from being flattened by
// dimensions with large one.
void min_max_scale_rows_in_place(Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double mn = m.row(r).minCoeff();
    const double mx = m.row(r).maxCoeff();
    if (mx > mn) {
      m.row(r) = (m.row(r).array() - mn) / (mx - mn);
    } else {
      m.row(r).setZero();
    }
  }
}

} // namespace

MultiViewDataset generate_synth(const SynthSpec& spec) {
  if (spec.n_tasks < 1) {
    throw std::invalid_argument("generate_synth: need at least one task");
  }
  if (spec.classes_per_task < 1) {
    throw std::invalid_argument("generate_synth: need at least one class");
  }
  if (spec.instances_per_class < 1) {
    throw std::invalid_argument("generate_synth: need at least one instance per class");
  }
  if (static_cast<int>(spec.mean_std.size()) != spec.classes_per_task) {
    throw std::invalid_argument("generate_synth: mean_std must have one entry per class");
  }
  for (const auto& [mean, sd] : spec.mean_std) {
    (void)mean;
    if (sd <= 0.0) {
      throw std::invalid_argument("generate_synth: class standard deviations must be positive");
    }
  }
  if (spec.patch_side < 3) {
    throw std::invalid_argument("generate_synth: patch side must be at least 3");
  }
  if (!(spec.labeled_fraction > 0.0) || spec.labeled_fraction > 1.0) {
    throw std::invalid_argument("generate_synth: labeled fraction must lie in (0, 1]");
  }

  const int side = spec.patch_side;
  const int dim = side * side;
  const int n = spec.classes_per_task * spec.instances_per_class;
  const int n_labeled =
      std::max(1, static_cast<int>(std::llround(spec.labeled_fraction * n)));
  constexpr int kViews = 5;

  const std::array<Matrix, 4> kernels = {
      filters::averaging3(),
      filters::gaussian3(0.5),
      filters::laplacian3(0.2),
      filters::prewitt_horizontal3(),
  };

  std::mt19937_64 rng(spec.seed);

  MultiViewDataset ds;
  ds.name = spec.name;
  ds.n_total = n;
  ds.n_labeled = n_labeled;
  ds.tasks.resize(spec.n_tasks);

  for (int t = 0; t < spec.n_tasks; ++t) {
    TaskData& task = ds.tasks[t];
    task.views.assign(kViews, Matrix(dim, n));
    std::vector<int> labels(n);

    int col = 0;
    for (int c = 0; c < spec.classes_per_task; ++c) {
      std::normal_distribution<double> normal(spec.mean_std[c].first, spec.mean_std[c].second);
      for (int i = 0; i < spec.instances_per_class; ++i, ++col) {
        Matrix patch(side, side);
        for (int r = 0; r < side; ++r) {
          for (int q = 0; q < side; ++q) {
            patch(r, q) = normal(rng);
          }
        }
        // View order: averaging, maximum, Gaussian, Laplacian, Prewitt.
        const std::array<Matrix, kViews> filtered = {
            filters::convolve3_replicate(patch, kernels[0]),
            filters::max3_replicate(patch),
            filters::convolve3_replicate(patch, kernels[1]),
            filters::convolve3_replicate(patch, kernels[2]),
            filters::convolve3_replicate(patch, kernels[3]),
        };
        for (int v = 0; v < kViews; ++v) {
          // Row-major flatten of the filtered patch.
          for (int r = 0; r < side; ++r) {
            for (int q = 0; q < side; ++q) {
              task.views[v](r * side + q, col) = filtered[v](r, q);
            }
          }
        }
        labels[col] = c;
      }
    }

    for (int v = 0; v < kViews; ++v) {
      min_max_scale_rows_in_place(task.views[v]);
    }

    // One instance permutation per task, shared by every view and the labels,
    // so "labeled" is a seeded random subset placed first.
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    std::vector<int> shuffled(n);
    for (int j = 0; j < n; ++j) {
      shuffled[j] = labels[perm[j]];
    }
    for (int v = 0; v < kViews; ++v) {
      Matrix reordered(dim, n);
      for (int j = 0; j < n; ++j) {
        reordered.col(j) = task.views[v].col(perm[j]);
      }
      task.views[v] = std::move(reordered);
    }

    task.clean_labels = shuffled;
    task.labels.num_classes = spec.classes_per_task;
    task.labels.classes.assign(shuffled.begin(), shuffled.begin() + n_labeled);
  }

  ds.validate();
  return ds;
}

MultiViewDataset inject_label_noise(const MultiViewDataset& ds, double fraction,
                                    std::uint64_t seed) {
  ds.validate();
  if (ds.num_classes() < 2) {
    throw std::invalid_argument("inject_label_noise: need at least two classes to flip labels");
  }
  if (!(fraction >= 0.0) || fraction > 0.5) {
    throw std::invalid_argument("inject_label_noise: fraction must lie in [0, 0.5]");
  }

  MultiViewDataset out = ds;
  const int c_count = ds.num_classes();
  const int flips = static_cast<int>(std::floor(fraction * ds.n_labeled + 0.5));
  std::mt19937_64 rng(seed);

  for (TaskData& task : out.tasks) {
    std::vector<int> idx(ds.n_labeled);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::uniform_int_distribution<int> other(0, c_count - 2);
    for (int i = 0; i < flips; ++i) {
      const int j = idx[i];
      const int old_cls = task.labels.classes[j];
      int new_cls = other(rng);
      if (new_cls >= old_cls) {
        ++new_cls; // uniform over the c_count - 1 classes different from old_cls
      }
      task.labels.classes[j] = new_cls;
    }
  }
  return out;
}

namespace {

std::string int_row_csv(const std::vector<int>& values) {
  std::string out;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (j > 0) {
      out += ',';
    }
    out += std::to_string(values[j]);
  }
  out += '\n';
  return out;
}

std::vector<std::vector<double>> parse_csv(const std::string& text,
                                           const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::vector<double> row;
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) {
        throw std::invalid_argument(what + ": malformed numeric field");
      }
      row.push_back(v);
      p = end;
      while (*p == ' ') {
        ++p;
      }
      if (*p == ',') {
        ++p;
      } else if (*p == '\0') {
        break;
      } else {
        throw std::invalid_argument(what + ": unexpected character in CSV row");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<int> parse_int_row(const std::string& text, const std::string& what) {
  const auto rows = parse_csv(text, what);
  if (rows.size() != 1) {
    throw std::invalid_argument(what + ": expected a single row, got " +
                                std::to_string(rows.size()));
  }
  std::vector<int> out;
  out.reserve(rows[0].size());
  for (double v : rows[0]) {
    const int i = static_cast<int>(std::llround(v));
    if (static_cast<double>(i) != v) {
      throw std::invalid_argument(what + ": expected integer labels");
    }
    out.push_back(i);
  }
  return out;
}

} // namespace

void save_dataset(const MultiViewDataset& ds, const std::filesystem::path& root) {
  ds.validate();
  namespace fs = std::filesystem;
  fs::create_directories(root);

  json dims = json::array();
  for (const TaskData& task : ds.tasks) {
    json row = json::array();
    for (const Matrix& x : task.views) {
      row.push_back(static_cast<int>(x.rows()));
    }
    dims.push_back(std::move(row));
  }
  json manifest = {
      {"format_version", 1},
      {"name", ds.name},
      {"T", ds.num_tasks()},
      {"V", ds.num_views()},
      {"C", ds.num_classes()},
      {"N", ds.n_total},
      {"N_l", ds.n_labeled},
      {"dims", std::move(dims)},
  };
  detail::write_file_atomic(root / "manifest.json", manifest.dump(2) + "\n");

  for (int t = 0; t < ds.num_tasks(); ++t) {
    const TaskData& task = ds.tasks[t];
    const fs::path task_dir = root / ("task" + std::to_string(t));
    fs::create_directories(task_dir);
    for (int v = 0; v < ds.num_views(); ++v) {
      detail::write_file_atomic(task_dir / ("view" + std::to_string(v) + ".csv"),
                                detail::matrix_csv(task.views[v]));
    }
    detail::write_file_atomic(task_dir / "labels.csv", int_row_csv(task.labels.classes));
    if (!task.clean_labels.empty()) {
      detail::write_file_atomic(task_dir / "truth.csv", int_row_csv(task.clean_labels));
    }
  }
}

MultiViewDataset load_dataset(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  const fs::path manifest_path = root / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw std::invalid_argument("load_dataset: missing manifest " + manifest_path.string());
  }
  json manifest;
  try {
    manifest = json::parse(detail::read_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("load_dataset: malformed manifest: " + std::string(e.what()));
  }

  for (const char* key : {"name", "T", "V", "C", "N", "N_l", "dims"}) {
    if (!manifest.contains(key)) {
      throw std::invalid_argument("load_dataset: manifest missing field '" + std::string(key) + "'");
    }
  }

  MultiViewDataset ds;
  ds.name = manifest["name"].get<std::string>();
  const int t_count = manifest["T"].get<int>();
  const int v_count = manifest["V"].get<int>();
  const int c_count = manifest["C"].get<int>();
  ds.n_total = manifest["N"].get<int>();
  ds.n_labeled = manifest["N_l"].get<int>();

  if (t_count < 1 || v_count < 1 || c_count < 1 || ds.n_total < 1) {
    throw std::invalid_argument("load_dataset: manifest declares an empty dataset");
  }
  if (ds.n_labeled < 1) {
    throw std::invalid_argument("load_dataset: empty labeled set (manifest N_l = " +
                                std::to_string(ds.n_labeled) + ")");
  }
  const auto& dims = manifest["dims"];
  if (!dims.is_array() || static_cast<int>(dims.size()) != t_count) {
    throw std::invalid_argument("load_dataset: dims must be a T x V array");
  }

  ds.tasks.resize(t_count);
  for (int t = 0; t < t_count; ++t) {
    if (!dims[t].is_array() || static_cast<int>(dims[t].size()) != v_count) {
      throw std::invalid_argument("load_dataset: dims row " + std::to_string(t) +
                                  " must list " + std::to_string(v_count) + " view sizes");
    }
    TaskData& task = ds.tasks[t];
    const fs::path task_dir = root / ("task" + std::to_string(t));
    task.views.resize(v_count);
    for (int v = 0; v < v_count; ++v) {
      const int expected_rows = dims[t][v].get<int>();
      const fs::path view_path = task_dir / ("view" + std::to_string(v) + ".csv");
      if (!fs::exists(view_path)) {
        throw std::invalid_argument("load_dataset: missing view file " + view_path.string());
      }
      const std::string what = "load_dataset: task " + std::to_string(t) + " view " +
                               std::to_string(v);
      const auto rows = parse_csv(detail::read_file(view_path), what);
      if (static_cast<int>(rows.size()) != expected_rows) {
        throw std::invalid_argument(what + ": expected " + std::to_string(expected_rows) +
                                    " rows, got " + std::to_string(rows.size()));
      }
      Matrix x(expected_rows, ds.n_total);
      for (int i = 0; i < expected_rows; ++i) {
        if (static_cast<int>(rows[i].size()) != ds.n_total) {
          throw std::invalid_argument(what + ": expected " + std::to_string(ds.n_total) +
                                      " columns, got " + std::to_string(rows[i].size()));
        }
        for (int j = 0; j < ds.n_total; ++j) {
          x(i, j) = rows[i][j];
        }
      }
      task.views[v] = std::move(x);
    }

    const fs::path labels_path = task_dir / "labels.csv";
    if (!fs::exists(labels_path)) {
      throw std::invalid_argument("load_dataset: missing label file " + labels_path.string());
    }
    task.labels.num_classes = c_count;
    task.labels.classes =
        parse_int_row(detail::read_file(labels_path),
                      "load_dataset: task " + std::to_string(t) + " labels");

    const fs::path truth_path = task_dir / "truth.csv";
    if (fs::exists(truth_path)) {
      task.clean_labels =
          parse_int_row(detail::read_file(truth_path),
                        "load_dataset: task " + std::to_string(t) + " truth");
    }
  }

  ds.validate();
  return ds;
}

} // namespace mtmv
