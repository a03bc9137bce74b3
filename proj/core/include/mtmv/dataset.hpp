#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mtmv/types.hpp"

namespace mtmv {

// Labels for the labeled prefix of a task. Instances are stored with the
// labeled columns first, so entry j labels column j of every view.
struct LabelSet {
  std::vector<int> classes; // one entry per labeled instance, each in [0, num_classes)
  int num_classes = 0;

  // One-hot encoding, num_classes x n_labeled, exactly one 1 per column.
  Matrix one_hot() const;
};

// One task: V views over the same instances plus its labels. Each view is a
// features x instances matrix with nonnegative entries; all views of a task
// have the same column count and the same column order.
struct TaskData {
  std::vector<Matrix> views;
  LabelSet labels;
  // Ground-truth class of every instance (labeled and unlabeled alike), when
  // known — synthetic generators always fill this in. Empty for datasets whose
  // unlabeled ground truth is unavailable. Unlike `labels`, this never has
  // noise injected into it.
  std::vector<int> clean_labels;
};

struct MultiViewDataset {
  std::string name;
  std::vector<TaskData> tasks;
  int n_total = 0;   // instances per task
  int n_labeled = 0; // labeled prefix length, 1 <= n_labeled <= n_total

  int n_unlabeled() const { return n_total - n_labeled; }
  int num_tasks() const { return static_cast<int>(tasks.size()); }
  int num_views() const;
  int num_classes() const;

  // Throws std::invalid_argument when any structural invariant is broken
  // (ragged views, label out of range, negative or non-finite entries, ...).
  void validate() const;
};

// Recipe for a synthetic multi-task dataset. Each instance is a
// patch_side x patch_side grid of i.i.d. normal draws with per-class mean and
// standard deviation; five fixed 3x3 filters of that grid become the views.
struct SynthSpec {
  std::string name = "synth";
  int n_tasks = 3;
  int classes_per_task = 3;
  int instances_per_class = 200;
  std::vector<std::pair<double, double>> mean_std; // (mean, stddev) per class
  int patch_side = 10;
  double labeled_fraction = 0.5; // fraction of instances whose labels are revealed
  std::uint64_t seed = 0;
};

// Three tasks, three classes with (mean, std) = (1,1), (2,2), (3,3).
SynthSpec synth1_spec(std::uint64_t seed);
// Four tasks, four classes, adding (4,4).
SynthSpec synth2_spec(std::uint64_t seed);

// Scales each column with a positive sum to sum exactly 1; all-zero columns
// are left untouched and counted in the return value. Idempotent. Throws on
// negative or non-finite entries.
int normalize_columns_in_place(Matrix& m);
Matrix normalize_columns(const Matrix& m, int* zero_columns = nullptr);

// Deterministic per seed: identical specs produce bit-identical datasets.
MultiViewDataset generate_synth(const SynthSpec& spec);

// Flips the labels of exactly round(fraction * n_labeled) labeled instances
// per task to a uniformly chosen different class. clean_labels are preserved.
// Requires at least two classes and fraction in [0, 0.5].
MultiViewDataset inject_label_noise(const MultiViewDataset& ds, double fraction,
                                    std::uint64_t seed);

// On-disk layout: root/manifest.json plus task<t>/view<v>.csv,
// task<t>/labels.csv and (when clean_labels are known) task<t>/truth.csv.
// Values are written with enough digits that a save/load round trip is exact.
void save_dataset(const MultiViewDataset& ds, const std::filesystem::path& root);
MultiViewDataset load_dataset(const std::filesystem::path& root);

} // namespace mtmv
