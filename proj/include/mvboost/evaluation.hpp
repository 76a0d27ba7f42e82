#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mvboost/dataset.hpp"
#include "mvboost/trainer.hpp"

namespace mvboost {

double accuracy_score(std::span<const int> predictions, std::span<const int> labels);

// Binary F1 with +1 as the positive class: 2tp / (2tp + fp + fn).
// Degenerate cases (no positive labels and no positive predictions) -> 0.
double f1_score(std::span<const int> predictions, std::span<const int> labels);

enum class Method { kMono, kConcat, kFusion, kMvUniform, kMwmvc2 };

std::string to_string(Method method);
Method method_from_string(const std::string& name);
const std::vector<Method>& all_methods();

// A trained classifier for one repetition of one method.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::vector<int> predict(const MultiviewDataset& data) const = 0;
};

struct SplitSpec {
  std::size_t train_size = 100;
  double test_fraction = 0.3;
  std::size_t repetitions = 20;
  std::uint64_t seed = 0;
};

struct EvalConfig {
  SplitSpec split;
  TrainConfig train;       // used by the weighted-vote method
  std::vector<int> depths; // empty: default_depths(train_size)
  std::size_t threads = 1; // parallelism across repetitions
};

struct MetricReport {
  std::vector<double> accuracy;  // one entry per repetition
  std::vector<double> f1;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  double f1_mean = 0.0;
  double f1_std = 0.0;
};

// Repetition r shuffles the rows with seed split.seed + r, holds out
// round(test_fraction * m) rows for testing, trains on the first train_size
// of the rest, and scores on the held-out rows. All methods see identical
// splits, so comparisons are paired. Baselines:
//   mono       - one tree per view at the max schedule depth; keeps the view
//                with the best training accuracy (ties -> lowest view index)
//   concat     - one tree on the concatenated features
//   fusion     - stratified 60/40 split of the training rows; per-view trees
//                on the first part, a meta tree on their predictions on the
//                second
//   mv_uniform - per-view trees combined by an unweighted majority vote
//   mwmvc2     - the trained double-weighted vote over the full pool
MetricReport run_method(Method method, const MultiviewDataset& data, const EvalConfig& cfg);

std::unique_ptr<Classifier> train_method(Method method, const MultiviewDataset& train_data,
                                         const EvalConfig& cfg, std::uint64_t rep_seed);

struct CurveRow {
  Method method;
  std::size_t train_size = 0;
  std::size_t rep = 0;
  double accuracy = 0.0;
  double f1 = 0.0;
};

// Rows ordered by (method, size, rep); repetition r of every size shares its
// split (training sets are nested prefixes), which keeps curves comparable
// across sizes. Any size exceeding the available training rows raises
// InputError naming the size and the limit.
std::vector<CurveRow> learning_curve(const MultiviewDataset& data,
                                     std::span<const std::size_t> sizes,
                                     std::span<const Method> methods, const EvalConfig& cfg);

// curve csv: "method,m,rep,accuracy,f1", one row per (method, size, rep).
std::string curve_to_csv(std::span<const CurveRow> rows);
// aggregate csv: "method,m,reps,accuracy_mean,accuracy_std,f1_mean,f1_std".
std::string aggregate_to_csv(std::span<const CurveRow> rows);

MetricReport summarize(std::span<const CurveRow> rows, Method method, std::size_t train_size);

}  // namespace mvboost
