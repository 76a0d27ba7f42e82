#include "mvboost/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "mvboost/model.hpp"
#include "mvboost/pool.hpp"

namespace mvboost {

double accuracy_score(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw InputError("got " + std::to_string(predictions.size()) + " predictions for " +
                     std::to_string(labels.size()) + " labels");
  }
  if (predictions.empty()) throw InputError("cannot score an empty prediction set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) hits += predictions[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double f1_score(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw InputError("got " + std::to_string(predictions.size()) + " predictions for " +
                     std::to_string(labels.size()) + " labels");
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == 1 && labels[i] == 1) ++tp;
    if (predictions[i] == 1 && labels[i] != 1) ++fp;
    if (predictions[i] != 1 && labels[i] == 1) ++fn;
  }
  std::size_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

std::string to_string(Method method) {
  switch (method) {
    case Method::kMono: return "mono";
    case Method::kConcat: return "concat";
    case Method::kFusion: return "fusion";
    case Method::kMvUniform: return "mv_uniform";
    case Method::kMwmvc2: return "mwmvc2";
  }
  return "mwmvc2";
}

Method method_from_string(const std::string& name) {
  for (Method m : all_methods()) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method '" + name +
                    "' (expected mono, concat, fusion, mv_uniform, or mwmvc2)");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> kAll = {Method::kMono, Method::kConcat, Method::kFusion,
                                           Method::kMvUniform, Method::kMwmvc2};
  return kAll;
}

namespace {

int max_depth_of(const std::vector<int>& depths) {
  return *std::max_element(depths.begin(), depths.end());
}

std::vector<int> schedule_for(const EvalConfig& cfg, std::size_t train_size) {
  return cfg.depths.empty() ? default_depths(train_size) : cfg.depths;
}

// mono: single view, single tree.
class MonoClassifier : public Classifier {
 public:
  MonoClassifier(std::size_t view, DecisionTree tree) : view_(view), tree_(std::move(tree)) {}
  std::vector<int> predict(const MultiviewDataset& data) const override {
    return tree_.predict_rows(data.views.at(view_));
  }

 private:
  std::size_t view_;
  DecisionTree tree_;
};

Matrix concat_views(const MultiviewDataset& data) {
  std::size_t cols = 0;
  for (const Matrix& v : data.views) cols += v.cols();
  Matrix out(data.num_rows(), cols);
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    std::size_t k = 0;
    for (const Matrix& v : data.views) {
      for (std::size_t c = 0; c < v.cols(); ++c) out(i, k++) = v(i, c);
    }
  }
  return out;
}

class ConcatClassifier : public Classifier {
 public:
  explicit ConcatClassifier(DecisionTree tree) : tree_(std::move(tree)) {}
  std::vector<int> predict(const MultiviewDataset& data) const override {
    return tree_.predict_rows(concat_views(data));
  }

 private:
  DecisionTree tree_;
};

class FusionClassifier : public Classifier {
 public:
  FusionClassifier(std::vector<DecisionTree> view_trees, DecisionTree meta)
      : view_trees_(std::move(view_trees)), meta_(std::move(meta)) {}

  Matrix meta_features(const MultiviewDataset& data) const {
    Matrix out(data.num_rows(), view_trees_.size());
    for (std::size_t v = 0; v < view_trees_.size(); ++v) {
      std::vector<int> p = view_trees_[v].predict_rows(data.views[v]);
      for (std::size_t i = 0; i < p.size(); ++i) out(i, v) = static_cast<double>(p[i]);
    }
    return out;
  }

  std::vector<int> predict(const MultiviewDataset& data) const override {
    return meta_.predict_rows(meta_features(data));
  }

 private:
  std::vector<DecisionTree> view_trees_;
  DecisionTree meta_;
};

class UniformVoteClassifier : public Classifier {
 public:
  explicit UniformVoteClassifier(std::vector<DecisionTree> trees) : trees_(std::move(trees)) {}
  std::vector<int> predict(const MultiviewDataset& data) const override {
    std::vector<int> out(data.num_rows());
    for (std::size_t i = 0; i < data.num_rows(); ++i) {
      int total = 0;
      for (std::size_t v = 0; v < trees_.size(); ++v) {
        total += trees_[v].predict(data.views[v].row(i));
      }
      out[i] = predict_label(static_cast<double>(total));
    }
    return out;
  }

 private:
  std::vector<DecisionTree> trees_;
};

class WeightedVoteClassifier : public Classifier {
 public:
  explicit WeightedVoteClassifier(MvModel model) : model_(std::move(model)) {}
  std::vector<int> predict(const MultiviewDataset& data) const override {
    return predict_rows(model_, data);
  }

 private:
  MvModel model_;
};

std::unique_ptr<Classifier> train_fusion(const MultiviewDataset& train_data, int depth,
                                         std::uint64_t rep_seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < train_data.labels.size(); ++i) {
    (train_data.labels[i] == 1 ? pos : neg).push_back(i);
  }
  if (pos.size() < 2 || neg.size() < 2) {
    throw InputError("fusion needs at least 2 training rows per class, got " +
                     std::to_string(pos.size()) + " positive and " + std::to_string(neg.size()) +
                     " negative");
  }

  // Stratified 60/40 split: per class, shuffle and put the first 60% in the
  // view-tree part, the rest in the meta part.
  Rng rng(rep_seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  auto cut = [](std::size_t n) {
    auto c = static_cast<std::size_t>(std::llround(0.6 * static_cast<double>(n)));
    return std::clamp<std::size_t>(c, 1, n - 1);
  };
  std::vector<std::size_t> part_a, part_b;
  std::size_t cut_pos = cut(pos.size()), cut_neg = cut(neg.size());
  part_a.insert(part_a.end(), pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(cut_pos));
  part_a.insert(part_a.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(cut_neg));
  part_b.insert(part_b.end(), pos.begin() + static_cast<std::ptrdiff_t>(cut_pos), pos.end());
  part_b.insert(part_b.end(), neg.begin() + static_cast<std::ptrdiff_t>(cut_neg), neg.end());
  std::sort(part_a.begin(), part_a.end());
  std::sort(part_b.begin(), part_b.end());

  MultiviewDataset data_a = train_data.subset(part_a);
  MultiviewDataset data_b = train_data.subset(part_b);

  std::vector<DecisionTree> view_trees;
  view_trees.reserve(train_data.num_views());
  for (std::size_t v = 0; v < train_data.num_views(); ++v) {
    view_trees.push_back(DecisionTree::train(data_a.views[v], data_a.labels, depth));
  }

  Matrix meta(data_b.num_rows(), view_trees.size());
  for (std::size_t v = 0; v < view_trees.size(); ++v) {
    std::vector<int> p = view_trees[v].predict_rows(data_b.views[v]);
    for (std::size_t i = 0; i < p.size(); ++i) meta(i, v) = static_cast<double>(p[i]);
  }
  DecisionTree meta_tree = DecisionTree::train(meta, data_b.labels, depth);
  return std::make_unique<FusionClassifier>(std::move(view_trees), std::move(meta_tree));
}

}  // namespace

std::unique_ptr<Classifier> train_method(Method method, const MultiviewDataset& train_data,
                                         const EvalConfig& cfg, std::uint64_t rep_seed) {
  train_data.validate();
  std::vector<int> depths = schedule_for(cfg, train_data.num_rows());
  int depth = max_depth_of(depths);

  switch (method) {
    case Method::kMono: {
      std::size_t best_view = 0;
      double best_acc = -1.0;
      std::unique_ptr<Classifier> best;
      for (std::size_t v = 0; v < train_data.num_views(); ++v) {
        DecisionTree tree = DecisionTree::train(train_data.views[v], train_data.labels, depth);
        double acc = 1.0 - training_error(tree, train_data.views[v], train_data.labels);
        if (acc > best_acc) {
          best_acc = acc;
          best_view = v;
          best = std::make_unique<MonoClassifier>(v, std::move(tree));
        }
      }
      (void)best_view;
      return best;
    }
    case Method::kConcat: {
      Matrix all = concat_views(train_data);
      return std::make_unique<ConcatClassifier>(
          DecisionTree::train(all, train_data.labels, depth));
    }
    case Method::kFusion:
      return train_fusion(train_data, depth, rep_seed);
    case Method::kMvUniform: {
      std::vector<DecisionTree> trees;
      trees.reserve(train_data.num_views());
      for (std::size_t v = 0; v < train_data.num_views(); ++v) {
        trees.push_back(DecisionTree::train(train_data.views[v], train_data.labels, depth));
      }
      return std::make_unique<UniformVoteClassifier>(std::move(trees));
    }
    case Method::kMwmvc2: {
      VoterPool pool = build_pool(train_data, depths, rep_seed);
      TrainConfig tc = cfg.train;
      tc.seed = rep_seed;
      tc.threads = 1;  // outer loop parallelizes over repetitions
      auto [model, trace] = fit(train_data, pool, tc);
      return std::make_unique<WeightedVoteClassifier>(std::move(model));
    }
  }
  throw ConfigError("unhandled method");
}

namespace {

struct RepSplit {
  std::vector<std::size_t> test_rows;
  std::vector<std::size_t> train_pool;  // shuffled; prefixes give nested training sets
};

RepSplit split_for_rep(std::size_t m, const SplitSpec& split, std::size_t rep) {
  Rng rng(split.seed + rep);
  std::vector<std::size_t> perm = rng.permutation(m);
  auto n_test = static_cast<std::size_t>(
      std::llround(split.test_fraction * static_cast<double>(m)));
  RepSplit out;
  out.test_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  out.train_pool.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  return out;
}

void check_sizes(std::size_t m, const SplitSpec& split, std::span<const std::size_t> sizes) {
  if (split.repetitions < 1) throw ConfigError("need at least 1 repetition");
  if (!(split.test_fraction > 0.0 && split.test_fraction < 1.0)) {
    throw ConfigError("test fraction must be in (0, 1)");
  }
  auto n_test = static_cast<std::size_t>(
      std::llround(split.test_fraction * static_cast<double>(m)));
  if (n_test == 0) throw InputError("test split is empty; increase the test fraction or data size");
  std::size_t available = m - n_test;
  for (std::size_t s : sizes) {
    if (s < 1) throw ConfigError("training size must be >= 1");
    if (s > available) {
      throw InputError("training size " + std::to_string(s) + " exceeds the " +
                       std::to_string(available) + " rows available after the test split (m=" +
                       std::to_string(m) + ", test fraction " +
                       format_double(split.test_fraction) + ")");
    }
  }
}

}  // namespace

std::vector<CurveRow> learning_curve(const MultiviewDataset& data,
                                     std::span<const std::size_t> sizes,
                                     std::span<const Method> methods, const EvalConfig& cfg) {
  data.validate();
  if (sizes.empty()) throw ConfigError("need at least one training size");
  if (methods.empty()) throw ConfigError("need at least one method");
  check_sizes(data.num_rows(), cfg.split, sizes);

  std::size_t reps = cfg.split.repetitions;
  // slot layout: [method][size][rep], filled in parallel over reps.
  std::vector<std::vector<std::vector<CurveRow>>> slots(
      methods.size(), std::vector<std::vector<CurveRow>>(sizes.size(),
                                                         std::vector<CurveRow>(reps)));

  parallel_for(reps, cfg.threads, [&](std::size_t rep) {
    RepSplit split = split_for_rep(data.num_rows(), cfg.split, rep);
    MultiviewDataset test_data = data.subset(split.test_rows);
    std::uint64_t rep_seed = cfg.split.seed + rep;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
      std::span<const std::size_t> rows(split.train_pool.data(), sizes[si]);
      MultiviewDataset train_data = data.subset(rows);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        std::unique_ptr<Classifier> clf = train_method(methods[mi], train_data, cfg, rep_seed);
        std::vector<int> pred = clf->predict(test_data);
        CurveRow& row = slots[mi][si][rep];
        row.method = methods[mi];
        row.train_size = sizes[si];
        row.rep = rep;
        row.accuracy = accuracy_score(pred, test_data.labels);
        row.f1 = f1_score(pred, test_data.labels);
      }
    }
  });

  std::vector<CurveRow> rows;
  rows.reserve(methods.size() * sizes.size() * reps);
  for (const auto& per_method : slots) {
    for (const auto& per_size : per_method) {
      for (const CurveRow& row : per_size) rows.push_back(row);
    }
  }
  return rows;
}

MetricReport run_method(Method method, const MultiviewDataset& data, const EvalConfig& cfg) {
  std::size_t sizes[1] = {cfg.split.train_size};
  Method methods[1] = {method};
  std::vector<CurveRow> rows = learning_curve(data, sizes, methods, cfg);
  return summarize(rows, method, cfg.split.train_size);
}

MetricReport summarize(std::span<const CurveRow> rows, Method method, std::size_t train_size) {
  MetricReport report;
  for (const CurveRow& row : rows) {
    if (row.method == method && row.train_size == train_size) {
      report.accuracy.push_back(row.accuracy);
      report.f1.push_back(row.f1);
    }
  }
  report.accuracy_mean = mean_of(report.accuracy);
  report.accuracy_std = stddev_of(report.accuracy);
  report.f1_mean = mean_of(report.f1);
  report.f1_std = stddev_of(report.f1);
  return report;
}

std::string curve_to_csv(std::span<const CurveRow> rows) {
  std::string out = "method,m,rep,accuracy,f1\n";
  for (const CurveRow& row : rows) {
    out += to_string(row.method) + "," + std::to_string(row.train_size) + "," +
           std::to_string(row.rep) + "," + format_double(row.accuracy) + "," +
           format_double(row.f1) + "\n";
  }
  return out;
}

std::string aggregate_to_csv(std::span<const CurveRow> rows) {
  std::string out = "method,m,reps,accuracy_mean,accuracy_std,f1_mean,f1_std\n";
  // preserve first-appearance order of (method, size) groups
  std::vector<std::pair<Method, std::size_t>> groups;
  for (const CurveRow& row : rows) {
    std::pair<Method, std::size_t> key{row.method, row.train_size};
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
  }
  for (const auto& [method, size] : groups) {
    MetricReport r = summarize(rows, method, size);
    out += to_string(method) + "," + std::to_string(size) + "," +
           std::to_string(r.accuracy.size()) + "," + format_double(r.accuracy_mean) + "," +
           format_double(r.accuracy_std) + "," + format_double(r.f1_mean) + "," +
           format_double(r.f1_std) + "\n";
  }
  return out;
}

}  // namespace mvboost
