#include "mvboost/model.hpp"

#include <cmath>

#include "mvboost/bregman.hpp"

namespace mvboost {

void VoteWeights::validate() const {
  if (pi.empty()) throw InputError("vote weights have no views");
  if (rho.size() != pi.size()) {
    throw InputError("vote weights have " + std::to_string(pi.size()) + " pi blocks but " +
                     std::to_string(rho.size()) + " rho entries");
  }
  double sum = 0.0;
  for (double r : rho) {
    if (!std::isfinite(r) || r < 0.0) throw InputError("rho entries must be finite and >= 0");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InputError("rho must sum to 1, got " + format_double(sum));
  }
  for (const auto& block : pi) {
    if (block.empty()) throw InputError("a view has an empty pi block");
    for (double w : block) {
      if (!std::isfinite(w)) throw InputError("pi entries must be finite");
    }
  }
}

void MvModel::validate() const {
  pool.validate();
  weights.validate();
  if (pool.num_views() != weights.num_views()) {
    throw InputError("pool has " + std::to_string(pool.num_views()) + " views but weights have " +
                     std::to_string(weights.num_views()));
  }
  for (std::size_t v = 0; v < pool.num_views(); ++v) {
    if (pool.views[v].trees.size() != weights.pi[v].size()) {
      throw InputError("view " + std::to_string(v) + " has " +
                       std::to_string(pool.views[v].trees.size()) + " voters but " +
                       std::to_string(weights.pi[v].size()) + " pi weights");
    }
  }
  if (!view_names.empty() && view_names.size() != pool.num_views()) {
    throw InputError("model has " + std::to_string(view_names.size()) + " view names for " +
                     std::to_string(pool.num_views()) + " views");
  }
}

double vote_score(const MvModel& model, const Observation& x) {
  if (x.size() != model.pool.num_views()) {
    throw InputError("observation has " + std::to_string(x.size()) + " views, model expects " +
                     std::to_string(model.pool.num_views()));
  }
  double total = 0.0;
  for (std::size_t v = 0; v < model.pool.num_views(); ++v) {
    const auto& trees = model.pool.views[v].trees;
    const auto& pi = model.weights.pi[v];
    double view_sum = 0.0;
    for (std::size_t j = 0; j < trees.size(); ++j) {
      view_sum += pi[j] * static_cast<double>(trees[j].predict(x[v]));
    }
    total += model.weights.rho[v] * view_sum;
  }
  return total;
}

std::vector<double> score_rows(const MvModel& model, const MultiviewDataset& data) {
  if (data.num_views() != model.pool.num_views()) {
    throw InputError("dataset has " + std::to_string(data.num_views()) + " views, model expects " +
                     std::to_string(model.pool.num_views()));
  }
  std::size_t m = data.num_rows();
  std::vector<double> scores(m, 0.0);
  for (std::size_t v = 0; v < model.pool.num_views(); ++v) {
    const auto& trees = model.pool.views[v].trees;
    const auto& pi = model.weights.pi[v];
    double rho = model.weights.rho[v];
    std::vector<double> view_sum(m, 0.0);
    for (std::size_t j = 0; j < trees.size(); ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        view_sum[i] += pi[j] * static_cast<double>(trees[j].predict(data.views[v].row(i)));
      }
    }
    for (std::size_t i = 0; i < m; ++i) scores[i] += rho * view_sum[i];
  }
  return scores;
}

std::vector<int> predict_rows(const MvModel& model, const MultiviewDataset& data) {
  std::vector<double> scores = score_rows(model, data);
  std::vector<int> labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = predict_label(scores[i]);
  return labels;
}

double zero_one_risk(const MvModel& model, const MultiviewDataset& data) {
  data.validate();
  std::vector<double> scores = score_rows(model, data);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    errors += data.labels[i] * scores[i] <= 0.0;
  }
  return static_cast<double>(errors) / static_cast<double>(scores.size());
}

double logistic_risk(const MvModel& model, const MultiviewDataset& data) {
  data.validate();
  std::vector<double> scores = score_rows(model, data);
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    total += log1p_exp(-data.labels[i] * scores[i]);
  }
  return total / (static_cast<double>(scores.size()) * std::numbers::ln2);
}

}  // namespace mvboost
