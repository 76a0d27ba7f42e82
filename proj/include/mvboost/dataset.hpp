#pragma once

#include <span>
#include <string>
#include <vector>

#include "mvboost/common.hpp"

namespace mvboost {

// One example as seen at prediction time: one feature block per view.
using Observation = std::vector<std::vector<double>>;

// Binary multiview dataset: V feature blocks over the same rows, labels in
// {-1, +1}. Feature dimensions may differ per view; row counts may not.
struct MultiviewDataset {
  std::vector<Matrix> views;
  std::vector<int> labels;
  std::vector<std::string> view_names;

  std::size_t num_views() const { return views.size(); }
  std::size_t num_rows() const { return views.empty() ? 0 : views[0].rows(); }

  // Throws InputError on any structural violation: fewer than 2 views,
  // no rows, per-view row-count mismatches, labels not in {-1,+1} or of the
  // wrong length, or non-finite feature values.
  void validate() const;

  // New dataset holding the given rows, in the given order.
  MultiviewDataset subset(std::span<const std::size_t> rows) const;

  Observation observation(std::size_t i) const;
};

// Multiclass ingestion form: same feature layout, string class ids. Converted
// to a binary MultiviewDataset by make_task/binarize before training.
struct MulticlassDataset {
  std::vector<Matrix> views;
  std::vector<std::string> class_ids;
  std::vector<std::string> view_names;

  std::size_t num_views() const { return views.size(); }
  std::size_t num_rows() const { return views.empty() ? 0 : views[0].rows(); }

  void validate() const;
  MulticlassDataset subset(std::span<const std::size_t> rows) const;
};

}  // namespace mvboost
