#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mvboost/common.hpp"

namespace mvboost {

// Node of a binary decision tree. feature < 0 marks a leaf (label is then
// +1/-1); otherwise rows with x[feature] <= threshold go left.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int8_t label = 0;

  bool is_leaf() const { return feature < 0; }
};

// CART-style binary classifier with Gini impurity. Training is fully
// deterministic: candidate thresholds are midpoints between consecutive
// distinct sorted feature values, the best split is chosen by strictly
// smaller weighted impurity scanning features (then thresholds) in ascending
// order, so ties resolve to the lowest feature index and lowest threshold.
// Splitting continues while any valid split exists (equal-impurity splits are
// taken, which lets e.g. depth-2 trees solve XOR) and stops at max_depth,
// pure nodes, single-row nodes, or nodes with no two distinct feature values.
// Leaf labels are the majority class, ties -> +1.
class DecisionTree {
 public:
  DecisionTree() = default;
  // Assemble from explicit nodes (deserialization, tests). Node 0 is the root.
  explicit DecisionTree(std::vector<TreeNode> nodes);

  static DecisionTree train(const Matrix& x, std::span<const int> y, int max_depth);

  int predict(std::span<const double> x) const;
  std::vector<int> predict_rows(const Matrix& x) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  // Actual structural depth: 0 for a lone leaf.
  int depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

double training_error(const DecisionTree& tree, const Matrix& x, std::span<const int> y);

}  // namespace mvboost
