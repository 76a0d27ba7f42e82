#include "mvboost/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace mvboost {

namespace {

double gini(std::size_t pos, std::size_t neg) {
  std::size_t n = pos + neg;
  if (n == 0) return 0.0;
  double pp = static_cast<double>(pos) / static_cast<double>(n);
  double pn = static_cast<double>(neg) / static_cast<double>(n);
  return 1.0 - pp * pp - pn * pn;
}

struct Builder {
  const Matrix& x;
  std::span<const int> y;
  int max_depth;
  std::vector<TreeNode> nodes;
  // scratch: row indices sorted per candidate feature
  std::vector<std::size_t> sorted;

  std::int32_t make_leaf(std::size_t pos, std::size_t neg) {
    TreeNode leaf;
    leaf.label = pos >= neg ? 1 : -1;
    nodes.push_back(leaf);
    return static_cast<std::int32_t>(nodes.size() - 1);
  }

  std::int32_t build(std::vector<std::size_t>& idx, int depth) {
    std::size_t pos = 0;
    for (std::size_t i : idx) pos += y[i] == 1;
    std::size_t neg = idx.size() - pos;

    if (depth >= max_depth || idx.size() <= 1 || pos == 0 || neg == 0) {
      return make_leaf(pos, neg);
    }

    bool found = false;
    double best_imp = 0.0;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;

    for (std::size_t f = 0; f < x.cols(); ++f) {
      sorted = idx;
      std::sort(sorted.begin(), sorted.end(),
                [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
      std::size_t left_pos = 0;
      for (std::size_t k = 1; k < sorted.size(); ++k) {
        left_pos += y[sorted[k - 1]] == 1;
        double lo = x(sorted[k - 1], f);
        double hi = x(sorted[k], f);
        if (lo == hi) continue;
        std::size_t left_neg = k - left_pos;
        double imp = (static_cast<double>(k) * gini(left_pos, left_neg) +
                      static_cast<double>(idx.size() - k) *
                          gini(pos - left_pos, neg - left_neg)) /
                     static_cast<double>(idx.size());
        if (!found || imp < best_imp) {
          found = true;
          best_imp = imp;
          best_feature = f;
          best_threshold = 0.5 * (lo + hi);
        }
      }
    }

    if (!found) return make_leaf(pos, neg);

    std::vector<std::size_t> left_idx, right_idx;
    for (std::size_t i : idx) {
      (x(i, best_feature) <= best_threshold ? left_idx : right_idx).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    nodes.emplace_back();
    std::int32_t id = static_cast<std::int32_t>(nodes.size() - 1);
    std::int32_t left = build(left_idx, depth + 1);
    std::int32_t right = build(right_idx, depth + 1);
    nodes[id].feature = static_cast<std::int32_t>(best_feature);
    nodes[id].threshold = best_threshold;
    nodes[id].left = left;
    nodes[id].right = right;
    return id;
  }
};

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw InputError("decision tree needs at least one node");
  for (const TreeNode& n : nodes_) {
    if (n.is_leaf()) {
      if (n.label != 1 && n.label != -1) throw InputError("leaf label must be +1 or -1");
    } else {
      auto sz = static_cast<std::int32_t>(nodes_.size());
      if (n.left < 0 || n.left >= sz || n.right < 0 || n.right >= sz) {
        throw InputError("tree node has child index out of range");
      }
    }
  }
}

DecisionTree DecisionTree::train(const Matrix& x, std::span<const int> y, int max_depth) {
  if (x.rows() == 0) throw InputError("cannot train a tree on an empty dataset");
  if (x.rows() != y.size()) {
    throw InputError("feature matrix has " + std::to_string(x.rows()) + " rows but " +
                     std::to_string(y.size()) + " labels");
  }
  if (max_depth < 0) throw InputError("tree depth must be >= 0");
  for (int label : y) {
    if (label != 1 && label != -1) throw InputError("tree labels must be +1 or -1");
  }
  if (!x.all_finite()) throw InputError("feature matrix contains non-finite values");

  Builder b{x, y, max_depth, {}, {}};
  std::vector<std::size_t> idx(x.rows());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::int32_t root = b.build(idx, 0);

  // The recursion allocates children after their parent, so the root is node
  // 0 whenever a split happens; for a lone leaf it is trivially 0 as well.
  (void)root;
  DecisionTree t;
  t.nodes_ = std::move(b.nodes);
  return t;
}

int DecisionTree::predict(std::span<const double> x) const {
  std::int32_t id = 0;
  while (!nodes_[id].is_leaf()) {
    const TreeNode& n = nodes_[id];
    if (static_cast<std::size_t>(n.feature) >= x.size()) {
      throw InputError("observation has " + std::to_string(x.size()) +
                       " features but the tree tests feature " + std::to_string(n.feature));
    }
    id = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes_[id].label;
}

std::vector<int> DecisionTree::predict_rows(const Matrix& x) const {
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict(x.row(i));
  return out;
}

int DecisionTree::depth() const {
  std::function<int(std::int32_t)> walk = [&](std::int32_t id) -> int {
    const TreeNode& n = nodes_[id];
    if (n.is_leaf()) return 0;
    return 1 + std::max(walk(n.left), walk(n.right));
  };
  return walk(0);
}

double training_error(const DecisionTree& tree, const Matrix& x, std::span<const int> y) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) wrong += tree.predict(x.row(i)) != y[i];
  return static_cast<double>(wrong) / static_cast<double>(x.rows());
}

}  // namespace mvboost
