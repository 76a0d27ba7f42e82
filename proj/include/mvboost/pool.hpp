#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mvboost/dataset.hpp"
#include "mvboost/tree.hpp"

namespace mvboost {

// Weak-learner pool: per view, one tree per entry of the depth schedule,
// each trained on that view's features alone (against the shared labels).
struct VoterPool {
  struct ViewPool {
    std::vector<DecisionTree> trees;
    std::vector<int> depths;  // depth each tree was trained at
  };
  std::vector<ViewPool> views;

  std::size_t num_views() const { return views.size(); }
  std::vector<std::size_t> sizes() const;
  void validate() const;
};

// Depth schedule 1..max(1, ceil(log2(m)) + 1 - 2): e.g. m=100 -> [1..6],
// m=2 -> [1].
std::vector<int> default_depths(std::size_t m);

// Trains one tree per (view, depth). Tree training is deterministic, so the
// seed is recorded-only for now; it keeps the signature stable for stochastic
// learners. Views are independent and may be trained in parallel.
VoterPool build_pool(const MultiviewDataset& data, std::span<const int> depths,
                     std::uint64_t seed = 0, std::size_t threads = 1);

// Label-signed voter outputs: views[v].columns[j][i] = y_i * h_{v,j}(x_i^v),
// entries in {-1, +1}, stored column-major per view.
struct MarginMatrix {
  struct ViewBlock {
    std::size_t rows = 0;
    std::vector<std::vector<std::int8_t>> columns;
  };
  std::vector<ViewBlock> views;

  std::size_t num_views() const { return views.size(); }
  std::size_t num_rows() const { return views.empty() ? 0 : views[0].rows; }
  std::vector<std::size_t> sizes() const;
  void validate() const;
};

MarginMatrix margin_matrix(const VoterPool& pool, const MultiviewDataset& data,
                           std::size_t threads = 1);

}  // namespace mvboost
