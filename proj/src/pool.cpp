#include "mvboost/pool.hpp"

#include <bit>

namespace mvboost {

std::vector<std::size_t> VoterPool::sizes() const {
  std::vector<std::size_t> n(views.size());
  for (std::size_t v = 0; v < views.size(); ++v) n[v] = views[v].trees.size();
  return n;
}

void VoterPool::validate() const {
  if (views.empty()) throw InputError("voter pool has no views");
  for (std::size_t v = 0; v < views.size(); ++v) {
    const ViewPool& p = views[v];
    if (p.trees.empty()) throw InputError("view " + std::to_string(v) + " has an empty pool");
    if (p.trees.size() != p.depths.size()) {
      throw InputError("view " + std::to_string(v) + " has " + std::to_string(p.trees.size()) +
                       " trees but " + std::to_string(p.depths.size()) + " depth entries");
    }
  }
}

std::vector<int> default_depths(std::size_t m) {
  if (m == 0) throw InputError("depth schedule needs at least one training row");
  int ceil_log2 = m <= 1 ? 0 : static_cast<int>(std::bit_width(m - 1));
  int top = std::max(1, ceil_log2 + 1 - 2);
  std::vector<int> depths(top);
  for (int d = 0; d < top; ++d) depths[d] = d + 1;
  return depths;
}

VoterPool build_pool(const MultiviewDataset& data, std::span<const int> depths,
                     std::uint64_t seed, std::size_t threads) {
  (void)seed;
  data.validate();
  if (depths.empty()) throw InputError("depth schedule is empty");
  for (int d : depths) {
    if (d < 1) throw InputError("depth schedule entries must be >= 1, got " + std::to_string(d));
  }

  VoterPool pool;
  pool.views.resize(data.num_views());
  parallel_for(data.num_views(), threads, [&](std::size_t v) {
    VoterPool::ViewPool& p = pool.views[v];
    p.depths.assign(depths.begin(), depths.end());
    p.trees.reserve(depths.size());
    for (int d : depths) p.trees.push_back(DecisionTree::train(data.views[v], data.labels, d));
  });
  return pool;
}

std::vector<std::size_t> MarginMatrix::sizes() const {
  std::vector<std::size_t> n(views.size());
  for (std::size_t v = 0; v < views.size(); ++v) n[v] = views[v].columns.size();
  return n;
}

void MarginMatrix::validate() const {
  if (views.empty()) throw InputError("margin matrix has no views");
  std::size_t rows = views[0].rows;
  if (rows == 0) throw InputError("margin matrix has no rows");
  for (std::size_t v = 0; v < views.size(); ++v) {
    const ViewBlock& b = views[v];
    if (b.rows != rows) {
      throw InputError("margin matrix view " + std::to_string(v) + " has " +
                       std::to_string(b.rows) + " rows, expected " + std::to_string(rows));
    }
    if (b.columns.empty()) {
      throw InputError("margin matrix view " + std::to_string(v) + " has no voters");
    }
    for (const auto& col : b.columns) {
      if (col.size() != rows) {
        throw InputError("margin matrix view " + std::to_string(v) +
                         " has a column of length " + std::to_string(col.size()) +
                         ", expected " + std::to_string(rows));
      }
      for (std::int8_t e : col) {
        if (e != 1 && e != -1) throw InputError("margin matrix entries must be +1 or -1");
      }
    }
  }
}

MarginMatrix margin_matrix(const VoterPool& pool, const MultiviewDataset& data,
                           std::size_t threads) {
  pool.validate();
  data.validate();
  if (pool.num_views() != data.num_views()) {
    throw InputError("pool has " + std::to_string(pool.num_views()) + " views but dataset has " +
                     std::to_string(data.num_views()));
  }

  std::size_t m = data.num_rows();
  MarginMatrix M;
  M.views.resize(pool.num_views());
  parallel_for(pool.num_views(), threads, [&](std::size_t v) {
    const auto& trees = pool.views[v].trees;
    MarginMatrix::ViewBlock& block = M.views[v];
    block.rows = m;
    block.columns.resize(trees.size());
    for (std::size_t j = 0; j < trees.size(); ++j) {
      auto& col = block.columns[j];
      col.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        int h = trees[j].predict(data.views[v].row(i));
        col[i] = static_cast<std::int8_t>(data.labels[i] * h);
      }
    }
  });
  return M;
}

}  // namespace mvboost
