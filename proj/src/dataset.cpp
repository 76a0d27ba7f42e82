#include "mvboost/dataset.hpp"

namespace mvboost {

namespace {

void check_views(const std::vector<Matrix>& views, const std::vector<std::string>& names) {
  if (views.size() < 2) {
    throw InputError("dataset must have at least 2 views, got " + std::to_string(views.size()));
  }
  if (!names.empty() && names.size() != views.size()) {
    throw InputError("dataset has " + std::to_string(views.size()) + " views but " +
                     std::to_string(names.size()) + " view names");
  }
  std::size_t rows = views[0].rows();
  if (rows == 0) throw InputError("dataset has no rows");
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (views[v].rows() != rows) {
      throw InputError("view " + std::to_string(v) + " has " + std::to_string(views[v].rows()) +
                       " rows, expected " + std::to_string(rows));
    }
    if (views[v].cols() == 0) throw InputError("view " + std::to_string(v) + " has no features");
    if (!views[v].all_finite()) {
      throw InputError("view " + std::to_string(v) + " contains non-finite feature values");
    }
  }
}

template <class D>
D subset_common(const D& src, std::span<const std::size_t> rows) {
  D out;
  out.view_names = src.view_names;
  out.views.reserve(src.views.size());
  for (const Matrix& m : src.views) {
    Matrix s(rows.size(), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r] >= m.rows()) {
        throw InputError("subset row index " + std::to_string(rows[r]) + " out of range (" +
                         std::to_string(m.rows()) + " rows)");
      }
      auto dst = s.row(r);
      auto from = m.row(rows[r]);
      std::copy(from.begin(), from.end(), dst.begin());
    }
    out.views.push_back(std::move(s));
  }
  return out;
}

}  // namespace

void MultiviewDataset::validate() const {
  check_views(views, view_names);
  if (labels.size() != num_rows()) {
    throw InputError("dataset has " + std::to_string(num_rows()) + " rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1 && labels[i] != -1) {
      throw InputError("label at row " + std::to_string(i) + " is " + std::to_string(labels[i]) +
                       ", expected +1 or -1");
    }
  }
}

MultiviewDataset MultiviewDataset::subset(std::span<const std::size_t> rows) const {
  MultiviewDataset out = subset_common(*this, rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(labels[r]);
  return out;
}

Observation MultiviewDataset::observation(std::size_t i) const {
  Observation obs;
  obs.reserve(views.size());
  for (const Matrix& m : views) {
    auto r = m.row(i);
    obs.emplace_back(r.begin(), r.end());
  }
  return obs;
}

void MulticlassDataset::validate() const {
  check_views(views, view_names);
  if (class_ids.size() != num_rows()) {
    throw InputError("dataset has " + std::to_string(num_rows()) + " rows but " +
                     std::to_string(class_ids.size()) + " class ids");
  }
}

MulticlassDataset MulticlassDataset::subset(std::span<const std::size_t> rows) const {
  MulticlassDataset out = subset_common(*this, rows);
  out.class_ids.reserve(rows.size());
  for (std::size_t r : rows) out.class_ids.push_back(class_ids[r]);
  return out;
}

}  // namespace mvboost
