#include "mvboost/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "mvboost/model_io.hpp"

namespace mvboost {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (std::string& line : lines) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }
  return lines;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& token, const std::string& file, std::size_t line_no) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || token.empty()) {
    throw InputError("file '" + file + "' line " + std::to_string(line_no) +
                     ": non-numeric cell '" + token + "'");
  }
  if (!std::isfinite(value)) {
    throw InputError("file '" + file + "' line " + std::to_string(line_no) +
                     ": non-finite cell '" + token + "'");
  }
  return value;
}

std::string resolve(const DatasetManifest& manifest, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute() || manifest.base_dir.empty()) return path;
  return (fs::path(manifest.base_dir) / p).string();
}

std::vector<int> map_binary_labels(const std::vector<std::string>& ids,
                                   const std::string& positive, const std::string& source) {
  bool seen = false;
  std::vector<int> labels(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    labels[i] = ids[i] == positive ? 1 : -1;
    seen = seen || labels[i] == 1;
  }
  if (!ids.empty() && !seen) {
    std::set<std::string> present(ids.begin(), ids.end());
    std::string classes;
    for (const auto& c : present) classes += (classes.empty() ? "" : ", ") + c;
    throw InputError("positive class '" + positive + "' does not occur in " + source +
                     " (classes present: " + classes + ")");
  }
  return labels;
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("manifest '" + path + "' is not valid JSON: " + e.what());
  }
  DatasetManifest m;
  try {
    m.format = j.value("format", std::string("csv"));
    if (m.format != "csv" && m.format != "idx") {
      throw InputError("manifest '" + path + "': unknown format '" + m.format + "'");
    }
    if (!j.contains("views") || !j.at("views").is_array() || j.at("views").empty()) {
      throw InputError("manifest '" + path + "' must list at least one view");
    }
    for (const auto& vj : j.at("views")) {
      ViewSpec spec;
      spec.path = vj.at("path").get<std::string>();
      spec.name = vj.value("name", fs::path(spec.path).stem().string());
      m.views.push_back(std::move(spec));
    }
    m.labels_path = j.value("labels", std::string());
    m.positive_class = j.value("positive_class", std::string());
    m.has_header = j.value("has_header", false);
    m.overlap = j.value("overlap", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest '" + path + "' is malformed: " + e.what());
  }
  if (!m.labels_path.empty() && m.positive_class.empty()) {
    throw ConfigError("manifest '" + path + "' has labels but no positive_class");
  }
  m.base_dir = fs::path(path).parent_path().string();
  return m;
}

Matrix load_csv_matrix(const std::string& path, bool has_header) {
  std::vector<std::string> lines = split_lines(read_text_file(path));
  std::size_t first = has_header ? 1 : 0;
  if (lines.size() < first) throw InputError("file '" + path + "' is missing its header row");

  std::vector<std::vector<double>> rows;
  std::size_t cols = 0;
  for (std::size_t li = first; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string token = trim(comma == std::string::npos ? line.substr(start)
                                                          : line.substr(start, comma - start));
      row.push_back(parse_cell(token, path, li + 1));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rows.empty()) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw InputError("file '" + path + "' line " + std::to_string(li + 1) + ": has " +
                       std::to_string(row.size()) + " cells, expected " + std::to_string(cols));
    }
    rows.push_back(std::move(row));
  }

  Matrix out(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < cols; ++k) out(i, k) = rows[i][k];
  }
  return out;
}

std::vector<std::string> load_label_column(const std::string& path, bool has_header) {
  std::vector<std::string> lines = split_lines(read_text_file(path));
  std::size_t first = has_header ? 1 : 0;
  std::vector<std::string> ids;
  for (std::size_t li = first; li < lines.size(); ++li) {
    std::string token = trim(lines[li]);
    if (token.empty()) {
      throw InputError("file '" + path + "' line " + std::to_string(li + 1) + ": empty label");
    }
    ids.push_back(std::move(token));
  }
  return ids;
}

namespace {

// Shared csv view/label reader: views plus raw class ids (empty when the
// manifest has no labels entry).
std::pair<std::vector<Matrix>, std::vector<std::string>> load_csv_parts(
    const DatasetManifest& manifest, bool require_labels) {
  if (manifest.format != "csv") {
    throw InputError("manifest format is '" + manifest.format + "', expected csv");
  }
  std::vector<Matrix> views;
  std::string first_path;
  for (const ViewSpec& spec : manifest.views) {
    std::string path = resolve(manifest, spec.path);
    Matrix m = load_csv_matrix(path, manifest.has_header);
    if (views.empty()) {
      first_path = path;
    } else if (m.rows() != views[0].rows()) {
      throw InputError("view file '" + path + "' has " + std::to_string(m.rows()) +
                       " rows but '" + first_path + "' has " + std::to_string(views[0].rows()));
    }
    views.push_back(std::move(m));
  }

  std::vector<std::string> ids;
  if (!manifest.labels_path.empty()) {
    std::string path = resolve(manifest, manifest.labels_path);
    ids = load_label_column(path, manifest.has_header);
    std::size_t rows = views[0].rows();
    if (ids.empty() && rows > 0) {
      throw InputError("labels file '" + path + "' is empty but view file '" + first_path +
                       "' has " + std::to_string(rows) + " rows");
    }
    if (ids.size() != rows) {
      throw InputError("labels file '" + path + "' has " + std::to_string(ids.size()) +
                       " rows but view file '" + first_path + "' has " + std::to_string(rows));
    }
  } else if (require_labels) {
    throw ConfigError("manifest has no labels entry, which this operation requires");
  }
  return {std::move(views), std::move(ids)};
}

std::vector<std::string> manifest_view_names(const DatasetManifest& manifest) {
  std::vector<std::string> names;
  for (const ViewSpec& spec : manifest.views) names.push_back(spec.name);
  return names;
}

}  // namespace

MultiviewDataset load_csv_multiview(const DatasetManifest& manifest) {
  auto [views, ids] = load_csv_parts(manifest, false);
  MultiviewDataset ds;
  ds.view_names = manifest_view_names(manifest);
  std::size_t rows = views[0].rows();
  ds.views = std::move(views);
  if (ids.empty() && manifest.labels_path.empty()) {
    ds.labels.assign(rows, 1);  // placeholder labels for prediction input
  } else {
    ds.labels = map_binary_labels(ids, manifest.positive_class,
                                  "labels file '" + manifest.labels_path + "'");
  }
  return ds;
}

MulticlassDataset load_csv_multiclass(const DatasetManifest& manifest) {
  auto [views, ids] = load_csv_parts(manifest, true);
  MulticlassDataset ds;
  ds.view_names = manifest_view_names(manifest);
  ds.views = std::move(views);
  ds.class_ids = std::move(ids);
  ds.validate();
  return ds;
}

MulticlassDataset load_multiclass(const DatasetManifest& manifest) {
  if (manifest.format == "csv") return load_csv_multiclass(manifest);

  if (manifest.views.size() != 1) {
    throw InputError("idx manifests must list exactly one view (the image file), got " +
                     std::to_string(manifest.views.size()));
  }
  if (manifest.labels_path.empty()) {
    throw ConfigError("idx manifests require a labels entry");
  }
  IdxImages images = load_idx_images(resolve(manifest, manifest.views[0].path));
  std::vector<int> raw = load_idx_labels(resolve(manifest, manifest.labels_path));
  if (raw.size() != images.data.rows()) {
    throw InputError("idx labels file has " + std::to_string(raw.size()) + " entries but '" +
                     manifest.views[0].path + "' has " + std::to_string(images.data.rows()) +
                     " images");
  }

  MulticlassDataset ds;
  ds.views = quarter_view_features(images.data, images.height, images.width, manifest.overlap);
  ds.view_names = {"top_left", "top_right", "bottom_left", "bottom_right"};
  ds.class_ids.reserve(raw.size());
  for (int c : raw) ds.class_ids.push_back(std::to_string(c));
  ds.validate();
  return ds;
}

MultiviewDataset load_binary(const DatasetManifest& manifest) {
  if (manifest.format == "csv") return load_csv_multiview(manifest);
  return binarize(load_multiclass(manifest), manifest.positive_class);
}

namespace {

std::uint32_t read_be32(const unsigned char* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
         std::uint32_t(p[3]);
}

struct IdxRaw {
  std::vector<std::size_t> dims;
  std::vector<double> values;
};

IdxRaw load_idx(const std::string& path) {
  std::string bytes = read_text_file(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 4 || p[0] != 0 || p[1] != 0) {
    throw InputError("file '" + path + "' is not idx format (bad magic)");
  }
  unsigned dtype = p[2];
  unsigned ndims = p[3];
  std::size_t elem_size;
  switch (dtype) {
    case 0x08: case 0x09: elem_size = 1; break;
    case 0x0B: elem_size = 2; break;
    case 0x0C: case 0x0D: elem_size = 4; break;
    case 0x0E: elem_size = 8; break;
    default:
      throw InputError("file '" + path + "' has unsupported idx element type " +
                       std::to_string(dtype));
  }
  if (bytes.size() < 4 + 4 * static_cast<std::size_t>(ndims)) {
    throw InputError("file '" + path + "' is truncated (incomplete idx header)");
  }

  IdxRaw raw;
  std::size_t count = 1;
  for (unsigned d = 0; d < ndims; ++d) {
    std::size_t dim = read_be32(p + 4 + 4 * d);
    raw.dims.push_back(dim);
    count *= dim;
  }
  std::size_t offset = 4 + 4 * static_cast<std::size_t>(ndims);
  if (bytes.size() != offset + count * elem_size) {
    throw InputError("file '" + path + "' is truncated: expected " +
                     std::to_string(offset + count * elem_size) + " bytes, got " +
                     std::to_string(bytes.size()));
  }

  raw.values.resize(count);
  const unsigned char* data = p + offset;
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char* e = data + i * elem_size;
    switch (dtype) {
      case 0x08: raw.values[i] = static_cast<double>(*e); break;
      case 0x09: raw.values[i] = static_cast<double>(static_cast<signed char>(*e)); break;
      case 0x0B: {
        std::uint16_t u = static_cast<std::uint16_t>((e[0] << 8) | e[1]);
        raw.values[i] = static_cast<double>(static_cast<std::int16_t>(u));
        break;
      }
      case 0x0C: raw.values[i] = static_cast<double>(static_cast<std::int32_t>(read_be32(e))); break;
      case 0x0D: {
        std::uint32_t u = read_be32(e);
        float f;
        std::memcpy(&f, &u, sizeof f);
        raw.values[i] = static_cast<double>(f);
        break;
      }
      case 0x0E: {
        std::uint64_t u = (static_cast<std::uint64_t>(read_be32(e)) << 32) | read_be32(e + 4);
        double d;
        std::memcpy(&d, &u, sizeof d);
        raw.values[i] = d;
        break;
      }
    }
  }
  return raw;
}

}  // namespace

IdxImages load_idx_images(const std::string& path) {
  IdxRaw raw = load_idx(path);
  if (raw.dims.size() != 3) {
    throw InputError("file '" + path + "' has " + std::to_string(raw.dims.size()) +
                     " idx dimensions, expected 3 (images)");
  }
  IdxImages out;
  out.height = raw.dims[1];
  out.width = raw.dims[2];
  std::size_t pixels = out.height * out.width;
  out.data = Matrix(raw.dims[0], pixels);
  for (std::size_t i = 0; i < raw.dims[0]; ++i) {
    auto row = out.data.row(i);
    std::copy(raw.values.begin() + static_cast<std::ptrdiff_t>(i * pixels),
              raw.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * pixels), row.begin());
  }
  return out;
}

std::vector<int> load_idx_labels(const std::string& path) {
  IdxRaw raw = load_idx(path);
  if (raw.dims.size() != 1) {
    throw InputError("file '" + path + "' has " + std::to_string(raw.dims.size()) +
                     " idx dimensions, expected 1 (labels)");
  }
  std::vector<int> labels(raw.values.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(raw.values[i]);
  return labels;
}

std::vector<Matrix> quarter_view_features(const Matrix& images, std::size_t h, std::size_t w,
                                          double overlap) {
  if (h < 2 || w < 2) throw InputError("quarter views need images at least 2x2");
  if (!(overlap >= 0.0 && overlap < 0.5)) {
    throw InputError("overlap must be in [0, 0.5), got " + format_double(overlap));
  }
  if (overlap == 0.0 && (h % 2 != 0 || w % 2 != 0)) {
    throw InputError("quarter views with overlap 0 need even image dimensions, got " +
                     std::to_string(h) + "x" + std::to_string(w));
  }
  if (images.cols() != h * w) {
    throw InputError("images have " + std::to_string(images.cols()) + " pixels per row, expected " +
                     std::to_string(h) + "x" + std::to_string(w) + " = " + std::to_string(h * w));
  }

  std::size_t er = static_cast<std::size_t>(overlap * static_cast<double>(h));
  std::size_t ec = static_cast<std::size_t>(overlap * static_cast<double>(w));
  // Row/col index ranges of the two halves along each axis; with odd sizes
  // (overlap > 0 only) the middle line belongs to both halves.
  std::size_t top_end = std::min(h, (h + 1) / 2 + er);
  std::size_t bottom_begin = h / 2 - std::min(h / 2, er);
  std::size_t left_end = std::min(w, (w + 1) / 2 + ec);
  std::size_t right_begin = w / 2 - std::min(w / 2, ec);

  struct Window {
    std::size_t r0, r1, c0, c1;
  };
  const Window windows[4] = {{0, top_end, 0, left_end},
                             {0, top_end, right_begin, w},
                             {bottom_begin, h, 0, left_end},
                             {bottom_begin, h, right_begin, w}};

  std::size_t m = images.rows();
  std::vector<Matrix> views;
  views.reserve(4);
  for (const Window& win : windows) {
    Matrix view(m, (win.r1 - win.r0) * (win.c1 - win.c0));
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t k = 0;
      for (std::size_t r = win.r0; r < win.r1; ++r) {
        for (std::size_t c = win.c0; c < win.c1; ++c) {
          view(i, k++) = images(i, r * w + c);
        }
      }
    }
    views.push_back(std::move(view));
  }
  return views;
}

MultiviewDataset quarter_views(const Matrix& images, std::size_t h, std::size_t w, double overlap,
                               std::span<const int> labels) {
  if (labels.size() != images.rows()) {
    throw InputError("quarter_views got " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(images.rows()) + " images");
  }
  MultiviewDataset ds;
  ds.views = quarter_view_features(images, h, w, overlap);
  ds.view_names = {"top_left", "top_right", "bottom_left", "bottom_right"};
  ds.labels.assign(labels.begin(), labels.end());
  ds.validate();
  return ds;
}

MultiviewDataset make_task(const MulticlassDataset& data, const std::string& positive_class,
                           double negative_ratio, std::uint64_t seed) {
  data.validate();
  if (!(negative_ratio > 0.0) || !std::isfinite(negative_ratio)) {
    throw ConfigError("negative ratio must be a positive number");
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < data.class_ids.size(); ++i) {
    (data.class_ids[i] == positive_class ? pos : neg).push_back(i);
  }
  if (pos.empty()) {
    std::set<std::string> present(data.class_ids.begin(), data.class_ids.end());
    std::string classes;
    for (const auto& c : present) classes += (classes.empty() ? "" : ", ") + c;
    throw InputError("positive class '" + positive_class +
                     "' does not occur in the dataset (classes present: " + classes + ")");
  }

  auto target = static_cast<std::size_t>(
      std::llround(negative_ratio * static_cast<double>(pos.size())));
  if (neg.size() > target) {
    Rng rng(seed);
    std::vector<std::size_t> chosen = rng.sample_without_replacement(neg.size(), target);
    std::vector<std::size_t> kept;
    kept.reserve(target);
    for (std::size_t k : chosen) kept.push_back(neg[k]);
    neg = std::move(kept);
  }

  std::vector<std::size_t> rows;
  rows.reserve(pos.size() + neg.size());
  std::merge(pos.begin(), pos.end(), neg.begin(), neg.end(), std::back_inserter(rows));

  MulticlassDataset picked = data.subset(rows);
  MultiviewDataset out;
  out.views = std::move(picked.views);
  out.view_names = std::move(picked.view_names);
  out.labels.reserve(picked.class_ids.size());
  for (const std::string& c : picked.class_ids) out.labels.push_back(c == positive_class ? 1 : -1);
  out.validate();
  return out;
}

MultiviewDataset binarize(const MulticlassDataset& data, const std::string& positive_class) {
  data.validate();
  MultiviewDataset out;
  out.views = data.views;
  out.view_names = data.view_names;
  out.labels = map_binary_labels(data.class_ids, positive_class, "the dataset");
  out.validate();
  return out;
}

MultiviewDataset synth_multiview(std::size_t m, std::size_t num_views, std::size_t dim,
                                 double redundancy, std::size_t noise_views, std::uint64_t seed,
                                 double signal_scale) {
  if (m < 1) throw ConfigError("synthetic dataset needs at least 1 row");
  if (num_views < 2) throw ConfigError("synthetic dataset needs at least 2 views");
  if (dim < 1) throw ConfigError("synthetic dataset needs at least 1 feature per view");
  if (!(redundancy >= 0.0 && redundancy <= 1.0)) {
    throw ConfigError("redundancy must be in [0, 1]");
  }
  if (noise_views >= num_views) {
    throw ConfigError("noise_views must be smaller than the view count (need >= 1 informative view)");
  }
  if (!std::isfinite(signal_scale)) throw ConfigError("signal scale must be finite");

  Rng rng(seed);
  std::vector<int> labels(m);
  std::size_t positives = m - m / 2;
  for (std::size_t i = 0; i < m; ++i) labels[i] = i < positives ? 1 : -1;
  rng.shuffle(labels);

  double sr = std::sqrt(redundancy);
  double su = std::sqrt(1.0 - redundancy);

  std::vector<double> mu_shared(dim);
  for (double& x : mu_shared) x = rng.normal();
  Matrix z_shared(m, dim);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < dim; ++k) z_shared(i, k) = rng.normal();
  }

  MultiviewDataset ds;
  ds.labels = labels;
  std::size_t informative = num_views - noise_views;
  for (std::size_t v = 0; v < num_views; ++v) {
    Matrix x(m, dim);
    if (v < informative) {
      std::vector<double> mu(dim);
      for (std::size_t k = 0; k < dim; ++k) mu[k] = sr * mu_shared[k] + su * rng.normal();
      for (std::size_t i = 0; i < m; ++i) {
        double y = static_cast<double>(labels[i]);
        for (std::size_t k = 0; k < dim; ++k) {
          x(i, k) = y * signal_scale * mu[k] + sr * z_shared(i, k) + su * rng.normal();
        }
      }
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < dim; ++k) x(i, k) = rng.normal();
      }
    }
    ds.views.push_back(std::move(x));
    ds.view_names.push_back("view" + std::to_string(v + 1));
  }
  return ds;
}

void save_dataset_csv(const MultiviewDataset& data, const std::string& dir) {
  fs::create_directories(dir);
  ordered_json manifest;
  manifest["format"] = "csv";
  manifest["labels"] = "labels.csv";
  ordered_json views = ordered_json::array();

  for (std::size_t v = 0; v < data.num_views(); ++v) {
    std::string name =
        v < data.view_names.size() && !data.view_names[v].empty() ? data.view_names[v]
                                                                  : "view" + std::to_string(v + 1);
    std::string file = name + ".csv";
    std::string text;
    const Matrix& mat = data.views[v];
    for (std::size_t i = 0; i < mat.rows(); ++i) {
      for (std::size_t k = 0; k < mat.cols(); ++k) {
        if (k) text += ',';
        text += format_double(mat(i, k));
      }
      text += '\n';
    }
    write_text_file((fs::path(dir) / file).string(), text);
    views.push_back({{"name", name}, {"path", file}});
  }
  manifest["views"] = std::move(views);
  manifest["positive_class"] = "pos";
  manifest["has_header"] = false;

  std::string labels_text;
  for (int y : data.labels) labels_text += (y == 1 ? "pos\n" : "neg\n");
  write_text_file((fs::path(dir) / "labels.csv").string(), labels_text);
  write_text_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

}  // namespace mvboost
