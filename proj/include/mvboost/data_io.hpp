#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvboost/dataset.hpp"

namespace mvboost {

// Dataset manifest (JSON file):
//   { "format": "csv" | "idx",
//     "views": [{"name": "...", "path": "..."}, ...],
//     "labels": "path",            // optional for prediction-only csv input
//     "positive_class": "...",     // required whenever labels are present
//     "has_header": false,         // csv only
//     "overlap": 0.0 }             // idx only: quarter-view overlap fraction
// Paths are resolved relative to the manifest's directory. For idx format,
// views must hold exactly one entry: the image file, which is cut into the
// four quarter views; labels point at the idx label file.
struct ViewSpec {
  std::string name;
  std::string path;
};

struct DatasetManifest {
  std::string format = "csv";
  std::vector<ViewSpec> views;
  std::string labels_path;  // empty = absent
  std::string positive_class;
  bool has_header = false;
  double overlap = 0.0;
  std::string base_dir;
};

DatasetManifest load_manifest(const std::string& path);

// CSV helpers. Cells are comma-separated, parsed locale-independently;
// non-numeric cells and ragged rows raise InputError naming the file and
// line.
Matrix load_csv_matrix(const std::string& path, bool has_header);
std::vector<std::string> load_label_column(const std::string& path, bool has_header);

// Binary dataset from a csv manifest: labels equal to positive_class map to
// +1, everything else to -1. The positive class must occur at least once.
// A manifest without a labels entry yields placeholder +1 labels (prediction
// input); datasets with zero rows are returned as-is for the predict path
// and rejected by validate() everywhere else.
MultiviewDataset load_csv_multiview(const DatasetManifest& manifest);

// Multiclass form (string class ids); labels entry is required.
MulticlassDataset load_csv_multiclass(const DatasetManifest& manifest);

// Either format -> multiclass: csv directly, idx via quarter views with the
// manifest's overlap. Class ids for idx are the decimal digit strings.
MulticlassDataset load_multiclass(const DatasetManifest& manifest);

// Either format -> binary via positive_class mapping of every row (no
// subsampling).
MultiviewDataset load_binary(const DatasetManifest& manifest);

// IDX (big-endian) readers for the standard image/label file layout.
struct IdxImages {
  Matrix data;  // one row per image, pixels row-major, raw values
  std::size_t height = 0;
  std::size_t width = 0;
};
IdxImages load_idx_images(const std::string& path);
std::vector<int> load_idx_labels(const std::string& path);

// Cuts each h x w image (flattened row-major) into four overlapping quarter
// views: top_left, top_right, bottom_left, bottom_right, in that order. Each
// half extends past the midline by floor(overlap * h) rows and
// floor(overlap * w) cols; overlap must lie in [0, 0.5) and h, w must be
// even when overlap is 0 (so the quarters tile exactly).
std::vector<Matrix> quarter_view_features(const Matrix& images, std::size_t h, std::size_t w,
                                          double overlap);
MultiviewDataset quarter_views(const Matrix& images, std::size_t h, std::size_t w, double overlap,
                               std::span<const int> labels);

// One-vs-all task: rows of the positive class keep label +1; negatives are
// subsampled (seeded, without replacement) down to round(negative_ratio *
// #positives) when they exceed it. Row order is preserved. Already balanced
// data passes through unchanged.
MultiviewDataset make_task(const MulticlassDataset& data, const std::string& positive_class,
                           double negative_ratio, std::uint64_t seed);

// Plain one-vs-all relabeling of every row, no subsampling.
MultiviewDataset binarize(const MulticlassDataset& data, const std::string& positive_class);

// Synthetic benchmark generator. Labels are balanced +-1 and shuffled. The
// first num_views - noise_views views are informative: view v draws a class
// mean mu_v = sqrt(r) * mu_shared + sqrt(1-r) * mu_own and rows
// x_i = y_i * signal_scale * mu_v + sqrt(r) * z_shared_i + sqrt(1-r) * z_own_i,
// so redundancy r in [0,1] interpolates between independent views (0) and
// bit-identical informative views (1). The remaining noise_views views are
// pure N(0,1) noise carrying no label signal.
MultiviewDataset synth_multiview(std::size_t m, std::size_t num_views, std::size_t dim,
                                 double redundancy, std::size_t noise_views, std::uint64_t seed,
                                 double signal_scale = 1.0);

// Writes <name>.csv per view, labels.csv (pos/neg), and manifest.json into
// dir. Floats use shortest round-trip formatting, so write -> load -> write
// is byte-stable.
void save_dataset_csv(const MultiviewDataset& data, const std::string& dir);

}  // namespace mvboost
