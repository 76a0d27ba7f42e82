#pragma once

#include <string>

#include "mvboost/model.hpp"
#include "mvboost/trainer.hpp"

namespace mvboost {

// Model files are JSON with a fixed key order and shortest-round-trip float
// formatting, so save -> load -> save reproduces the bytes and weights reload
// bit-exactly. Layout:
//   { "version": 1, "V": ..., "view_names": [...],
//     "trees": [[{tree}, ...] per view], "depths": [[...] per view],
//     "pi": [[...]], "rho": [...], "metadata": {...} }
// where a tree is {"max_depth": d, "root": node} and a node is either
// {"leaf": 1|-1} or {"feature": f, "threshold": x, "left": node,
// "right": node}.
std::string model_to_json(const MvModel& model);
MvModel model_from_json(const std::string& text);

void save_model(const MvModel& model, const std::string& path);
MvModel load_model(const std::string& path);

// Training trace as JSON lines: one object per iteration
// {"t", "objective", "rho", "view_scores", "bound_a"} and a closing line
// {"final_objective", "iterations_run", "max_increase", "monotone"}.
// Wall-clock timings are deliberately not serialized so reruns are
// byte-identical.
std::string trace_to_jsonl(const TrainTrace& trace);
void save_trace(const TrainTrace& trace, const std::string& path);

// Shared low-level file helpers (also used by data/evaluation output).
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace mvboost
