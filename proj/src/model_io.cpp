#include "mvboost/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mvboost {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json node_to_json(const std::vector<TreeNode>& nodes, std::int32_t id) {
  const TreeNode& n = nodes[id];
  ordered_json j;
  if (n.is_leaf()) {
    j["leaf"] = static_cast<int>(n.label);
    return j;
  }
  j["feature"] = n.feature;
  j["threshold"] = n.threshold;
  j["left"] = node_to_json(nodes, n.left);
  j["right"] = node_to_json(nodes, n.right);
  return j;
}

std::int32_t node_from_json(const ordered_json& j, std::vector<TreeNode>& nodes) {
  TreeNode n;
  if (j.contains("leaf")) {
    int label = j.at("leaf").get<int>();
    if (label != 1 && label != -1) throw IoError("tree leaf label must be +1 or -1");
    n.label = static_cast<std::int8_t>(label);
    nodes.push_back(n);
    return static_cast<std::int32_t>(nodes.size() - 1);
  }
  n.feature = j.at("feature").get<std::int32_t>();
  if (n.feature < 0) throw IoError("tree node feature index must be >= 0");
  n.threshold = j.at("threshold").get<double>();
  nodes.emplace_back();
  std::int32_t id = static_cast<std::int32_t>(nodes.size() - 1);
  std::int32_t left = node_from_json(j.at("left"), nodes);
  std::int32_t right = node_from_json(j.at("right"), nodes);
  nodes[id] = n;
  nodes[id].left = left;
  nodes[id].right = right;
  return id;
}

ordered_json tree_to_json(const DecisionTree& tree, int depth) {
  ordered_json j;
  j["max_depth"] = depth;
  j["root"] = node_to_json(tree.nodes(), 0);
  return j;
}

DecisionTree tree_from_json(const ordered_json& j) {
  std::vector<TreeNode> nodes;
  node_from_json(j.at("root"), nodes);
  return DecisionTree(std::move(nodes));
}

}  // namespace

std::string model_to_json(const MvModel& model) {
  model.validate();
  ordered_json j;
  j["version"] = 1;
  j["V"] = model.pool.num_views();
  j["view_names"] = model.view_names;
  ordered_json trees = ordered_json::array();
  ordered_json depths = ordered_json::array();
  for (const auto& view : model.pool.views) {
    ordered_json vt = ordered_json::array();
    for (std::size_t t = 0; t < view.trees.size(); ++t) {
      vt.push_back(tree_to_json(view.trees[t], view.depths[t]));
    }
    trees.push_back(std::move(vt));
    depths.push_back(view.depths);
  }
  j["trees"] = std::move(trees);
  j["depths"] = std::move(depths);
  j["pi"] = model.weights.pi;
  j["rho"] = model.weights.rho;
  j["metadata"] = {{"iterations", model.meta.iterations},
                   {"epsilon", model.meta.epsilon},
                   {"rho_solver", model.meta.rho_solver},
                   {"lambda", model.meta.lambda},
                   {"seed", model.meta.seed},
                   {"iterations_run", model.meta.iterations_run}};
  return j.dump(2) + "\n";
}

MvModel model_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    int version = j.at("version").get<int>();
    if (version != 1) {
      throw IoError("unsupported model version " + std::to_string(version) + " (expected 1)");
    }
    MvModel model;
    model.view_names = j.at("view_names").get<std::vector<std::string>>();
    const auto& trees = j.at("trees");
    const auto& depths = j.at("depths");
    if (!trees.is_array() || !depths.is_array() || trees.size() != depths.size()) {
      throw IoError("model trees/depths blocks are malformed");
    }
    model.pool.views.resize(trees.size());
    for (std::size_t v = 0; v < trees.size(); ++v) {
      auto& view = model.pool.views[v];
      view.depths = depths[v].get<std::vector<int>>();
      for (const auto& tj : trees[v]) view.trees.push_back(tree_from_json(tj));
    }
    model.weights.pi = j.at("pi").get<std::vector<std::vector<double>>>();
    model.weights.rho = j.at("rho").get<std::vector<double>>();
    const auto& meta = j.at("metadata");
    model.meta.iterations = meta.at("iterations").get<int>();
    model.meta.epsilon = meta.at("epsilon").get<double>();
    model.meta.rho_solver = meta.at("rho_solver").get<std::string>();
    model.meta.lambda = meta.at("lambda").get<double>();
    model.meta.seed = meta.at("seed").get<std::uint64_t>();
    model.meta.iterations_run = meta.at("iterations_run").get<int>();
    std::size_t declared = j.at("V").get<std::size_t>();
    if (declared != model.pool.num_views()) {
      throw IoError("model declares " + std::to_string(declared) + " views but has " +
                    std::to_string(model.pool.num_views()));
    }
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("model file is missing or mistypes a field: ") + e.what());
  } catch (const InputError& e) {
    throw IoError(std::string("model file fails validation: ") + e.what());
  }
}

void save_model(const MvModel& model, const std::string& path) {
  write_text_file(path, model_to_json(model));
}

MvModel load_model(const std::string& path) { return model_from_json(read_text_file(path)); }

std::string trace_to_jsonl(const TrainTrace& trace) {
  std::string out;
  for (const IterationRecord& rec : trace.iterations) {
    ordered_json j;
    j["t"] = rec.t;
    j["objective"] = rec.objective;
    j["rho"] = rec.rho_after;
    j["view_scores"] = rec.view_scores;
    j["bound_a"] = rec.bound_a;
    out += j.dump() + "\n";
  }
  ordered_json tail;
  tail["final_objective"] = trace.final_objective;
  tail["iterations_run"] = trace.iterations_run;
  tail["max_increase"] = trace.max_increase;
  tail["monotone"] = trace.monotone;
  out += tail.dump() + "\n";
  return out;
}

void save_trace(const TrainTrace& trace, const std::string& path) {
  write_text_file(path, trace_to_jsonl(trace));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed while reading '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace mvboost
