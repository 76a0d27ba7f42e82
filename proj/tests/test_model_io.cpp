#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvboost/data_io.hpp"
#include "mvboost/model_io.hpp"

using namespace mvboost;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) {
    dir = fs::temp_directory_path() / ("mvboost_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& file) const { return (dir / file).string(); }
};

std::pair<MvModel, TrainTrace> trained_fixture() {
  MultiviewDataset ds = synth_multiview(30, 2, 3, 0.3, 0, 21);
  VoterPool pool = build_pool(ds, std::vector<int>{1, 2});
  TrainConfig cfg;
  cfg.iterations = 3;
  cfg.seed = 21;
  cfg.monotone_policy = MonotonePolicy::kIgnore;
  return fit(ds, pool, cfg);
}

}  // namespace

TEST_CASE("model json round trip is bit exact") {
  auto [model, trace] = trained_fixture();
  std::string text = model_to_json(model);
  MvModel back = model_from_json(text);
  back.validate();

  CHECK(back.weights.pi == model.weights.pi);
  CHECK(back.weights.rho == model.weights.rho);
  CHECK(back.view_names == model.view_names);
  CHECK(back.meta.iterations == model.meta.iterations);
  CHECK(back.meta.epsilon == model.meta.epsilon);
  CHECK(back.meta.rho_solver == model.meta.rho_solver);
  CHECK(back.meta.seed == model.meta.seed);
  CHECK(back.meta.iterations_run == model.meta.iterations_run);

  // Identical predictions, and identical bytes on re-serialization.
  MultiviewDataset probe = synth_multiview(15, 2, 3, 0.3, 0, 22);
  CHECK(predict_rows(back, probe) == predict_rows(model, probe));
  CHECK(model_to_json(back) == text);
}

TEST_CASE("save and load work through files") {
  Scratch s("model_files");
  auto [model, trace] = trained_fixture();
  save_model(model, s.path("model.json"));
  MvModel back = load_model(s.path("model.json"));
  CHECK(back.weights.pi == model.weights.pi);
  CHECK(back.weights.rho == model.weights.rho);

  save_model(back, s.path("model2.json"));
  CHECK(read_text_file(s.path("model.json")) == read_text_file(s.path("model2.json")));

  CHECK_THROWS_AS(load_model(s.path("missing.json")), IoError);
}

TEST_CASE("malformed model files raise io errors") {
  auto [model, trace] = trained_fixture();
  std::string text = model_to_json(model);

  CHECK_THROWS_AS(model_from_json("{broken"), IoError);
  CHECK_THROWS_AS(model_from_json("[1,2,3]"), IoError);

  nlohmann::json j = nlohmann::json::parse(text);
  j["version"] = 9;
  CHECK_THROWS_WITH_AS(model_from_json(j.dump()), doctest::Contains("version"), IoError);

  j = nlohmann::json::parse(text);
  j.erase("rho");
  CHECK_THROWS_AS(model_from_json(j.dump()), IoError);

  j = nlohmann::json::parse(text);
  j["rho"] = {0.9, 0.9};  // not a simplex point
  CHECK_THROWS_AS(model_from_json(j.dump()), IoError);

  j = nlohmann::json::parse(text);
  j["trees"][0][0]["root"] = {{"leaf", 3}};  // invalid leaf label
  CHECK_THROWS_AS(model_from_json(j.dump()), IoError);
}

TEST_CASE("trace serialization is line structured and timing free") {
  auto [model, trace] = trained_fixture();
  std::string text = trace_to_jsonl(trace);

  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  REQUIRE(lines.size() == trace.iterations.size() + 1);

  for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
    nlohmann::json j = nlohmann::json::parse(lines[k]);
    CHECK(j["t"] == trace.iterations[k].t);
    CHECK(j["objective"].get<double>() == trace.iterations[k].objective);
    CHECK(j["bound_a"].get<double>() == trace.iterations[k].bound_a);
    CHECK(j["rho"].get<std::vector<double>>() == trace.iterations[k].rho_after);
    CHECK(j["view_scores"].get<std::vector<double>>() == trace.iterations[k].view_scores);
    CHECK(!j.contains("wall_ms"));
  }
  nlohmann::json tail = nlohmann::json::parse(lines.back());
  CHECK(tail["final_objective"].get<double>() == trace.final_objective);
  CHECK(tail["iterations_run"] == trace.iterations_run);
  CHECK(tail["monotone"] == trace.monotone);
  CHECK(tail.contains("max_increase"));

  // Serializing the same trace twice gives identical bytes.
  CHECK(trace_to_jsonl(trace) == text);
}

TEST_CASE("trace file round trip") {
  Scratch s("trace_files");
  auto [model, trace] = trained_fixture();
  save_trace(trace, s.path("trace.jsonl"));
  CHECK(read_text_file(s.path("trace.jsonl")) == trace_to_jsonl(trace));
}

TEST_CASE("text file helpers") {
  Scratch s("text_files");
  write_text_file(s.path("x.txt"), "hello\n");
  CHECK(read_text_file(s.path("x.txt")) == "hello\n");
  CHECK_THROWS_AS(read_text_file(s.path("y.txt")), IoError);
}
