#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "mvboost/model_io.hpp"

using namespace mvboost;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) {
    dir = fs::temp_directory_path() / ("mvboost_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& tail) const { return (dir / tail).string(); }
};

int run_cli(const Scratch& s, const std::string& args, std::string* output = nullptr) {
  std::string log = s.path("cli_output.txt");
  std::string cmd = std::string(MVBOOST_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  int status = std::system(cmd.c_str());
  if (output) *output = read_text_file(log);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

// Two-view csv dataset that a depth-1 stump classifies perfectly.
void write_separable_dataset(const Scratch& s, const std::string& subdir) {
  fs::create_directories(s.dir / subdir);
  auto p = [&](const std::string& f) { return s.path(subdir + "/" + f); };
  write_text_file(p("v1.csv"), "0\n1\n2\n3\n4\n5\n6\n7\n");
  write_text_file(p("v2.csv"), "7\n6\n5\n4\n3\n2\n1\n0\n");
  write_text_file(p("labels.csv"), "neg\nneg\nneg\nneg\npos\npos\npos\npos\n");
  write_text_file(p("manifest.json"), R"({
    "format": "csv",
    "views": [{"name": "up", "path": "v1.csv"}, {"name": "down", "path": "v2.csv"}],
    "labels": "labels.csv",
    "positive_class": "pos"
  })");
}

}  // namespace

TEST_CASE("training on the bundled tiny dataset smokes end to end") {
  Scratch s("bundled");
  std::string out;
  CHECK(run_cli(s,
                "train --data " MVBOOST_DATA_DIR "/tiny/manifest.json --out " + s.path("run") +
                    " --seed 3",
                &out) == 0);
  CHECK(fs::exists(s.path("run/model.json")));

  // The recorded objective sequence never rises on this small, clean set.
  std::string trace = read_text_file(s.path("run/trace.jsonl"));
  CHECK(trace.find("\"monotone\":true") != std::string::npos);
}

TEST_CASE("synth, train, predict pipeline produces the documented artifacts") {
  Scratch s("pipeline");
  CHECK(run_cli(s, "synth --out " + s.path("data") + " --seed 5 --m 60 --views 3 --dim 4") == 0);
  CHECK(fs::exists(s.path("data/manifest.json")));
  CHECK(fs::exists(s.path("data/labels.csv")));
  CHECK(fs::exists(s.path("data/config.json")));

  std::string out;
  CHECK(run_cli(s,
                "train --data " + s.path("data/manifest.json") + " --out " + s.path("run") +
                    " --seed 5 -T 3",
                &out) == 0);
  CHECK(out.find("final objective") != std::string::npos);
  CHECK(fs::exists(s.path("run/model.json")));
  CHECK(fs::exists(s.path("run/trace.jsonl")));
  CHECK(fs::exists(s.path("run/config.json")));

  // The model file reloads and the echoed config names the command.
  MvModel model = load_model(s.path("run/model.json"));
  model.validate();
  nlohmann::json echo = nlohmann::json::parse(read_text_file(s.path("run/config.json")));
  CHECK(echo["command"] == "train");
  CHECK(echo["train"]["iterations"] == 3);
  CHECK(!echo["train"].contains("threads"));

  CHECK(run_cli(s, "predict --model " + s.path("run/model.json") + " --data " +
                       s.path("data/manifest.json") + " --out " + s.path("pred")) == 0);
  std::string preds = read_text_file(s.path("pred/predictions.csv"));
  CHECK(preds.rfind("row,score,prediction\n", 0) == 0);
  CHECK(std::count(preds.begin(), preds.end(), '\n') == 61);
}

TEST_CASE("training artifacts are byte identical across reruns and thread counts") {
  Scratch s("determinism");
  write_separable_dataset(s, "data");
  std::string base = "train --data " + s.path("data/manifest.json") + " --seed 9 -T 2 --out ";
  CHECK(run_cli(s, base + s.path("a") + " --threads 1") == 0);
  CHECK(run_cli(s, base + s.path("b") + " --threads 4") == 0);
  CHECK(run_cli(s, base + s.path("c") + " --threads 1") == 0);

  for (const char* f : {"model.json", "trace.jsonl", "config.json"}) {
    std::string fa = read_text_file(s.path(std::string("a/") + f));
    CHECK(fa == read_text_file(s.path(std::string("b/") + f)));
    CHECK(fa == read_text_file(s.path(std::string("c/") + f)));
  }
}

TEST_CASE("evaluate writes raw and aggregated tables") {
  Scratch s("evaluate");
  CHECK(run_cli(s, "synth --out " + s.path("data") + " --seed 3 --m 60 --views 3 --dim 4") == 0);
  std::string out;
  CHECK(run_cli(s,
                "evaluate --data " + s.path("data/manifest.json") + " --out " + s.path("eval") +
                    " --seed 3 --train-size 25 --reps 2 --methods mono,mwmvc2 -T 2",
                &out) == 0);
  std::string raw = read_text_file(s.path("eval/raw.csv"));
  CHECK(raw.rfind("method,m,rep,accuracy,f1\n", 0) == 0);
  CHECK(std::count(raw.begin(), raw.end(), '\n') == 1 + 2 * 2);
  std::string summary = read_text_file(s.path("eval/summary.csv"));
  CHECK(summary.rfind("method,m,reps,", 0) == 0);
  nlohmann::json j = nlohmann::json::parse(read_text_file(s.path("eval/summary.json")));
  CHECK(j.contains("mono"));
  CHECK(j.contains("mwmvc2"));
  CHECK(j["mwmvc2"][0]["reps"] == 2);
}

TEST_CASE("curve runs over the requested sizes") {
  Scratch s("curve");
  CHECK(run_cli(s, "synth --out " + s.path("data") + " --seed 8 --m 80 --views 3 --dim 4") == 0);
  CHECK(run_cli(s, "curve --data " + s.path("data/manifest.json") + " --out " + s.path("curve") +
                       " --seed 8 --sizes 20,40 --reps 2 --methods mwmvc2 -T 2") == 0);
  std::string raw = read_text_file(s.path("curve/curve.csv"));
  CHECK(std::count(raw.begin(), raw.end(), '\n') == 1 + 2 * 2);
  CHECK(raw.find("mwmvc2,20,") != std::string::npos);
  CHECK(raw.find("mwmvc2,40,") != std::string::npos);
  CHECK(fs::exists(s.path("curve/curve_summary.csv")));
}

TEST_CASE("config files supply defaults that flags still override") {
  Scratch s("config");
  write_separable_dataset(s, "data");
  write_text_file(s.path("defaults.toml"), "[train]\niterations=4\nlambda=2.5\n");

  CHECK(run_cli(s, "train --config " + s.path("defaults.toml") + " --data " +
                       s.path("data/manifest.json") + " --out " + s.path("run") +
                       " --seed 1") == 0);
  nlohmann::json echo = nlohmann::json::parse(read_text_file(s.path("run/config.json")));
  CHECK(echo["train"]["iterations"] == 4);
  CHECK(echo["train"]["lambda"] == 2.5);

  CHECK(run_cli(s, "train --config " + s.path("defaults.toml") + " --data " +
                       s.path("data/manifest.json") + " --out " + s.path("run2") +
                       " --seed 1 -T 6") == 0);
  nlohmann::json echo2 = nlohmann::json::parse(read_text_file(s.path("run2/config.json")));
  CHECK(echo2["train"]["iterations"] == 6);
  CHECK(echo2["train"]["lambda"] == 2.5);
}

TEST_CASE("exit codes distinguish usage, data, and numeric failures") {
  Scratch s("exits");
  std::string out;

  // Usage: missing required --seed.
  CHECK(run_cli(s, "train --data x.json --out " + s.path("o"), &out) == 1);

  // Usage: unknown solver name.
  write_separable_dataset(s, "data");
  CHECK(run_cli(s,
                "train --data " + s.path("data/manifest.json") + " --out " + s.path("o") +
                    " --seed 1 --rho-solver newton",
                &out) == 1);

  // Data: manifest file does not exist.
  CHECK(run_cli(s, "train --data " + s.path("none.json") + " --out " + s.path("o") + " --seed 1",
                &out) == 2);
  CHECK(out.find("error") != std::string::npos);

  // Data: label column sizes disagree.
  fs::create_directories(s.dir / "broken");
  write_text_file(s.path("broken/v1.csv"), "1\n2\n");
  write_text_file(s.path("broken/v2.csv"), "1\n2\n");
  write_text_file(s.path("broken/labels.csv"), "pos\n");
  write_text_file(s.path("broken/manifest.json"), R"({
    "format": "csv",
    "views": [{"name": "a", "path": "v1.csv"}, {"name": "b", "path": "v2.csv"}],
    "labels": "labels.csv",
    "positive_class": "pos"
  })");
  CHECK(run_cli(s,
                "train --data " + s.path("broken/manifest.json") + " --out " + s.path("o") +
                    " --seed 1",
                &out) == 2);

  // Numeric: epsilon 0 on a separable set makes a vote total hit zero.
  CHECK(run_cli(s,
                "train --data " + s.path("data/manifest.json") + " --out " + s.path("o") +
                    " --seed 1 --epsilon 0",
                &out) == 3);
  CHECK(out.find("numeric error") != std::string::npos);
}
