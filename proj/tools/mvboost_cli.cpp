#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvboost/data_io.hpp"
#include "mvboost/evaluation.hpp"
#include "mvboost/model_io.hpp"
#include "mvboost/trainer.hpp"

namespace fs = std::filesystem;
using mvboost::ConfigError;
using ordered_json = nlohmann::ordered_json;

namespace {

// Options shared by every trainer-backed subcommand.
struct TrainOpts {
  int iterations = 2;
  double epsilon = -1.0;
  std::string rho_solver = "entropic";
  double lambda = 0.0;
  double tolerance = 0.0;
  std::string monotone_policy = "warn";
  std::vector<int> depths;
  std::size_t threads = 1;
};

void add_train_opts(CLI::App* cmd, TrainOpts& opts) {
  cmd->add_option("-T,--iterations", opts.iterations, "Training iterations")
      ->capture_default_str();
  cmd->add_option("--epsilon", opts.epsilon,
                  "Smoothing added to the vote-weight totals; negative means 1/(2m)")
      ->capture_default_str();
  cmd->add_option("--rho-solver", opts.rho_solver, "View-weight solver: entropic or exact_vertex")
      ->capture_default_str();
  cmd->add_option("--lambda", opts.lambda,
                  "Entropic solver temperature; 0 adapts to the score scale")
      ->capture_default_str();
  cmd->add_option("--tolerance", opts.tolerance,
                  "Stop early when the objective drop falls below this; 0 disables")
      ->capture_default_str();
  cmd->add_option("--monotone-policy", opts.monotone_policy,
                  "On an objective increase: ignore, warn, or strict (abort)")
      ->capture_default_str();
  cmd->add_option("--depths", opts.depths,
                  "Tree depth schedule (default: 1..ceil(log2(m))-1)")
      ->delimiter(',');
  cmd->add_option("--threads", opts.threads, "Worker threads (never changes results)")
      ->capture_default_str();
}

mvboost::TrainConfig to_train_config(const TrainOpts& opts, std::uint64_t seed) {
  mvboost::TrainConfig cfg;
  cfg.iterations = opts.iterations;
  cfg.epsilon = opts.epsilon;
  cfg.rho_solver = mvboost::rho_solver_from_string(opts.rho_solver);
  cfg.lambda = opts.lambda;
  cfg.tolerance = opts.tolerance;
  cfg.monotone_policy = mvboost::monotone_policy_from_string(opts.monotone_policy);
  cfg.seed = seed;
  cfg.threads = opts.threads;
  return cfg;
}

ordered_json train_opts_json(const TrainOpts& opts, const std::vector<int>& resolved_depths) {
  // --threads deliberately omitted: it never affects results and would break
  // byte-identity of the echoed config across worker counts.
  ordered_json j;
  j["iterations"] = opts.iterations;
  j["epsilon"] = opts.epsilon;
  j["rho_solver"] = opts.rho_solver;
  j["lambda"] = opts.lambda;
  j["tolerance"] = opts.tolerance;
  j["monotone_policy"] = opts.monotone_policy;
  j["depths"] = resolved_depths;
  return j;
}

void write_config_echo(const std::string& out_dir, const ordered_json& j) {
  mvboost::write_text_file((fs::path(out_dir) / "config.json").string(), j.dump(2) + "\n");
}

std::vector<mvboost::Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<mvboost::Method> methods;
  for (const std::string& n : names) methods.push_back(mvboost::method_from_string(n));
  return methods;
}

int run_train(const std::string& data_path, const std::string& out_dir, std::uint64_t seed,
              const TrainOpts& opts) {
  mvboost::DatasetManifest manifest = mvboost::load_manifest(data_path);
  mvboost::MultiviewDataset data = mvboost::load_binary(manifest);
  data.validate();

  std::vector<int> depths =
      opts.depths.empty() ? mvboost::default_depths(data.num_rows()) : opts.depths;
  mvboost::VoterPool pool = mvboost::build_pool(data, depths, seed, opts.threads);
  auto [model, trace] = mvboost::fit(data, pool, to_train_config(opts, seed));

  fs::create_directories(out_dir);
  mvboost::save_model(model, (fs::path(out_dir) / "model.json").string());
  mvboost::save_trace(trace, (fs::path(out_dir) / "trace.jsonl").string());

  ordered_json echo;
  echo["command"] = "train";
  echo["data"] = data_path;
  echo["seed"] = seed;
  echo["train"] = train_opts_json(opts, depths);
  write_config_echo(out_dir, echo);

  double risk = mvboost::zero_one_risk(model, data);
  std::printf("trained on %zu rows, %zu views, pool depths 1..%d\n", data.num_rows(),
              data.num_views(), depths.back());
  for (const auto& it : trace.iterations) {
    std::printf("  iter %d: objective %s (%.1f ms)\n", it.t,
                mvboost::format_double(it.objective).c_str(), it.wall_ms);
  }
  std::printf("final objective %s, training error %s%s\n",
              mvboost::format_double(trace.final_objective).c_str(),
              mvboost::format_double(risk).c_str(),
              trace.monotone ? "" : " [objective increased during training]");
  std::printf("wrote %s and trace.jsonl\n", (fs::path(out_dir) / "model.json").string().c_str());
  return 0;
}

int run_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_dir) {
  mvboost::MvModel model = mvboost::load_model(model_path);
  mvboost::DatasetManifest manifest = mvboost::load_manifest(data_path);
  mvboost::MultiviewDataset data = manifest.format == "csv" ? mvboost::load_csv_multiview(manifest)
                                                            : mvboost::load_binary(manifest);

  std::string csv = "row,score,prediction\n";
  if (data.num_rows() > 0) {
    std::vector<double> scores = mvboost::score_rows(model, data);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      csv += std::to_string(i) + "," + mvboost::format_double(scores[i]) + "," +
             std::to_string(mvboost::predict_label(scores[i])) + "\n";
    }
  }
  fs::create_directories(out_dir);
  mvboost::write_text_file((fs::path(out_dir) / "predictions.csv").string(), csv);

  ordered_json echo;
  echo["command"] = "predict";
  echo["model"] = model_path;
  echo["data"] = data_path;
  write_config_echo(out_dir, echo);
  std::printf("wrote predictions for %zu rows to %s\n", data.num_rows(),
              (fs::path(out_dir) / "predictions.csv").string().c_str());
  return 0;
}

struct EvalOpts {
  std::size_t train_size = 100;
  double test_fraction = 0.3;
  std::size_t reps = 20;
  std::vector<std::string> methods = {"mono", "concat", "fusion", "mv_uniform", "mwmvc2"};
};

void add_eval_opts(CLI::App* cmd, EvalOpts& opts, bool with_train_size) {
  if (with_train_size) {
    cmd->add_option("--train-size", opts.train_size, "Labeled training rows per repetition")
        ->capture_default_str();
  }
  cmd->add_option("--test-fraction", opts.test_fraction, "Held-out test fraction")
      ->capture_default_str();
  cmd->add_option("--reps", opts.reps, "Number of repetitions")->capture_default_str();
  cmd->add_option("--methods", opts.methods,
                  "Methods to run: mono, concat, fusion, mv_uniform, mwmvc2")
      ->delimiter(',')
      ->capture_default_str();
}

mvboost::EvalConfig to_eval_config(const EvalOpts& eval, const TrainOpts& train,
                                   std::uint64_t seed) {
  mvboost::EvalConfig cfg;
  cfg.split.train_size = eval.train_size;
  cfg.split.test_fraction = eval.test_fraction;
  cfg.split.repetitions = eval.reps;
  cfg.split.seed = seed;
  cfg.train = to_train_config(train, seed);
  cfg.train.threads = 1;
  cfg.depths = train.depths;
  cfg.threads = train.threads;
  return cfg;
}

ordered_json summary_json(std::span<const mvboost::CurveRow> rows,
                          std::span<const mvboost::Method> methods,
                          std::span<const std::size_t> sizes) {
  ordered_json out;
  for (mvboost::Method method : methods) {
    ordered_json per_size = ordered_json::array();
    for (std::size_t size : sizes) {
      mvboost::MetricReport r = mvboost::summarize(rows, method, size);
      per_size.push_back({{"m", size},
                          {"reps", r.accuracy.size()},
                          {"accuracy_mean", r.accuracy_mean},
                          {"accuracy_std", r.accuracy_std},
                          {"f1_mean", r.f1_mean},
                          {"f1_std", r.f1_std}});
    }
    out[mvboost::to_string(method)] = std::move(per_size);
  }
  return out;
}

int run_curve_like(const std::string& command, const std::string& data_path,
                   const std::string& out_dir, std::uint64_t seed, const EvalOpts& eval,
                   const TrainOpts& train, const std::vector<std::size_t>& sizes) {
  mvboost::DatasetManifest manifest = mvboost::load_manifest(data_path);
  mvboost::MultiviewDataset data = mvboost::load_binary(manifest);
  data.validate();

  std::vector<mvboost::Method> methods = parse_methods(eval.methods);
  mvboost::EvalConfig cfg = to_eval_config(eval, train, seed);
  std::vector<mvboost::CurveRow> rows = mvboost::learning_curve(data, sizes, methods, cfg);

  fs::create_directories(out_dir);
  bool is_curve = command == "curve";
  std::string raw_name = is_curve ? "curve.csv" : "raw.csv";
  std::string agg_name = is_curve ? "curve_summary.csv" : "summary.csv";
  mvboost::write_text_file((fs::path(out_dir) / raw_name).string(), mvboost::curve_to_csv(rows));
  mvboost::write_text_file((fs::path(out_dir) / agg_name).string(),
                           mvboost::aggregate_to_csv(rows));
  mvboost::write_text_file((fs::path(out_dir) / "summary.json").string(),
                           summary_json(rows, methods, sizes).dump(2) + "\n");

  ordered_json echo;
  echo["command"] = command;
  echo["data"] = data_path;
  echo["seed"] = seed;
  echo["sizes"] = sizes;
  echo["test_fraction"] = eval.test_fraction;
  echo["reps"] = eval.reps;
  echo["methods"] = eval.methods;
  echo["train"] = train_opts_json(train, train.depths);
  write_config_echo(out_dir, echo);

  for (mvboost::Method method : methods) {
    for (std::size_t size : sizes) {
      mvboost::MetricReport r = mvboost::summarize(rows, method, size);
      std::printf("%-10s m=%-5zu accuracy %.4f +- %.4f  f1 %.4f +- %.4f  (%zu reps)\n",
                  mvboost::to_string(method).c_str(), size, r.accuracy_mean, r.accuracy_std,
                  r.f1_mean, r.f1_std, r.accuracy.size());
    }
  }
  std::printf("wrote %s, %s, summary.json\n", raw_name.c_str(), agg_name.c_str());
  return 0;
}

int run_synth(const std::string& out_dir, std::uint64_t seed, std::size_t m, std::size_t views,
              std::size_t dim, double redundancy, std::size_t noise_views, double scale) {
  mvboost::MultiviewDataset data =
      mvboost::synth_multiview(m, views, dim, redundancy, noise_views, seed, scale);
  mvboost::save_dataset_csv(data, out_dir);

  ordered_json echo;
  echo["command"] = "synth";
  echo["seed"] = seed;
  echo["m"] = m;
  echo["views"] = views;
  echo["dim"] = dim;
  echo["redundancy"] = redundancy;
  echo["noise_views"] = noise_views;
  echo["scale"] = scale;
  write_config_echo(out_dir, echo);
  std::printf("wrote %zu rows, %zu views (%zu noise) to %s\n", m, views, noise_views,
              out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-weighted multiview majority-vote classifier over decision-tree pools"};
  app.require_subcommand(1);
  // One config file can hold defaults for several subcommands, keyed by
  // [section]; explicit flags always win. Fallthrough lets --config appear
  // after the subcommand name.
  app.set_config("--config", "", "Read defaults from a TOML file with [subcommand] sections");
  app.fallthrough();

  std::string data_path, out_dir, model_path;
  std::uint64_t seed = 0;
  TrainOpts train_opts;
  EvalOpts eval_opts;
  std::vector<std::size_t> sizes;
  std::size_t synth_m = 200, synth_views = 3, synth_dim = 16, synth_noise = 1;
  double synth_redundancy = 0.5, synth_scale = 1.0;

  CLI::App* train = app.add_subcommand("train", "Train a weighted vote on a dataset manifest");
  train->add_option("--data", data_path, "Dataset manifest (JSON)")->required();
  train->add_option("--out", out_dir, "Output directory")->required();
  train->add_option("--seed", seed, "Random seed")->required();
  add_train_opts(train, train_opts);

  CLI::App* predict = app.add_subcommand("predict", "Score a dataset with a trained model");
  predict->add_option("--model", model_path, "Model file (JSON)")->required();
  predict->add_option("--data", data_path, "Dataset manifest (JSON)")->required();
  predict->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Compare methods over repeated train/test splits");
  evaluate->add_option("--data", data_path, "Dataset manifest (JSON)")->required();
  evaluate->add_option("--out", out_dir, "Output directory")->required();
  evaluate->add_option("--seed", seed, "Random seed (repetition r uses seed+r)")->required();
  add_eval_opts(evaluate, eval_opts, true);
  add_train_opts(evaluate, train_opts);

  CLI::App* curve = app.add_subcommand("curve", "Learning curve over training-set sizes");
  curve->add_option("--data", data_path, "Dataset manifest (JSON)")->required();
  curve->add_option("--out", out_dir, "Output directory")->required();
  curve->add_option("--seed", seed, "Random seed (repetition r uses seed+r)")->required();
  curve->add_option("--sizes", sizes, "Training sizes, e.g. 50,100,200")
      ->required()
      ->delimiter(',');
  add_eval_opts(curve, eval_opts, false);
  add_train_opts(curve, train_opts);

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic multiview dataset");
  synth->add_option("--out", out_dir, "Output directory")->required();
  synth->add_option("--seed", seed, "Random seed")->required();
  synth->add_option("--m", synth_m, "Rows")->capture_default_str();
  synth->add_option("--views", synth_views, "Views")->capture_default_str();
  synth->add_option("--dim", synth_dim, "Features per view")->capture_default_str();
  synth->add_option("--redundancy", synth_redundancy, "Shared signal fraction in [0,1]")
      ->capture_default_str();
  synth->add_option("--noise-views", synth_noise, "Trailing views with no label signal")
      ->capture_default_str();
  synth->add_option("--scale", synth_scale, "Class separation scale")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (train->parsed()) return run_train(data_path, out_dir, seed, train_opts);
    if (predict->parsed()) return run_predict(model_path, data_path, out_dir);
    if (evaluate->parsed()) {
      std::vector<std::size_t> one{eval_opts.train_size};
      return run_curve_like("evaluate", data_path, out_dir, seed, eval_opts, train_opts, one);
    }
    if (curve->parsed()) {
      return run_curve_like("curve", data_path, out_dir, seed, eval_opts, train_opts, sizes);
    }
    if (synth->parsed()) {
      return run_synth(out_dir, seed, synth_m, synth_views, synth_dim, synth_redundancy,
                       synth_noise, synth_scale);
    }
    std::fprintf(stderr, "error: no subcommand given\n");
    return 1;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const mvboost::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const mvboost::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const mvboost::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const mvboost::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}
