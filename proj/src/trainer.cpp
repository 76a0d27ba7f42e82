#include "mvboost/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace mvboost {

std::string to_string(RhoSolverKind kind) {
  return kind == RhoSolverKind::kExactVertex ? "exact_vertex" : "entropic";
}

RhoSolverKind rho_solver_from_string(const std::string& name) {
  if (name == "exact_vertex") return RhoSolverKind::kExactVertex;
  if (name == "entropic") return RhoSolverKind::kEntropic;
  throw ConfigError("unknown rho solver '" + name + "' (expected exact_vertex or entropic)");
}

std::string to_string(MonotonePolicy policy) {
  switch (policy) {
    case MonotonePolicy::kIgnore: return "ignore";
    case MonotonePolicy::kWarn: return "warn";
    case MonotonePolicy::kStrict: return "strict";
  }
  return "warn";
}

MonotonePolicy monotone_policy_from_string(const std::string& name) {
  if (name == "ignore") return MonotonePolicy::kIgnore;
  if (name == "warn") return MonotonePolicy::kWarn;
  if (name == "strict") return MonotonePolicy::kStrict;
  throw ConfigError("unknown monotone policy '" + name + "' (expected ignore, warn, or strict)");
}

WeightStats weight_stats(const MarginMatrix::ViewBlock& M, std::span<const double> q) {
  if (q.size() != M.rows) {
    throw InputError("weight vector has " + std::to_string(q.size()) + " entries for " +
                     std::to_string(M.rows) + " rows");
  }
  WeightStats stats;
  stats.w_plus.resize(M.columns.size());
  stats.w_minus.resize(M.columns.size());
  for (std::size_t j = 0; j < M.columns.size(); ++j) {
    const auto& col = M.columns[j];
    double plus = 0.0, minus = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (col[i] == 1) {
        plus += q[i];
      } else {
        minus += q[i];
      }
    }
    stats.w_plus[j] = plus;
    stats.w_minus[j] = minus;
  }
  return stats;
}

double delta_update(double w_plus, double w_minus, double epsilon) {
  if (epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
  if (w_plus < 0.0 || w_minus < 0.0) throw InputError("vote weight totals must be >= 0");
  double num = w_plus + epsilon;
  double den = w_minus + epsilon;
  if (num == 0.0 || den == 0.0) {
    throw NumericError("delta step undefined: a vote-weight total is 0 with epsilon = 0");
  }
  return 0.5 * std::log(num / den);
}

double view_score(const WeightStats& stats) {
  double s = 0.0;
  for (std::size_t j = 0; j < stats.w_plus.size(); ++j) {
    double d = std::sqrt(stats.w_plus[j]) - std::sqrt(stats.w_minus[j]);
    s += d * d;
  }
  return s;
}

std::vector<double> solve_rho(std::span<const double> scores, RhoSolverKind kind, double lambda) {
  if (scores.empty()) throw InputError("solve_rho needs at least one view score");
  for (double s : scores) {
    if (!std::isfinite(s)) throw NumericError("view scores must be finite");
  }

  std::size_t V = scores.size();
  std::vector<double> rho(V, 0.0);
  if (kind == RhoSolverKind::kExactVertex) {
    double best = scores[0];
    for (double s : scores) best = std::max(best, s);
    std::size_t ties = 0;
    for (double s : scores) ties += s == best;
    for (std::size_t v = 0; v < V; ++v) {
      if (scores[v] == best) rho[v] = 1.0 / static_cast<double>(ties);
    }
    return rho;
  }

  double lam = lambda;
  if (lam <= 0.0) lam = mean_of(scores) + 1e-12;
  double zmax = scores[0] / lam;
  for (double s : scores) zmax = std::max(zmax, s / lam);
  double denom = 0.0;
  for (std::size_t v = 0; v < V; ++v) {
    rho[v] = std::exp(scores[v] / lam - zmax);
    denom += rho[v];
  }
  for (double& r : rho) r /= denom;
  return rho;
}

double compute_A(std::span<const double> rho_next, std::span<const WeightStats> stats) {
  if (rho_next.size() != stats.size()) {
    throw InputError("rho has " + std::to_string(rho_next.size()) + " entries for " +
                     std::to_string(stats.size()) + " views");
  }
  double a = 0.0;
  for (std::size_t v = 0; v < stats.size(); ++v) {
    a -= rho_next[v] * view_score(stats[v]);
  }
  return a;
}

VoteWeights init_weights(const MarginMatrix& M) {
  M.validate();
  VoteWeights w;
  std::size_t V = M.num_views();
  w.rho.assign(V, 1.0 / static_cast<double>(V));
  w.pi.resize(V);
  for (std::size_t v = 0; v < V; ++v) {
    std::size_t n = M.views[v].columns.size();
    w.pi[v].assign(n, 1.0 / static_cast<double>(n));
  }
  return w;
}

namespace {

void check_finite_weights(const VoteWeights& w, int t) {
  for (const auto& block : w.pi) {
    for (double x : block) {
      if (!std::isfinite(x)) {
        throw NumericError("pi became non-finite at iteration " + std::to_string(t));
      }
    }
  }
  for (double r : w.rho) {
    if (!std::isfinite(r)) {
      throw NumericError("rho became non-finite at iteration " + std::to_string(t));
    }
  }
}

}  // namespace

std::pair<VoteWeights, TrainTrace> fit_margins(const MarginMatrix& M, const TrainConfig& cfg) {
  M.validate();
  if (cfg.iterations < 0) throw ConfigError("iteration count must be >= 0");
  if (cfg.epsilon >= 0.0 && !std::isfinite(cfg.epsilon)) {
    throw ConfigError("epsilon must be finite");
  }

  std::size_t m = M.num_rows();
  std::size_t V = M.num_views();
  double eps = cfg.epsilon < 0.0 ? 1.0 / (2.0 * static_cast<double>(m)) : cfg.epsilon;

  VoteWeights w = init_weights(M);
  TrainTrace trace;
  double prev_obj = 0.0;

  for (int t = 1; t <= cfg.iterations; ++t) {
    auto started = std::chrono::steady_clock::now();

    std::vector<double> margins = margin_vector(M, w, cfg.threads);
    double obj = objective_from_margins(margins);
    if (cfg.tolerance > 0.0 && t > 1 && prev_obj - obj < cfg.tolerance) break;

    std::vector<double> q(margins.size());
    for (std::size_t i = 0; i < margins.size(); ++i) q[i] = sigma(margins[i]);

    // Steps 5-11: per-view totals, voter steps, and view scores are
    // independent across views; each view writes only its own slots.
    std::vector<WeightStats> stats(V);
    std::vector<double> scores(V);
    parallel_for(V, cfg.threads, [&](std::size_t v) {
      stats[v] = weight_stats(M.views[v], q);
      auto& pi = w.pi[v];
      for (std::size_t j = 0; j < pi.size(); ++j) {
        pi[j] += delta_update(stats[v].w_plus[j], stats[v].w_minus[j], eps);
      }
      scores[v] = view_score(stats[v]);
    });

    w.rho = solve_rho(scores, cfg.rho_solver, cfg.lambda);
    check_finite_weights(w, t);

    IterationRecord rec;
    rec.t = t;
    rec.objective = obj;
    rec.rho_after = w.rho;
    rec.view_scores = std::move(scores);
    rec.bound_a = compute_A(w.rho, stats);
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    trace.iterations.push_back(std::move(rec));
    prev_obj = obj;
  }

  trace.final_objective = objective(M, w, cfg.threads);
  trace.iterations_run = static_cast<int>(trace.iterations.size());

  // Monotonicity bookkeeping over the full recorded sequence.
  trace.max_increase = 0.0;
  for (std::size_t k = 0; k + 1 <= trace.iterations.size(); ++k) {
    double before = trace.iterations[k].objective;
    double after =
        k + 1 < trace.iterations.size() ? trace.iterations[k + 1].objective : trace.final_objective;
    trace.max_increase = std::max(trace.max_increase, after - before);
  }
  trace.monotone = trace.max_increase <= 0.0 || trace.iterations.empty();

  if (!trace.monotone) {
    if (cfg.monotone_policy == MonotonePolicy::kStrict) {
      throw NumericError("objective increased by " + format_double(trace.max_increase) +
                         " during training (strict monotone policy)");
    }
    if (cfg.monotone_policy == MonotonePolicy::kWarn) {
      std::fprintf(stderr, "warning: objective increased by %s during training\n",
                   format_double(trace.max_increase).c_str());
    }
  }
  return {std::move(w), std::move(trace)};
}

std::pair<MvModel, TrainTrace> fit(const MultiviewDataset& data, const VoterPool& pool,
                                   const TrainConfig& cfg) {
  MarginMatrix M = margin_matrix(pool, data, cfg.threads);
  auto [weights, trace] = fit_margins(M, cfg);

  MvModel model;
  model.pool = pool;
  model.weights = std::move(weights);
  model.view_names = data.view_names;
  model.meta.iterations = cfg.iterations;
  model.meta.epsilon = cfg.epsilon < 0.0 ? 1.0 / (2.0 * static_cast<double>(data.num_rows()))
                                         : cfg.epsilon;
  model.meta.rho_solver = to_string(cfg.rho_solver);
  model.meta.lambda = cfg.lambda <= 0.0 ? 0.0 : cfg.lambda;
  model.meta.seed = cfg.seed;
  model.meta.iterations_run = trace.iterations_run;
  model.validate();
  return {std::move(model), std::move(trace)};
}

}  // namespace mvboost
