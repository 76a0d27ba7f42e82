#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mvboost/bregman.hpp"
#include "mvboost/model.hpp"
#include "mvboost/pool.hpp"

namespace mvboost {

enum class RhoSolverKind { kExactVertex, kEntropic };

std::string to_string(RhoSolverKind kind);
RhoSolverKind rho_solver_from_string(const std::string& name);

// What to do if the recorded objective sequence ever increases. The parallel
// update takes unscaled steps for every voter at once while also moving rho,
// so descent is only guaranteed when the effective row norm sum_v rho_v n_v
// stays <= 1; larger pools can and do overshoot. Default is to finish
// training and warn, leaving the evidence in the trace.
enum class MonotonePolicy { kIgnore, kWarn, kStrict };

std::string to_string(MonotonePolicy policy);
MonotonePolicy monotone_policy_from_string(const std::string& name);

struct TrainConfig {
  int iterations = 2;
  double epsilon = -1.0;  // < 0: use 1/(2m)
  RhoSolverKind rho_solver = RhoSolverKind::kEntropic;
  double lambda = 0.0;     // <= 0: adaptive mean(scores) + 1e-12
  double tolerance = 0.0;  // > 0: stop early when the objective drop falls below it
  MonotonePolicy monotone_policy = MonotonePolicy::kWarn;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

// Per-voter totals of the current example weights q, split by vote sign:
// w_plus[j] = sum over rows with M_{ij} = +1 of q_i, w_minus[j] likewise.
struct WeightStats {
  std::vector<double> w_plus;
  std::vector<double> w_minus;
};

WeightStats weight_stats(const MarginMatrix::ViewBlock& M, std::span<const double> q);

// Voter step 0.5 ln((W+ + eps) / (W- + eps)). eps = 0 is allowed only when
// both totals are positive; a zero total with eps = 0 is an error rather
// than an infinite step.
double delta_update(double w_plus, double w_minus, double epsilon);

// View-quality score sum_j (sqrt(W+_j) - sqrt(W-_j))^2 for one view.
double view_score(const WeightStats& stats);

// argmin over the simplex of -<scores, rho> ( - lambda * entropy(rho) for the
// entropic solver). kExactVertex returns the one-hot argmax, exact ties
// splitting uniformly over the tied set; kEntropic returns
// softmax(scores / lambda). lambda <= 0 uses mean(scores) + 1e-12.
std::vector<double> solve_rho(std::span<const double> scores, RhoSolverKind kind,
                              double lambda = 0.0);

// Progress bound A = -sum_v rho_next_v * view_score_v (always <= 0).
double compute_A(std::span<const double> rho_next, std::span<const WeightStats> stats);

struct IterationRecord {
  int t = 0;
  double objective = 0.0;          // before this iteration's updates
  std::vector<double> rho_after;   // rho chosen at the end of the iteration
  std::vector<double> view_scores;
  double bound_a = 0.0;
  double wall_ms = 0.0;  // in-memory only; excluded from serialized traces
};

struct TrainTrace {
  std::vector<IterationRecord> iterations;
  double final_objective = 0.0;
  int iterations_run = 0;
  // Largest single-step increase across the recorded objective sequence
  // (including the final value); <= 0 means the run was monotone.
  double max_increase = 0.0;
  bool monotone = true;
};

// Uniform starting point: pi_v = 1/n_v, rho = 1/V.
VoteWeights init_weights(const MarginMatrix& M);

// Parallel-update training on a fixed sign matrix. Each iteration computes
// q = sigma(margins), per-voter totals W+/W-, steps every pi by delta, then
// re-solves rho from the view scores. Returns the weights after the last
// iteration together with the per-iteration trace.
std::pair<VoteWeights, TrainTrace> fit_margins(const MarginMatrix& M, const TrainConfig& cfg);

// Convenience wrapper: sign matrix from (pool, data), then fit_margins; the
// result is packaged as a ready-to-serialize model.
std::pair<MvModel, TrainTrace> fit(const MultiviewDataset& data, const VoterPool& pool,
                                   const TrainConfig& cfg);

}  // namespace mvboost
