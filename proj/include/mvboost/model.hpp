#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvboost/dataset.hpp"
#include "mvboost/pool.hpp"

namespace mvboost {

// Two-level vote weights: per-voter weights pi (unconstrained reals, one list
// per view) and view weights rho on the probability simplex.
struct VoteWeights {
  std::vector<std::vector<double>> pi;
  std::vector<double> rho;

  std::size_t num_views() const { return pi.size(); }
  // Checks finiteness, matching view counts, and rho on the simplex
  // (entries >= 0, sum within 1e-9 of 1).
  void validate() const;
};

struct TrainMeta {
  int iterations = 2;
  double epsilon = 0.0;
  std::string rho_solver = "entropic";
  double lambda = 0.0;  // 0 = adaptive
  std::uint64_t seed = 0;
  int iterations_run = 0;
};

// Trained double-weighted multiview vote: score(x) = sum_v rho_v * sum_j
// pi_{v,j} * h_{v,j}(x^v); predicted label is the sign, ties -> +1.
struct MvModel {
  VoterPool pool;
  VoteWeights weights;
  TrainMeta meta;
  std::vector<std::string> view_names;

  void validate() const;
};

inline int predict_label(double score) { return score < 0.0 ? -1 : 1; }

double vote_score(const MvModel& model, const Observation& x);
std::vector<double> score_rows(const MvModel& model, const MultiviewDataset& data);
std::vector<int> predict_rows(const MvModel& model, const MultiviewDataset& data);

// Fraction of rows with y * score <= 0; zero margins count as errors. Note
// this is the margin convention, slightly stricter than 1 - accuracy of
// predict_label (which maps a zero score to +1).
double zero_one_risk(const MvModel& model, const MultiviewDataset& data);

// (1 / (m ln 2)) * sum_i ln(1 + exp(-y_i * score_i)): the calibrated logistic
// surrogate, an upper bound on zero_one_risk that equals 1 at zero margins.
double logistic_risk(const MvModel& model, const MultiviewDataset& data);

}  // namespace mvboost
