#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mvboost/model.hpp"
#include "mvboost/pool.hpp"

namespace mvboost {

// Decreasing sigmoid 1/(1 + e^z). Note the sign: sigma(-inf) -> 1,
// sigma(0) = 0.5 exactly, sigma(+inf) -> 0.
double sigma(double z);

// ln(1 + e^z), overflow-safe for any finite z.
double log1p_exp(double z);

// What to do when a divergence term is truly infinite (q_i exactly 0 or 1
// with a mismatched p_i).
enum class BoundaryPolicy { kInfinity, kThrow };

// Bregman divergence of the coordinate-wise binary entropy:
//   sum_i p_i ln(p_i/q_i) + (1-p_i) ln((1-p_i)/(1-q_i)),
// with 0 ln 0 = 0. Nonnegative, zero iff p == q. Denormal q_i in (0, 1e-300)
// are clamped to 1e-300 before the log; each clamp increments *clamp_count
// when provided. Exact boundary mismatches follow the policy.
double bregman_div(std::span<const double> p, std::span<const double> q,
                   BoundaryPolicy policy = BoundaryPolicy::kInfinity,
                   std::uint64_t* clamp_count = nullptr);

// Coordinate-wise Legendre/dual update
//   out_i = q_i e^{-r_i} / (1 - q_i + q_i e^{-r_i}),
// computed in a form that never overflows: outputs stay in [0, 1], and
// q_i in {0, 1} are fixed points for any finite r_i. At q = 1/2 this reduces
// to sigma(r).
std::vector<double> legendre_update(std::span<const double> q, std::span<const double> r);

// Per-row weighted vote margins y_i * B(x_i) read off the sign matrix:
// margins_i = sum_v rho_v * sum_j pi_{v,j} * M_{v,i,j}. Reduction order is
// fixed (j ascending within a view, then views ascending) so results are
// bitwise reproducible; per-view partial sums may be computed in parallel.
std::vector<double> margin_vector(const MarginMatrix& M, const VoteWeights& w,
                                  std::size_t threads = 1);

// q_i = sigma(margin_i): the current example weights, equal to the Legendre
// update of the uniform q0 = 1/2 by the margin vector.
std::vector<double> q_from_weights(const MarginMatrix& M, const VoteWeights& w,
                                   std::size_t threads = 1);

// Training objective sum_i ln(1 + e^{-margin_i}). Computed via the stable
// direct sum; every call also cross-checks it against the divergence form
// bregman_div(0, sigma(margins)) and throws NumericError if the two disagree
// beyond |a-b| <= 1e-9 max(|a|,|b|) + 1e-12. Coordinates with
// q_i > 1 - 1e-7 are excluded from the cross-check (not from the result):
// there 1-q_i has fewer than ~23 significant bits left, so the divergence
// form cannot represent the term to 1e-9 no matter how it is computed.
double objective_from_margins(std::span<const double> margins);
double objective(const MarginMatrix& M, const VoteWeights& w, std::size_t threads = 1);

}  // namespace mvboost
