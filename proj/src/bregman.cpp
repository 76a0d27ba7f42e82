#include "mvboost/bregman.hpp"

#include <cmath>
#include <limits>

namespace mvboost {

double sigma(double z) {
  if (z >= 0.0) {
    double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double log1p_exp(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

namespace {

void check_unit(std::span<const double> x, const char* name) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] <= 1.0)) {
      throw InputError(std::string(name) + "[" + std::to_string(i) + "] = " +
                       format_double(x[i]) + " is outside [0, 1]");
    }
  }
}

}  // namespace

double bregman_div(std::span<const double> p, std::span<const double> q, BoundaryPolicy policy,
                   std::uint64_t* clamp_count) {
  if (p.size() != q.size()) {
    throw InputError("divergence arguments have lengths " + std::to_string(p.size()) + " and " +
                     std::to_string(q.size()));
  }
  check_unit(p, "p");
  check_unit(q, "q");

  constexpr double kClampFloor = 1e-300;
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double pi = p[i], qi = q[i];
    if (pi > 0.0) {
      if (qi == 0.0) {
        if (policy == BoundaryPolicy::kThrow) {
          throw NumericError("divergence is infinite: q[" + std::to_string(i) +
                             "] = 0 with p > 0");
        }
        return std::numeric_limits<double>::infinity();
      }
      double qa = qi;
      if (qa < kClampFloor) {
        qa = kClampFloor;
        if (clamp_count) ++*clamp_count;
      }
      total += pi * std::log(pi / qa);
    }
    if (pi < 1.0) {
      if (qi == 1.0) {
        if (policy == BoundaryPolicy::kThrow) {
          throw NumericError("divergence is infinite: q[" + std::to_string(i) +
                             "] = 1 with p < 1");
        }
        return std::numeric_limits<double>::infinity();
      }
      // (1-p) ln((1-p)/(1-q)) via log1p keeps full precision when q is tiny.
      total += (1.0 - pi) * (std::log1p(-pi) - std::log1p(-qi));
    }
  }
  // Rounding can leave a tiny negative residue when p ~ q; the true value is
  // nonnegative.
  if (total < 0.0 && total > -1e-12) total = 0.0;
  return total;
}

std::vector<double> legendre_update(std::span<const double> q, std::span<const double> r) {
  if (q.size() != r.size()) {
    throw InputError("legendre_update arguments have lengths " + std::to_string(q.size()) +
                     " and " + std::to_string(r.size()));
  }
  check_unit(q, "q");
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    double qi = q[i], ri = r[i];
    if (!std::isfinite(ri)) {
      throw InputError("legendre_update step r[" + std::to_string(i) + "] is not finite");
    }
    if (qi == 0.0 || qi == 1.0) {
      out[i] = qi;  // boundary fixed points; avoids 0/0 when exp underflows
      continue;
    }
    if (ri >= 0.0) {
      double e = std::exp(-ri);  // in (0, 1]
      out[i] = qi * e / (1.0 - qi + qi * e);
    } else {
      double e = std::exp(ri);  // in (0, 1): divide through by e^{-r}
      out[i] = qi / ((1.0 - qi) * e + qi);
    }
  }
  return out;
}

std::vector<double> margin_vector(const MarginMatrix& M, const VoteWeights& w,
                                  std::size_t threads) {
  M.validate();
  w.validate();
  if (M.num_views() != w.num_views()) {
    throw InputError("margin matrix has " + std::to_string(M.num_views()) +
                     " views but weights have " + std::to_string(w.num_views()));
  }
  std::size_t m = M.num_rows();
  std::size_t V = M.num_views();
  for (std::size_t v = 0; v < V; ++v) {
    if (M.views[v].columns.size() != w.pi[v].size()) {
      throw InputError("view " + std::to_string(v) + " has " +
                       std::to_string(M.views[v].columns.size()) + " voters but " +
                       std::to_string(w.pi[v].size()) + " pi weights");
    }
  }

  // Per-view partial sums (parallel), then a fixed ascending-v reduction.
  std::vector<std::vector<double>> partial(V);
  parallel_for(V, threads, [&](std::size_t v) {
    std::vector<double>& acc = partial[v];
    acc.assign(m, 0.0);
    const auto& cols = M.views[v].columns;
    const auto& pi = w.pi[v];
    for (std::size_t j = 0; j < cols.size(); ++j) {
      double wj = pi[j];
      const auto& col = cols[j];
      for (std::size_t i = 0; i < m; ++i) acc[i] += wj * static_cast<double>(col[i]);
    }
  });
  std::vector<double> margins(m, 0.0);
  for (std::size_t v = 0; v < V; ++v) {
    double rho = w.rho[v];
    for (std::size_t i = 0; i < m; ++i) margins[i] += rho * partial[v][i];
  }
  return margins;
}

std::vector<double> q_from_weights(const MarginMatrix& M, const VoteWeights& w,
                                   std::size_t threads) {
  std::vector<double> q = margin_vector(M, w, threads);
  for (double& x : q) x = sigma(x);
  return q;
}

double objective_from_margins(std::span<const double> margins) {
  double direct = 0.0;
  for (double mi : margins) {
    if (!std::isfinite(mi)) throw NumericError("margin vector contains a non-finite value");
    direct += log1p_exp(-mi);
  }

  // Cross-check the divergence identity on the representable coordinates.
  std::vector<double> q_checked;
  double direct_checked = 0.0;
  for (double mi : margins) {
    double qi = sigma(mi);
    if (qi <= 1.0 - 1e-7) {
      q_checked.push_back(qi);
      direct_checked += log1p_exp(-mi);
    }
  }
  std::vector<double> zeros(q_checked.size(), 0.0);
  double div = bregman_div(zeros, q_checked);
  double tol = 1e-9 * std::max(std::abs(div), std::abs(direct_checked)) + 1e-12;
  if (std::abs(div - direct_checked) > tol) {
    throw NumericError("objective self-check failed: divergence form " + format_double(div) +
                       " vs direct form " + format_double(direct_checked));
  }
  return direct;
}

double objective(const MarginMatrix& M, const VoteWeights& w, std::size_t threads) {
  return objective_from_margins(margin_vector(M, w, threads));
}

}  // namespace mvboost
