#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mvboost/bregman.hpp"

using namespace mvboost;

namespace {

MarginMatrix::ViewBlock block(std::size_t rows, std::vector<std::vector<std::int8_t>> cols) {
  MarginMatrix::ViewBlock b;
  b.rows = rows;
  b.columns = std::move(cols);
  return b;
}

// V=2, m=2: one voter in view 1, two in view 2.
MarginMatrix fixture_matrix() {
  MarginMatrix M;
  M.views.push_back(block(2, {{1, -1}}));
  M.views.push_back(block(2, {{1, 1}, {-1, 1}}));
  return M;
}

VoteWeights fixture_weights() {
  VoteWeights w;
  w.pi = {{2.0}, {1.0, 0.5}};
  w.rho = {0.75, 0.25};
  return w;
}

}  // namespace

TEST_CASE("sigma is the decreasing logistic") {
  CHECK(sigma(0.0) == 0.5);
  CHECK(sigma(1.0) == doctest::Approx(0.2689414213699951).epsilon(1e-15));
  CHECK(sigma(-1.0) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
  CHECK(sigma(2.0) == doctest::Approx(0.11920292202211755).epsilon(1e-15));
  CHECK(sigma(800.0) == 0.0);
  CHECK(sigma(-800.0) == 1.0);
  CHECK(sigma(-3.0) > sigma(3.0));
  // Complementarity sigma(z) + sigma(-z) = 1.
  for (double z : {0.1, 0.5, 2.0, 10.0}) {
    CHECK(sigma(z) + sigma(-z) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("log1p_exp is stable across the whole range") {
  CHECK(log1p_exp(0.0) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(log1p_exp(1.0) == doctest::Approx(1.3132616875182228).epsilon(1e-15));
  CHECK(log1p_exp(-3.0) == doctest::Approx(0.04858735157374206).epsilon(1e-15));
  CHECK(log1p_exp(3.0) == doctest::Approx(3.048587351573742).epsilon(1e-15));
  CHECK(log1p_exp(1000.0) == 1000.0);  // no overflow
  CHECK(log1p_exp(-1000.0) == 0.0);    // graceful underflow
  // ln(1+e^z) - ln(1+e^-z) = z.
  for (double z : {0.25, 1.0, 4.0, 30.0}) {
    CHECK(log1p_exp(z) - log1p_exp(-z) == doctest::Approx(z).epsilon(1e-14));
  }
}

TEST_CASE("divergence of a point from itself is zero") {
  std::vector<double> p = {0.0, 0.3, 0.5, 1.0};
  CHECK(bregman_div(p, p) == 0.0);
}

TEST_CASE("divergence matches hand-computed values") {
  // 0.2 ln(0.2/0.5) + 0.8 ln(0.8/0.5) + 0.7 ln(0.7/0.4) + 0.3 ln(0.3/0.6)
  std::vector<double> p = {0.2, 0.7}, q = {0.5, 0.4};
  CHECK(bregman_div(p, q) == doctest::Approx(0.3765316544085697).epsilon(1e-13));

  // p=0 against q: -ln(1-q).
  CHECK(bregman_div(std::vector<double>{0.0}, std::vector<double>{0.5}) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-14));
  // p=1 against q: -ln q.
  CHECK(bregman_div(std::vector<double>{1.0}, std::vector<double>{0.25}) ==
        doctest::Approx(1.3862943611198906).epsilon(1e-14));
}

TEST_CASE("divergence is nonnegative on random pairs") {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> p(5), q(5);
    for (int i = 0; i < 5; ++i) {
      p[i] = rng.uniform();
      q[i] = 0.001 + 0.998 * rng.uniform();
    }
    CHECK(bregman_div(p, q) >= 0.0);
  }
}

TEST_CASE("boundary mismatches follow the policy") {
  std::vector<double> p = {1.0}, q0 = {0.0};
  CHECK(std::isinf(bregman_div(p, q0)));
  CHECK_THROWS_AS(bregman_div(p, q0, BoundaryPolicy::kThrow), NumericError);

  std::vector<double> p0 = {0.0}, q1 = {1.0};
  CHECK(std::isinf(bregman_div(p0, q1)));
  CHECK_THROWS_AS(bregman_div(p0, q1, BoundaryPolicy::kThrow), NumericError);

  // Matched boundaries are exact zeros.
  CHECK(bregman_div(std::vector<double>{1.0}, std::vector<double>{1.0}) == 0.0);
  CHECK(bregman_div(std::vector<double>{0.0}, std::vector<double>{0.0}) == 0.0);
}

TEST_CASE("denormal q is clamped and counted") {
  std::uint64_t clamps = 0;
  std::vector<double> p = {1.0}, q = {1e-310};
  double d = bregman_div(p, q, BoundaryPolicy::kInfinity, &clamps);
  CHECK(clamps == 1);
  CHECK(d == doctest::Approx(-std::log(1e-300)).epsilon(1e-13));
  CHECK(std::isfinite(d));
}

TEST_CASE("divergence validates its inputs") {
  CHECK_THROWS_AS(bregman_div(std::vector<double>{0.5}, std::vector<double>{0.5, 0.5}),
                  InputError);
  CHECK_THROWS_AS(bregman_div(std::vector<double>{1.5}, std::vector<double>{0.5}), InputError);
  CHECK_THROWS_AS(bregman_div(std::vector<double>{0.5}, std::vector<double>{-0.1}), InputError);
}

TEST_CASE("legendre update matches the closed form and its fixed points") {
  // q=1/2 reduces to sigma(r).
  std::vector<double> q = {0.5, 0.5, 0.5};
  std::vector<double> r = {-2.0, 0.0, 3.0};
  std::vector<double> out = legendre_update(q, r);
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(out[i] == doctest::Approx(sigma(r[i])).epsilon(1e-15));
  }

  // Hand value at q=0.3, r=1.2.
  out = legendre_update(std::vector<double>{0.3}, std::vector<double>{1.2});
  CHECK(out[0] == doctest::Approx(0.11432570232782711).epsilon(1e-13));

  // 0 and 1 are fixed points for any finite step.
  out = legendre_update(std::vector<double>{0.0, 1.0}, std::vector<double>{5.0, -5.0});
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 1.0);

  // Extreme steps saturate instead of overflowing.
  out = legendre_update(std::vector<double>{0.9, 0.9}, std::vector<double>{800.0, -800.0});
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 1.0);

  CHECK_THROWS_AS(
      legendre_update(std::vector<double>{0.5},
                      std::vector<double>{std::numeric_limits<double>::infinity()}),
      InputError);
}

TEST_CASE("margin vector applies both weight levels in fixed order") {
  MarginMatrix M = fixture_matrix();
  VoteWeights w = fixture_weights();
  std::vector<double> margins = margin_vector(M, w);
  REQUIRE(margins.size() == 2);
  // Row 0: 0.75*2*1 + 0.25*(1*1 + 0.5*(-1)) = 1.625
  // Row 1: 0.75*2*(-1) + 0.25*(1*1 + 0.5*1) = -1.125
  CHECK(margins[0] == 1.625);
  CHECK(margins[1] == -1.125);

  // Mismatched voter counts are rejected.
  VoteWeights bad = w;
  bad.pi[1].pop_back();
  CHECK_THROWS_AS(margin_vector(M, bad), InputError);
}

TEST_CASE("margin vector is independent of the thread count") {
  Rng rng(9);
  MarginMatrix M;
  for (int v = 0; v < 4; ++v) {
    std::vector<std::vector<std::int8_t>> cols(3, std::vector<std::int8_t>(64));
    for (auto& col : cols) {
      for (auto& e : col) e = rng.uniform() < 0.5 ? -1 : 1;
    }
    M.views.push_back(block(64, std::move(cols)));
  }
  VoteWeights w;
  w.rho = {0.1, 0.2, 0.3, 0.4};
  w.pi.resize(4);
  for (auto& blockw : w.pi) {
    blockw.resize(3);
    for (double& x : blockw) x = rng.uniform(-2.0, 2.0);
  }
  CHECK(margin_vector(M, w, 1) == margin_vector(M, w, 4));
}

TEST_CASE("q_from_weights is sigma of the margins") {
  MarginMatrix M = fixture_matrix();
  VoteWeights w = fixture_weights();
  std::vector<double> q = q_from_weights(M, w);
  std::vector<double> margins = margin_vector(M, w);
  REQUIRE(q.size() == margins.size());
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(q[i] == sigma(margins[i]));

  // Identical to a legendre step away from the uniform vector.
  std::vector<double> half(margins.size(), 0.5);
  CHECK(q == legendre_update(half, margins));
}

TEST_CASE("objective matches the stable logistic sum") {
  std::vector<double> margins = {1.0, -3.0};
  CHECK(objective_from_margins(margins) == doctest::Approx(3.361849039091965).epsilon(1e-14));

  std::vector<double> zeros = {0.0, 0.0};
  CHECK(objective_from_margins(zeros) == doctest::Approx(1.3862943611198906).epsilon(1e-14));

  MarginMatrix M = fixture_matrix();
  VoteWeights w = fixture_weights();
  CHECK(objective(M, w) == objective_from_margins(margin_vector(M, w)));
}

TEST_CASE("objective survives saturated coordinates") {
  // sigma(-40) is within 1e-7 of 1, where the divergence cross-check loses
  // precision; the direct sum must still come back exact and finite.
  std::vector<double> margins = {-40.0};
  CHECK(objective_from_margins(margins) == doctest::Approx(40.0).epsilon(1e-14));

  std::vector<double> mixed = {-60.0, 2.0, -0.5};
  double expected = 60.0 + log1p_exp(-2.0) + log1p_exp(0.5);
  CHECK(objective_from_margins(mixed) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("objective agrees with the divergence form away from saturation") {
  Rng rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> margins(20);
    for (double& x : margins) x = rng.uniform(-8.0, 8.0);
    std::vector<double> q(margins.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = sigma(margins[i]);
    std::vector<double> zeros(margins.size(), 0.0);
    double direct = objective_from_margins(margins);
    double div = bregman_div(zeros, q);
    CHECK(direct == doctest::Approx(div).epsilon(1e-11));
  }
}
