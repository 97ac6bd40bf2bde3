#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "stream_al/design.hpp"
#include "stream_al/errors.hpp"
#include "stream_al/regression.hpp"

using namespace stream_al;

TEST_CASE("fit") {
  SUBCASE("exact fit without intercept") {
    const auto m = fit(new_design({{1}, {2}}, {2, 4}));
    CHECK(m.coefficients[0] == doctest::Approx(2.0));
    CHECK_FALSE(m.intercept.has_value());
  }
  SUBCASE("two-point line with intercept") {
    const auto m = fit(new_design({{0}, {1}}, {1, 3}), true);
    REQUIRE(m.intercept.has_value());
    CHECK(*m.intercept == doctest::Approx(1.0));
    CHECK(m.coefficients[0] == doctest::Approx(2.0));
  }
  SUBCASE("ridge shrinks a single point") {
    const auto m = fit(new_design({{1}}, {1}, 1.0));
    CHECK(m.coefficients[0] == doctest::Approx(0.5));
    CHECK(m.ridge_lambda == 1.0);
  }
  SUBCASE("intercept collinear with a constant feature") {
    CHECK_THROWS_AS(fit(new_design({{1}, {1}, {1}}, {1, 2, 3}), true), SingularityError);
  }
}

TEST_CASE("fit with intercept matches an explicit constant column") {
  std::mt19937_64 rng(8);
  const auto rows = oracle::normal_rows(rng, 20, 3);
  Vector y;
  for (const auto& r : rows) y.push_back(2.0 + r[0] - 3.0 * r[2] + 0.1 * oracle::normal_vector(rng, 1)[0]);
  const auto m = fit(new_design(rows, y), true);
  std::vector<Vector> expanded;
  for (const auto& r : rows) expanded.push_back({r[0], r[1], r[2], 1.0});
  const auto full = fit(new_design(expanded, y));
  for (std::size_t i = 0; i < 3; ++i) CHECK(m.coefficients[i] == doctest::Approx(full.coefficients[i]).epsilon(1e-10));
  CHECK(*m.intercept == doctest::Approx(full.coefficients[3]).epsilon(1e-10));
}

TEST_CASE("residuals are orthogonal to the column space") {
  std::mt19937_64 rng(9);
  const auto rows = oracle::normal_rows(rng, 30, 5);
  Vector y = oracle::normal_vector(rng, 30);
  const auto d = new_design(rows, y);
  const auto m = fit(d);
  Vector xte(5, 0.0);
  Vector xty(5, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double e = y[i] - predict(m, rows[i]);
    for (std::size_t j = 0; j < 5; ++j) {
      xte[j] += rows[i][j] * e;
      xty[j] += rows[i][j] * y[i];
    }
  }
  double xte_max = 0.0, xty_max = 0.0;
  for (std::size_t j = 0; j < 5; ++j) {
    xte_max = std::max(xte_max, std::abs(xte[j]));
    xty_max = std::max(xty_max, std::abs(xty[j]));
  }
  CHECK(xte_max <= 1e-6 * xty_max);
}

TEST_CASE("predict") {
  CHECK(predict(LinearModel{{2}, std::nullopt, 0}, Vector{3}) == 6.0);
  CHECK(predict(LinearModel{{1, -1}, 5.0, 0}, Vector{2, 1}) == 6.0);
  CHECK(predict(LinearModel{{0, 0, 0}, 1.5, 0}, Vector{7, 8, 9}) == 1.5);
  CHECK_THROWS_AS(predict(LinearModel{{1, 2}, std::nullopt, 0}, Vector{1}), DimensionError);
}

TEST_CASE("rmse and percent_rmse_diff") {
  CHECK(rmse(Vector{1, 2}, Vector{1, 4}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(rmse(Vector{1, 2, 3}, Vector{1, 2, 3}) == 0.0);
  CHECK(rmse(Vector{3}, Vector{0}) == 3.0);
  CHECK_THROWS_AS(rmse(Vector{}, Vector{}), DimensionError);
  CHECK_THROWS_AS(rmse(Vector{1}, Vector{1, 2}), DimensionError);

  CHECK(percent_rmse_diff(0.9, 1.0) == doctest::Approx(-10.0));
  CHECK(percent_rmse_diff(1.0, 1.0) == 0.0);
  CHECK(percent_rmse_diff(1.5, 1.0) == doctest::Approx(50.0));
  CHECK_THROWS_AS(percent_rmse_diff(1.0, 0.0), DomainError);
}

TEST_CASE("property: noiseless data recovers beta") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> coef(-5, 5);
  for (std::size_t p : {1u, 4u, 10u, 25u}) {
    Vector beta(p);
    for (double& b : beta) b = coef(rng);
    const auto rows = oracle::normal_rows(rng, 2 * p + 1, p);
    Vector y;
    for (const auto& r : rows) y.push_back(dot(beta, r));
    const auto m = fit(new_design(rows, y));
    for (std::size_t j = 0; j < p; ++j) CHECK(std::abs(m.coefficients[j] - beta[j]) <= 1e-8);
  }
}

TEST_CASE("property: coefficient covariance over Monte Carlo refits matches sigma^2 (X^T X)^-1") {
  std::mt19937_64 rng(12);
  const std::size_t p = 3;
  const auto rows = oracle::normal_rows(rng, 12, p);
  const Vector beta{1.0, -2.0, 0.5};
  const auto base = new_design(rows, Vector(rows.size(), 0.0));
  std::normal_distribution<double> noise;
  std::vector<Vector> estimates;
  for (int rep = 0; rep < 2000; ++rep) {
    Vector y;
    for (const auto& r : rows) y.push_back(dot(beta, r) + noise(rng));
    estimates.push_back(fit(new_design(rows, y)).coefficients);
  }
  Matrix cov(p, p);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) cov(a, b) = oracle::sample_cov_entry(estimates, a, b);
  CHECK(relative_frobenius_diff(cov, base.gram_inv()) <= 0.15);
}

TEST_CASE("property: ridge shrinks the coefficient norm") {
  std::mt19937_64 rng(13);
  const auto rows = oracle::normal_rows(rng, 15, 6);
  const Vector y = oracle::normal_vector(rng, 15);
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double n = norm2(fit(new_design(rows, y, lambda)).coefficients);
    CHECK(n <= prev);
    prev = n;
  }
}
