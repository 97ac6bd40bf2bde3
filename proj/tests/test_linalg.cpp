#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "stream_al/errors.hpp"
#include "stream_al/linalg.hpp"

using namespace stream_al;

namespace {

Matrix reconstruct(const SymEig& e) {
  const std::size_t n = e.values.size();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out(i, j) += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
  return out;
}

Matrix outer_added(const Matrix& a, const Vector& x) {
  Matrix b = a;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) b(i, j) += x[i] * x[j];
  return b;
}

}  // namespace

TEST_CASE("sym_eig on small fixed matrices") {
  SUBCASE("diagonal: eigenvalues sorted, eigenvectors permuted identity") {
    const SymEig e = sym_eig(Matrix{{2, 0}, {0, 3}});
    CHECK(e.values[0] == doctest::Approx(3.0));
    CHECK(e.values[1] == doctest::Approx(2.0));
    CHECK(e.vectors(0, 0) == doctest::Approx(0.0));
    CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(0, 1)) == doctest::Approx(1.0));
  }
  SUBCASE("swap matrix") {
    const SymEig e = sym_eig(Matrix{{0, 1}, {1, 0}});
    CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.values[1] == doctest::Approx(-1.0).epsilon(1e-12));
    const double r = 1.0 / std::sqrt(2.0);
    // Columns are (1,1)/sqrt2 and (1,-1)/sqrt2 up to sign.
    CHECK(std::abs(e.vectors(0, 0) * e.vectors(1, 0) - r * r) < 1e-12);
    CHECK(std::abs(e.vectors(0, 1) * e.vectors(1, 1) + r * r) < 1e-12);
    CHECK(std::abs(std::abs(e.vectors(0, 0)) - r) < 1e-12);
  }
  SUBCASE("identity 4x4") {
    const SymEig e = sym_eig(Matrix::identity(4));
    for (double v : e.values) CHECK(v == doctest::Approx(1.0));
  }
}

TEST_CASE("sym_eig rejects bad input") {
  CHECK_THROWS_AS(sym_eig(Matrix(2, 3)), DimensionError);
  CHECK_THROWS_AS(sym_eig(Matrix{{1, 2}, {0, 1}}), SymmetryError);
}

TEST_CASE("sym_eig orthonormality and reconstruction on random symmetric matrices") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  for (std::size_t p : {1u, 2u, 3u, 5u, 10u, 25u}) {
    Matrix a(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i; j < p; ++j) a(i, j) = a(j, i) = n(rng);
    const SymEig e = sym_eig(a);
    for (std::size_t i = 1; i < p; ++i) CHECK(e.values[i - 1] >= e.values[i]);
    const Matrix utu = e.vectors.transposed() * e.vectors;
    CHECK(max_abs_diff(utu, Matrix::identity(p)) <= 1e-10);
    CHECK(relative_frobenius_diff(reconstruct(e), a) <= 1e-8);
  }
}

TEST_CASE("eigenvalues of SPD input are positive") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const SymEig e = sym_eig(oracle::random_spd(rng, 6));
    for (double v : e.values) CHECK(v > 0.0);
  }
}

TEST_CASE("invert_spd fixed cases") {
  CHECK(max_abs_diff(invert_spd(Matrix{{2, 0}, {0, 4}}), Matrix{{0.5, 0}, {0, 0.25}}) < 1e-15);
  CHECK(max_abs_diff(invert_spd(Matrix::identity(3)), Matrix::identity(3)) < 1e-15);
  const Matrix expected{{2.0 / 3.0, -1.0 / 3.0}, {-1.0 / 3.0, 2.0 / 3.0}};
  CHECK(max_abs_diff(invert_spd(Matrix{{2, 1}, {1, 2}}), expected) < 1e-14);
}

TEST_CASE("invert_spd singular input carries a condition estimate") {
  try {
    invert_spd(Matrix{{1, 1}, {1, 1}});
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(e.condition() > kConditionLimit);
  }
  CHECK_THROWS_AS(invert_spd(Matrix{{1, 0}, {0, 1e-13}}), SingularityError);
  CHECK_THROWS_AS(invert_spd(Matrix{{1, 0}, {0, -1}}), SingularityError);
}

TEST_CASE("invert_spd matches Gauss-Jordan and is an involution") {
  std::mt19937_64 rng(3);
  for (std::size_t p : {2u, 5u, 12u, 20u}) {
    const Matrix a = oracle::random_spd(rng, p);
    const Matrix inv = invert_spd(a);
    CHECK(max_abs_diff(a * inv, Matrix::identity(p)) <= 1e-8);
    CHECK(relative_frobenius_diff(inv, oracle::inverse_gj(a)) <= 1e-10);
    CHECK(relative_frobenius_diff(invert_spd(inv), a) <= 1e-6);
  }
}

TEST_CASE("sherman_morrison_update") {
  SUBCASE("identity plus e1 e1^T") {
    const Matrix r = sherman_morrison_update(Matrix::identity(2), Vector{1.0, 0.0});
    CHECK(max_abs_diff(r, Matrix{{0.5, 0}, {0, 1}}) < 1e-15);
  }
  SUBCASE("zero update is a no-op") {
    CHECK(sherman_morrison_update(Matrix::identity(2), Vector{0.0, 0.0}) == Matrix::identity(2));
  }
  SUBCASE("random 5x5 matches direct inversion") {
    std::mt19937_64 rng(5);
    const Matrix a = oracle::random_spd(rng, 5);
    const Vector x = oracle::normal_vector(rng, 5);
    const Matrix updated = sherman_morrison_update(invert_spd(a), x);
    CHECK(relative_frobenius_diff(updated, oracle::inverse_gj(outer_added(a, x))) <= 1e-8);
  }
  SUBCASE("degenerate denominator") {
    // A^{-1} = -I is not the inverse of an SPD matrix; 1 + x^T A^{-1} x = 0.
    Matrix bad = Matrix::identity(2);
    bad(0, 0) = -1.0;
    bad(1, 1) = -1.0;
    CHECK_THROWS_AS(sherman_morrison_update(bad, Vector{1.0, 0.0}), DegenerateUpdateError);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(sherman_morrison_update(Matrix::identity(2), Vector{1.0}), DimensionError);
  }
}

TEST_CASE("property: chained rank-one updates track direct inversion") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> dim(1, 20);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t p = dim(rng);
    Matrix a = oracle::random_spd(rng, p);
    Matrix inv = invert_spd(a);
    for (int k = 0; k < 100; ++k) {
      const Vector x = oracle::normal_vector(rng, p);
      sherman_morrison_update_inplace(inv, x);
      a = outer_added(a, x);
    }
    CHECK(relative_frobenius_diff(inv, oracle::inverse_gj(a)) <= 1e-6);
  }
}

TEST_CASE("logdet_spd") {
  CHECK(logdet_spd(Matrix::identity(4)) == doctest::Approx(0.0));
  CHECK(logdet_spd(Matrix{{2, 0}, {0, 3}}) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  CHECK(logdet_spd(Matrix{{2, 1}, {1, 2}}) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(logdet_spd(Matrix{{1, 2}, {2, 1}}), SingularityError);
}

TEST_CASE("property: logdet equals the sum of log eigenvalues and the LU oracle") {
  std::mt19937_64 rng(23);
  for (std::size_t p : {1u, 3u, 8u, 15u}) {
    const Matrix a = oracle::random_spd(rng, p);
    double s = 0.0;
    for (double v : sym_eig(a).values) s += std::log(v);
    CHECK(logdet_spd(a) == doctest::Approx(s).epsilon(1e-10));
    CHECK(logdet_spd(a) == doctest::Approx(oracle::logdet_lu(a)).epsilon(1e-10));
  }
}

TEST_CASE("property: determinant ratio identity for a rank-one update") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 1 + trial % 10;
    const Matrix a = oracle::random_spd(rng, p);
    const Vector x = oracle::normal_vector(rng, p);
    const Matrix b = outer_added(a, x);
    const double lhs = logdet_spd(b) - logdet_spd(a);
    const double rhs = -std::log(1.0 - quadratic_form(invert_spd(b), x));
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(lhs)));
  }
}
