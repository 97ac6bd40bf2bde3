#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace stream_al {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Row-major construction; every row must have the same length.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  bool all_finite() const noexcept;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double frobenius_norm(const Matrix& a);
/// ||a - b||_F / max(||b||_F, tiny).
double relative_frobenius_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const Matrix& a, const Matrix& b);

/// x^T a x for square a.
double quadratic_form(const Matrix& a, std::span<const double> x);

/// Eigendecomposition of a symmetric matrix. Column i of `vectors` pairs with
/// `values[i]`; values are sorted in descending order.
struct SymEig {
  Vector values;
  Matrix vectors;
};

/// Cyclic Jacobi eigensolver. Throws DimensionError for non-square input and
/// SymmetryError when |a_ij - a_ji| exceeds 1e-10 (scaled by max |a|).
SymEig sym_eig(const Matrix& a);

/// Inverse of a symmetric positive definite matrix. Throws SingularityError
/// when the smallest eigenvalue is not above 1e-12 times the largest.
Matrix invert_spd(const Matrix& a);

/// Inverse of A + x x^T given A^{-1}, in O(p^2). Throws DegenerateUpdateError
/// when 1 + x^T A^{-1} x <= 1e-12.
Matrix sherman_morrison_update(const Matrix& a_inv, std::span<const double> x);
/// In-place variant used on the hot path.
void sherman_morrison_update_inplace(Matrix& a_inv, std::span<const double> x);

/// log|A| for SPD A via Cholesky. Throws SingularityError if A is not
/// positive definite.
double logdet_spd(const Matrix& a);

/// Lower-triangular Cholesky factor L with A = L L^T.
Matrix cholesky(const Matrix& a);

/// Largest-to-smallest condition cutoff shared by invert_spd and callers.
inline constexpr double kConditionLimit = 1e12;

}  // namespace stream_al
