#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aetas::linalg {

// Dense row-major double matrix. Dimensions are fixed at construction.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool all_finite() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
// max |a - b| over entries; matrices must have equal shape.
double max_abs_diff(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
// Cosine clamped to [-1, 1] so downstream drift stays in [0, 2].
double cosine(std::span<const double> a, std::span<const double> b);

// Thin SVD, m = u * diag(sigma) * v^T. For an m-by-n input with r =
// min(m, n): u is m-by-r, sigma has r entries (non-negative, descending),
// v is n-by-r. Columns of u and v are orthonormal.
struct SvdResult {
  Matrix u;
  std::vector<double> sigma;
  Matrix v;
};

// One-sided Jacobi; accurate to ~1e-13 relative for the sizes this pipeline
// uses (up to a few hundred). Throws NumericError if the sweep cap is hit.
SvdResult svd(const Matrix& m);

// Centers the points and projects onto the top-k principal directions.
// Component signs are fixed so the largest-magnitude loading of each
// direction is positive, making outputs reproducible.
Matrix pca_project(const Matrix& points, std::size_t k);

struct RegressionResult {
  std::vector<double> coefficients;  // [intercept, slopes...] in design order
  std::vector<double> std_errors;
  std::vector<double> t_stats;
  std::vector<double> p_values;  // two-sided, t distribution with n-p dof
  double r_squared = 0.0;
  std::size_t dof = 0;
};

// Ordinary least squares for a design matrix that already carries its
// intercept column. Throws DataError on rank deficiency or n <= p.
RegressionResult ols(const std::vector<double>& y, const Matrix& design);

// Regularized incomplete beta I_x(a, b) via continued fraction.
double incomplete_beta(double a, double b, double x);
// CDF of Student's t with dof degrees of freedom.
double student_t_cdf(double t, double dof);

}  // namespace aetas::linalg
