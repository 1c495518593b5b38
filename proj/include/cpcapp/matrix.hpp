#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cpcapp {

using Vector = std::vector<double>;

/// Dense real matrix, row-major storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  /// Builds a matrix whose columns are the given vectors (all the same length).
  static Matrix from_columns(std::span<const Vector> cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  Vector column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> v);
  /// First `n` columns.
  Matrix left_columns(std::size_t n) const;

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Matrix transposed() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

/// aᵀ·b without materialising the transpose.
Matrix transpose_times(const Matrix& a, const Matrix& b);
/// a·bᵀ without materialising the transpose.
Matrix times_transpose(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
double trace(const Matrix& a);
bool all_finite(const Matrix& a);

/// Largest |a_ij - a_ji|; zero for a symmetric matrix.
double asymmetry(const Matrix& a);
/// Overwrites a with (a + aᵀ)/2.
void symmetrize(Matrix& a);

}  // namespace cpcapp
