#pragma once

#include <cstddef>
#include <optional>

#include "cpcapp/matrix.hpp"

namespace cpcapp {

/// M features × N samples, one sample per column.
class DataMatrix {
 public:
  DataMatrix() = default;
  /// Wraps raw (uncentered) samples. Throws ArgumentError if N = 0 or any
  /// entry is non-finite.
  explicit DataMatrix(Matrix values);

  std::size_t features() const { return values_.rows(); }
  std::size_t samples() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  bool centered() const { return mean_.has_value(); }
  /// Mean that was subtracted; present iff centered().
  const std::optional<Vector>& mean() const { return mean_; }

  /// Sample j as a length-M vector.
  Vector sample(std::size_t j) const { return values_.column(j); }

  /// Builds a DataMatrix from sample-major rows (one sample per entry).
  static DataMatrix from_samples(std::span<const Vector> samples);

 private:
  friend DataMatrix center(const DataMatrix& raw);
  friend DataMatrix center_with(const DataMatrix& raw, std::span<const double> mean);
  Matrix values_;
  std::optional<Vector> mean_;
};

/// Background/foreground second moments. r_b is stored unloaded; the
/// positive-definite background matrix is r_b + loading·I.
struct CovariancePair {
  Matrix r_b;
  Matrix r_f;
  double loading = 0.0;
  std::size_t n_b = 0;
  std::size_t n_f = 0;
  Vector mean_b;
  Vector mean_f;

  std::size_t features() const { return r_b.rows(); }
  /// r_b + loading·I
  Matrix loaded_r_b() const;
};

/// Per-feature mean removal. Idempotent: an already centered input is returned
/// unchanged.
DataMatrix center(const DataMatrix& raw);

/// Subtracts a caller-supplied mean (e.g. a training mean) instead of the
/// sample mean. The result is flagged centered and records that mean.
DataMatrix center_with(const DataMatrix& raw, std::span<const double> mean);

/// (1/N)·Z·Zᵀ. Requires a centered input (StateError otherwise).
Matrix second_moment(const DataMatrix& z);

/// Centers both partitions, forms R_b and R_f and applies the automatic
/// diagonal-loading rule to R_b.
CovariancePair build_covariance_pair(const DataMatrix& bg, const DataMatrix& fg);

}  // namespace cpcapp
