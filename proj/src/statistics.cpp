#include "cpcapp/statistics.hpp"

#include <cmath>
#include <string>

#include "cpcapp/errors.hpp"
#include "cpcapp/linalg.hpp"

namespace cpcapp {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.cols() == 0 || values_.rows() == 0) {
    throw ArgumentError("DataMatrix: need at least one feature and one sample");
  }
  if (!all_finite(values_)) throw ArgumentError("DataMatrix: non-finite value");
}

DataMatrix DataMatrix::from_samples(std::span<const Vector> samples) {
  if (samples.empty()) throw ArgumentError("DataMatrix: no samples");
  const std::size_t m = samples.front().size();
  Matrix v(m, samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (samples[j].size() != m) {
      throw ShapeError("DataMatrix: sample " + std::to_string(j) + " has " +
                       std::to_string(samples[j].size()) + " features, expected " +
                       std::to_string(m));
    }
    v.set_column(j, samples[j]);
  }
  return DataMatrix(std::move(v));
}

Matrix CovariancePair::loaded_r_b() const { return diagonal_load(r_b, loading); }

DataMatrix center(const DataMatrix& raw) {
  if (raw.samples() == 0) throw ArgumentError("center: empty data matrix");
  if (raw.centered()) return raw;
  const std::size_t m = raw.features();
  const double n = static_cast<double>(raw.samples());
  Vector mean(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (double x : raw.values().row(i)) s += x;
    mean[i] = s / n;
  }
  return center_with(raw, mean);
}

DataMatrix center_with(const DataMatrix& raw, std::span<const double> mean) {
  if (raw.samples() == 0) throw ArgumentError("center: empty data matrix");
  if (mean.size() != raw.features()) throw ShapeError("center_with: mean length mismatch");
  DataMatrix out;
  out.values_ = raw.values();
  for (std::size_t i = 0; i < out.values_.rows(); ++i) {
    for (double& x : out.values_.row(i)) x -= mean[i];
  }
  // Record the total offset from the raw data so repeated centering composes.
  Vector total(mean.begin(), mean.end());
  if (raw.mean_) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += (*raw.mean_)[i];
  }
  out.mean_ = std::move(total);
  return out;
}

Matrix second_moment(const DataMatrix& z) {
  if (!z.centered()) throw StateError("second_moment: data matrix is not centered");
  const Matrix& v = z.values();
  const std::size_t m = v.rows();
  const double inv_n = 1.0 / static_cast<double>(v.cols());
  Matrix r(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double s = dot(v.row(i), v.row(j)) * inv_n;
      r(i, j) = s;
      r(j, i) = s;
    }
  }
  return r;
}

CovariancePair build_covariance_pair(const DataMatrix& bg, const DataMatrix& fg) {
  if (bg.features() != fg.features()) {
    throw ShapeError("build_covariance_pair: background has " + std::to_string(bg.features()) +
                     " features, foreground has " + std::to_string(fg.features()));
  }
  const DataMatrix zb = center(bg);
  const DataMatrix zf = center(fg);
  CovariancePair pair;
  pair.r_b = second_moment(zb);
  pair.r_f = second_moment(zf);
  pair.n_b = bg.samples();
  pair.n_f = fg.samples();
  pair.mean_b = *zb.mean();
  pair.mean_f = *zf.mean();
  pair.loading = auto_loading(pair.r_b);
  return pair;
}

}  // namespace cpcapp
