#pragma once
// Shared helpers for the unit tests: random matrices and Eigen conversions.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <span>

#include "cpcapp/matrix.hpp"

namespace testing_support {

inline cpcapp::Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& gen, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  cpcapp::Matrix m(r, c);
  for (auto& v : m.data()) v = u(gen);
  return m;
}

inline cpcapp::Matrix random_symmetric(std::size_t n, std::mt19937_64& gen) {
  cpcapp::Matrix a = random_matrix(n, n, gen);
  cpcapp::symmetrize(a);
  return a;
}

/// B·Bᵀ/c + shift·I, positive definite for shift > 0.
inline cpcapp::Matrix random_spd(std::size_t n, std::mt19937_64& gen, double shift = 0.1) {
  const cpcapp::Matrix b = random_matrix(n, n + 3, gen);
  cpcapp::Matrix a = cpcapp::times_transpose(b, b);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += shift;
  cpcapp::symmetrize(a);
  return a;
}

inline Eigen::MatrixXd to_eigen(const cpcapp::Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

inline cpcapp::Matrix from_eigen(const Eigen::MatrixXd& e) {
  cpcapp::Matrix m(e.rows(), e.cols());
  for (Eigen::Index r = 0; r < e.rows(); ++r)
    for (Eigen::Index c = 0; c < e.cols(); ++c) m(r, c) = e(r, c);
  return m;
}

/// max_i ‖a·v_i − λ_i·v_i‖.
inline double eigen_residual(const cpcapp::Matrix& a, const cpcapp::Vector& values, const cpcapp::Matrix& vectors) {
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const cpcapp::Vector v = vectors.column(i);
    cpcapp::Vector av = a * v;
    for (std::size_t j = 0; j < v.size(); ++j) av[j] -= values[i] * v[j];
    worst = std::max(worst, cpcapp::norm2(av));
  }
  return worst;
}

/// Pearson correlation of two equal-length sequences.
inline double pearson(std::span<const double> a, std::span<const double> b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace testing_support
