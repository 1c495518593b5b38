#pragma once

#include <iosfwd>
#include <optional>

#include "cpcapp/matrix.hpp"
#include "cpcapp/reducers.hpp"
#include "cpcapp/statistics.hpp"

namespace cpcapp {

/// Basis W paired with filters F so that Fᵀ·W = I. W's columns are the
/// dictionary atoms; they are deliberately not normalised since that would
/// break the pairing.
struct FactorModel {
  Matrix w;
  Matrix f;
  Vector lambda_diag;

  std::size_t features() const { return f.rows(); }
  std::size_t k() const { return f.cols(); }
  /// Model restricted to the first k components (still biorthogonal).
  FactorModel truncated(std::size_t k) const;
};

/// W = R_b·F·(Fᵀ·R_b·F)⁻¹ with R_b the loaded background moment of `pair`.
/// For a cPCA++ bank Fᵀ·R_b·F is diagonal and lambda_diag holds that diagonal.
/// Throws RankError if Fᵀ·R_b·F is singular.
FactorModel recover_w(const CovariancePair& pair, const FilterBank& bank);

/// Orthogonal pairing W = F for banks with orthonormal filters (PCA, cPCA).
FactorModel orthogonal_factor_model(const FilterBank& bank);

/// ẑ = W·Fᵀ·z.
Vector denoise(const FactorModel& model, std::span<const double> z);

/// mean + W·Fᵀ·(z − mean).
Vector denoise(const FactorModel& model, std::span<const double> z, std::span<const double> mean);

/// |Wᵀ·R_b⁻¹·W| / |Wᵀ·((N_f/N_b)·R_f + R_b)⁻¹·W| for centered partitions.
/// R_b receives the automatic loading rule. Throws RankError if w is rank
/// deficient and StateError if either input is not centered.
double glrt_statistic(const DataMatrix& z_f, const DataMatrix& z_b, const Matrix& w);

/// Same statistic from precomputed second moments; r_b must be positive definite.
double glrt_statistic(const Matrix& r_f, const Matrix& r_b, double nf_over_nb, const Matrix& w);

/// Appends the `W` block (marker line, lambda_diag, then M rows of W).
void write_factor_block(std::ostream& os, const FactorModel& model);

/// Reads the block written by write_factor_block, if present.
std::optional<FactorModel> read_factor_block(std::istream& is, const FilterBank& bank);

}  // namespace cpcapp
