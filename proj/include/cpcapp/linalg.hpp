#pragma once

#include <cstddef>
#include <cstdint>

#include "cpcapp/matrix.hpp"

namespace cpcapp {

/// Eigenpairs of a real symmetric problem. values are non-increasing and
/// column i of vectors is the unit-norm eigenvector for values[i].
struct EigenResult {
  Vector values;
  Matrix vectors;
};

/// Diagonal loading constants. Whenever the smallest eigenvalue of a
/// background second moment falls below kFloorFactor·trace/M, the matrix is
/// loaded with rho = kRhoFactor·trace/M.
struct LoadingRule {
  static constexpr double kFloorFactor = 1e-10;
  static constexpr double kRhoFactor = 1e-6;
  /// Used when the trace itself is zero (all-constant background).
  static constexpr double kZeroTraceRho = 1e-6;
};

/// Full eigendecomposition of a symmetric matrix: Householder reduction to
/// tridiagonal form followed by implicit-shift QL.
///
/// Eigenvectors follow a deterministic sign convention: the component with the
/// largest magnitude is positive (lowest index wins a tie). Throws ShapeError
/// for non-square or asymmetric input and ConvergenceError if QL stalls.
EigenResult sym_eig(const Matrix& a);

/// Leading k eigenpairs only. Same reduction as sym_eig, but eigenvectors are
/// obtained by inverse iteration on the tridiagonal form, which avoids the
/// O(M³) rotation accumulation when k ≪ M.
EigenResult sym_eig_top(const Matrix& a, std::size_t k);

/// Number of symmetric eigendecompositions performed by this process so far.
/// Instrumentation for comparing methods; thread-safe.
std::uint64_t eigendecomposition_count();

/// Symmetric B with B·a·B = I. Throws DefinitenessError if any eigenvalue of
/// a is not strictly positive.
Matrix inv_sqrt_sym(const Matrix& a);

/// a + rho·I.
Matrix diagonal_load(const Matrix& a, double rho);

/// Loading factor required by LoadingRule for r_b (0 when none is needed).
/// The eigenvalue floor is tested with a Cholesky factorisation of the shifted
/// matrix, so no eigendecomposition is spent on it.
double auto_loading(const Matrix& r_b);

/// Lower-triangular L with L·Lᵀ = a. Throws DefinitenessError when a is not
/// numerically positive definite.
Matrix cholesky(const Matrix& a);

bool is_positive_definite(const Matrix& a);

/// Solves a·x = b by LU with partial pivoting. Throws RankError when a is
/// singular to working precision.
Matrix solve(const Matrix& a, const Matrix& b);

/// log|det a| for a symmetric positive-definite matrix (via Cholesky). Throws
/// RankError if a is not positive definite.
double log_det_spd(const Matrix& a);

/// How Q = R_b⁻¹R_f is brought to symmetric form.
enum class Whitening {
  /// R_b = L·Lᵀ, R = L⁻¹R_f L⁻ᵀ, v ∝ L⁻ᵀx.
  kCholesky,
  /// R = R_b^{-1/2} R_f R_b^{-1/2}, v ∝ R_b^{-1/2}x. Costs a second
  /// eigendecomposition (of R_b).
  kInverseSqrt,
};

/// Leading k eigenpairs of the (generally non-symmetric) Q = r_b⁻¹·r_f via a
/// symmetric similarity transform. r_b must already be positive definite.
/// Returned vectors are unit norm, eigenvalues are real and clamped at zero
/// when round-off pushes them marginally negative.
EigenResult q_eig(const Matrix& r_b, const Matrix& r_f, std::size_t k,
                  Whitening whitening = Whitening::kCholesky);

/// Largest principal angle (radians) between the column spans of a and b.
/// Columns of each argument must be linearly independent.
double max_principal_angle(const Matrix& a, const Matrix& b);

/// Orthonormal basis of the column span (modified Gram-Schmidt, two passes).
Matrix orthonormalize(const Matrix& a);

}  // namespace cpcapp
