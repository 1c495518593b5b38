#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpcapp/matrix.hpp"
#include "cpcapp/statistics.hpp"

namespace cpcapp {

enum class Method { kPca, kCpca, kCpcaPlusPlus };

std::string_view method_name(Method m);
/// Accepts "pca", "cpca" and "cpca++". Throws ArgumentError otherwise.
Method parse_method(std::string_view name);

/// A learned M×K transform together with what is needed to apply it.
struct FilterBank {
  Method method = Method::kPca;
  Matrix f;                      // M×K, unit-norm columns
  Vector train_mean_bg;          // zeros for PCA
  Vector train_mean_fg;
  Vector eigenvalues;            // K values, non-increasing
  std::optional<double> alpha;   // cPCA only
  double loading = 0.0;

  std::size_t features() const { return f.rows(); }
  std::size_t k() const { return f.cols(); }
};

/// Low-dimensional representation, K×N.
struct Projection {
  Matrix y;
};

/// How transform() and score_patches() remove the mean of incoming data.
enum class Centering {
  kOwnMean,       // subtract the batch's own mean
  kTrainingMean,  // subtract the bank's foreground training mean
};

/// PCA: top-k eigenvectors of (1/N)·Z·Zᵀ after centering. Needs N ≥ 2.
FilterBank fit_pca(const DataMatrix& data, std::size_t k);

/// PCA from an already formed second moment and its mean.
FilterBank fit_pca_moment(const Matrix& r, const Vector& mean, std::size_t k);

/// Contrastive PCA at one contrast value: top-k eigenvectors (largest signed
/// eigenvalues) of R_f − alpha·R_b.
FilterBank fit_cpca(const CovariancePair& pair, std::size_t k, double alpha);

/// fit_cpca for every alpha, in order. With threads > 1 the alphas are
/// evaluated concurrently; each evaluation is independent, so the result does
/// not depend on scheduling.
std::vector<FilterBank> sweep_cpca(const CovariancePair& pair, std::size_t k,
                                   const std::vector<double>& alphas, unsigned threads = 1);

/// {0} followed by 40 log-spaced points on [1e-3, 1e3].
std::vector<double> default_alpha_grid();

/// Parses an alpha grid: "default", a comma-separated list, or
/// "log:LO:HI:COUNT" (optionally prefixed with "0+" to prepend zero).
std::vector<double> parse_alpha_grid(std::string_view spec);

/// cPCA++: top-k eigenvectors of Q = (R_b + loading·I)⁻¹·R_f. One symmetric
/// eigendecomposition, no contrast parameter.
FilterBank fit_cpcapp(const CovariancePair& pair, std::size_t k);

/// y = Fᵀ·(centered data).
Projection transform(const FilterBank& bank, const DataMatrix& data,
                     Centering centering = Centering::kOwnMean);

// Model file: `cpcapp-model v1`, then `method M K alpha loading`, the two
// means, the eigenvalues and M rows of F, all as CSV with 17 significant
// digits. An optional factor block may follow (see factorization.hpp).
void write_filter_bank(std::ostream& os, const FilterBank& bank);
FilterBank read_filter_bank(std::istream& is);

}  // namespace cpcapp
