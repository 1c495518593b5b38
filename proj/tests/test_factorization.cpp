#include <cmath>
#include <sstream>

#include "cpcapp/datagen.hpp"
#include "cpcapp/errors.hpp"
#include "cpcapp/factorization.hpp"
#include "cpcapp/linalg.hpp"
#include "cpcapp/reducers.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cpcapp;
using testing_support::pearson;
using testing_support::random_matrix;
using testing_support::random_spd;

namespace {

CovariancePair pair_from(const Matrix& r_b, const Matrix& r_f) {
  CovariancePair p;
  p.r_b = r_b;
  p.r_f = r_f;
  p.n_b = p.n_f = 100;
  p.mean_b.assign(r_b.rows(), 0.0);
  p.mean_f.assign(r_b.rows(), 0.0);
  return p;
}

double biorthogonality_error(const FactorModel& m) {
  return max_abs(transpose_times(m.f, m.w) - Matrix::identity(m.k()));
}

double idempotence_error(const FactorModel& m) {
  const Matrix p = times_transpose(m.w, m.f);
  return frobenius_norm(p * p - p) / frobenius_norm(p);
}

double abs_cos(std::span<const double> a, std::span<const double> b) {
  return std::abs(dot(a, b)) / (norm2(a) * norm2(b));
}

}  // namespace

TEST_CASE("recover_w with identity background returns W = F") {
  std::mt19937_64 gen(1);
  const CovariancePair p = pair_from(Matrix::identity(5), random_spd(5, gen));
  const FilterBank b = fit_cpcapp(p, 2);
  const FactorModel m = recover_w(p, b);
  CHECK(max_abs(m.w - b.f) < 1e-12);
}

TEST_CASE("recover_w on the haystack spans c") {
  const Haystack h = gen_haystack(SyntheticSpec::defaults(DatasetKind::kHaystack));
  const CovariancePair p = pair_from(h.r_b, h.r_f);
  const FactorModel m = recover_w(p, fit_cpcapp(p, 1));
  CHECK(abs_cos(m.w.column(0), h.c) >= 0.99);
}

TEST_CASE("recover_w: 8x3 biorthogonality and diagonal Gram") {
  std::mt19937_64 gen(2);
  const CovariancePair p = pair_from(random_spd(8, gen), random_spd(8, gen));
  const FilterBank b = fit_cpcapp(p, 3);
  const FactorModel m = recover_w(p, b);
  CHECK(biorthogonality_error(m) < 1e-8);
  const Matrix g = transpose_times(b.f, p.r_b * b.f);
  double diag = 0, off = 0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) (i == j ? diag : off) += g(i, j) * g(i, j);
  CHECK(std::sqrt(off) < 1e-6 * std::sqrt(diag));
  for (double l : m.lambda_diag) CHECK(l > 0.0);
}

TEST_CASE("recover_w: singular F^T R_b F raises RankError") {
  FilterBank b;
  b.f = Matrix{{1, 1}, {0, 0}, {0, 0}};
  CHECK_THROWS_AS(recover_w(pair_from(Matrix::identity(3), Matrix::identity(3)), b), RankError);
}

TEST_CASE("property: biorthogonality and idempotence on random SPD and PSD instances") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + (trial * 7) % 49;
    const std::size_t k = 1 + trial % std::min<std::size_t>(m, 6);
    Matrix r_b;
    if (trial % 2 == 0) {
      r_b = random_spd(m, gen);
    } else {  // rank-deficient Gram, which build-time loading must repair
      const Matrix x = random_matrix(m, m / 2 + 1, gen);
      r_b = times_transpose(x, x);
      symmetrize(r_b);
    }
    CovariancePair p = pair_from(r_b, random_spd(m, gen));
    p.loading = auto_loading(r_b);
    const FactorModel f = recover_w(p, fit_cpcapp(p, k));
    CHECK(biorthogonality_error(f) < 1e-7);
    CHECK(idempotence_error(f) < 1e-6);
  }
}

TEST_CASE("denoise examples") {
  std::mt19937_64 gen(4);
  const CovariancePair p = pair_from(random_spd(6, gen), random_spd(6, gen));
  const FactorModel m = recover_w(p, fit_cpcapp(p, 2));
  const Vector y{0.7, -1.3};
  const Vector z = m.w * y;
  const Vector out = denoise(m, z);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(out[i] == doctest::Approx(z[i]).epsilon(1e-12));

  // A vector in the null space of Fᵀ maps to zero.
  const Matrix q = orthonormalize(Matrix::from_columns(std::vector<Vector>{m.f.column(0), m.f.column(1),
                                                                           Vector{1, 2, 3, 4, 5, 6}}));
  const Vector null_dir = q.column(2);
  for (double v : denoise(m, null_dir)) CHECK(std::abs(v) < 1e-12);

  CHECK_THROWS_AS(denoise(m, Vector(5, 0.0)), ShapeError);
  const Vector once = denoise(m, Vector{1, -1, 2, 0, 3, 1});
  const Vector twice = denoise(m, once);
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(twice[i] == doctest::Approx(once[i]).epsilon(1e-10));
}

TEST_CASE("denoise with a mean") {
  FactorModel m;
  m.f = m.w = Matrix{{1}, {0}};
  m.lambda_diag = {1};
  const Vector out = denoise(m, Vector{5, 9}, Vector{1, 1});
  CHECK(out == Vector{5, 1});
}

TEST_CASE("truncated keeps the leading components") {
  std::mt19937_64 gen(5);
  const CovariancePair p = pair_from(random_spd(7, gen), random_spd(7, gen));
  const FactorModel m = recover_w(p, fit_cpcapp(p, 4));
  const FactorModel t = m.truncated(2);
  CHECK(t.k() == 2);
  CHECK(biorthogonality_error(t) < 1e-8);
  CHECK_THROWS_AS(m.truncated(5), ArgumentError);
}

TEST_CASE("glrt_statistic examples") {
  std::mt19937_64 gen(6);
  const DataMatrix z = center(DataMatrix(random_matrix(5, 200, gen)));
  for (std::size_t k = 1; k <= 3; ++k) {
    const Matrix w = random_matrix(5, k, gen);
    CHECK(glrt_statistic(z, z, w) == doctest::Approx(std::pow(2.0, k)).epsilon(1e-6));
  }
  const DataMatrix zeros = center(DataMatrix(Matrix(5, 200, 0.0)));
  CHECK(glrt_statistic(zeros, z, random_matrix(5, 2, gen)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(glrt_statistic(DataMatrix(random_matrix(5, 10, gen)), z, random_matrix(5, 1, gen)), StateError);
  CHECK_THROWS_AS(glrt_statistic(z, z, Matrix{{1, 2}, {1, 2}, {1, 2}, {1, 2}, {1, 2}}), RankError);
}

TEST_CASE("property: glrt_statistic is >= 1 and invariant to W -> W·A") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 3 + trial % 6;
    const std::size_t k = 1 + trial % 3;
    const DataMatrix zf = center(DataMatrix(random_matrix(m, 40 + trial, gen)));
    const DataMatrix zb = center(DataMatrix(random_matrix(m, 60, gen)));
    const Matrix w = random_matrix(m, k, gen);
    Matrix a = random_matrix(k, k, gen);
    for (std::size_t i = 0; i < k; ++i) a(i, i) += 3.0;
    const double g = glrt_statistic(zf, zb, w);
    CHECK(g >= 1.0 - 1e-9);
    CHECK(glrt_statistic(zf, zb, w * a) == doctest::Approx(g).epsilon(1e-7));
  }
}

TEST_CASE("GLRT: the cPCA++ basis beats random bases on haystack samples") {
  const Haystack h = gen_haystack(SyntheticSpec::defaults(DatasetKind::kHaystack, 31));
  Rng rng(31);
  const DataMatrix fg = center(sample_gaussian(h.r_f, 4000, rng));
  const DataMatrix bg = center(sample_gaussian(h.r_b, 4000, rng));
  const CovariancePair p = build_covariance_pair(bg, fg);
  const FactorModel best = recover_w(p, fit_cpcapp(p, 1));
  const double g_best = glrt_statistic(fg, bg, best.w);
  std::mt19937_64 gen(8);
  for (int i = 0; i < 100; ++i) CHECK(glrt_statistic(fg, bg, random_matrix(4, 1, gen)) <= g_best * (1 + 1e-12));
}

TEST_CASE("factor block round-trips and is optional") {
  std::mt19937_64 gen(9);
  const CovariancePair p = pair_from(random_spd(4, gen), random_spd(4, gen));
  const FilterBank b = fit_cpcapp(p, 2);
  const FactorModel m = recover_w(p, b);
  std::stringstream ss;
  write_filter_bank(ss, b);
  write_factor_block(ss, m);
  const FilterBank rb = read_filter_bank(ss);
  const auto rm = read_factor_block(ss, rb);
  REQUIRE(rm.has_value());
  CHECK(rm->w == m.w);
  CHECK(rm->lambda_diag == m.lambda_diag);

  std::stringstream plain;
  write_filter_bank(plain, b);
  const FilterBank pb = read_filter_bank(plain);
  CHECK_FALSE(read_factor_block(plain, pb).has_value());

  std::stringstream broken;
  write_filter_bank(broken, b);
  broken << "W\n1,2\n0.5\n";
  const FilterBank bb = read_filter_bank(broken);
  CHECK_THROWS_AS(read_factor_block(broken, bb), ParseError);
}

TEST_CASE("textured digits: cPCA++ reconstruction tracks the clean glyph better than PCA") {
  SyntheticSpec spec = SyntheticSpec::defaults(DatasetKind::kTexturedDigits, 4);
  spec.n_fg = spec.n_bg = 1000;
  const TexturedDigits d = gen_textured_digits(spec);
  const CovariancePair p = build_covariance_pair(d.background, d.foreground.data);
  const FactorModel contrast = recover_w(p, fit_cpcapp(p, 3));
  const FactorModel plain = orthogonal_factor_model(fit_pca_moment(p.r_f, p.mean_f, 3));
  double c_contrast = 0, c_plain = 0;
  const std::size_t n = d.foreground.data.samples();
  for (std::size_t j = 0; j < n; ++j) {
    const Vector z = d.foreground.data.sample(j);
    const Vector clean = d.clean.sample(j);
    c_contrast += pearson(denoise(contrast, z, p.mean_f), clean);
    c_plain += pearson(denoise(plain, z, p.mean_f), clean);
  }
  c_contrast /= static_cast<double>(n);
  c_plain /= static_cast<double>(n);
  INFO("cpca++ " << c_contrast << " pca " << c_plain);
  CHECK(c_contrast - c_plain >= 0.1);
}
