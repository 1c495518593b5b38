#include "cpcapp/factorization.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "cpcapp/errors.hpp"
#include "cpcapp/linalg.hpp"
#include "cpcapp/text.hpp"

namespace cpcapp {

FactorModel FactorModel::truncated(std::size_t k) const {
  if (k < 1 || k > this->k()) throw ArgumentError("FactorModel: k out of range");
  FactorModel out;
  out.w = w.left_columns(k);
  out.f = f.left_columns(k);
  out.lambda_diag.assign(lambda_diag.begin(), lambda_diag.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

FactorModel recover_w(const CovariancePair& pair, const FilterBank& bank) {
  if (bank.features() != pair.features()) throw ShapeError("recover_w: bank and pair differ in M");
  const Matrix r_b = pair.loaded_r_b();
  const Matrix rf = r_b * bank.f;                 // M×K
  Matrix gram = transpose_times(bank.f, rf);      // K×K, FᵀR_bF
  symmetrize(gram);
  // W = R_bF·G⁻¹  ⇔  Wᵀ = G⁻¹·(R_bF)ᵀ since G is symmetric.
  const Matrix wt = solve(gram, rf.transposed());
  FactorModel model;
  model.w = wt.transposed();
  model.f = bank.f;
  model.lambda_diag.resize(bank.k());
  for (std::size_t i = 0; i < bank.k(); ++i) model.lambda_diag[i] = gram(i, i);
  return model;
}

FactorModel orthogonal_factor_model(const FilterBank& bank) {
  FactorModel model;
  model.w = bank.f;
  model.f = bank.f;
  model.lambda_diag.assign(bank.k(), 1.0);
  return model;
}

Vector denoise(const FactorModel& model, std::span<const double> z) {
  if (z.size() != model.features()) {
    throw ShapeError("denoise: vector has " + std::to_string(z.size()) + " entries, model expects " +
                     std::to_string(model.features()));
  }
  Vector y(model.k(), 0.0);
  for (std::size_t r = 0; r < model.f.rows(); ++r) {
    const auto fr = model.f.row(r);
    for (std::size_t c = 0; c < y.size(); ++c) y[c] += fr[c] * z[r];
  }
  return model.w * y;
}

Vector denoise(const FactorModel& model, std::span<const double> z, std::span<const double> mean) {
  if (mean.size() != z.size()) throw ShapeError("denoise: mean length mismatch");
  Vector centered(z.begin(), z.end());
  for (std::size_t i = 0; i < centered.size(); ++i) centered[i] -= mean[i];
  Vector out = denoise(model, centered);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += mean[i];
  return out;
}

double glrt_statistic(const Matrix& r_f, const Matrix& r_b, double nf_over_nb, const Matrix& w) {
  if (r_f.rows() != r_b.rows() || w.rows() != r_b.rows()) throw ShapeError("glrt_statistic: shape mismatch");
  if (w.cols() == 0) throw RankError("glrt_statistic: w has no columns");
  Matrix s = nf_over_nb * r_f + r_b;
  symmetrize(s);
  const Matrix inv_rb_w = solve(r_b, w);
  const Matrix inv_s_w = solve(s, w);
  Matrix num = transpose_times(w, inv_rb_w);
  Matrix den = transpose_times(w, inv_s_w);
  symmetrize(num);
  symmetrize(den);
  return std::exp(log_det_spd(num) - log_det_spd(den));
}

double glrt_statistic(const DataMatrix& z_f, const DataMatrix& z_b, const Matrix& w) {
  if (!z_f.centered() || !z_b.centered()) throw StateError("glrt_statistic: inputs must be centered");
  if (z_f.features() != z_b.features()) throw ShapeError("glrt_statistic: feature counts differ");
  const Matrix r_b_raw = second_moment(z_b);
  const Matrix r_b = diagonal_load(r_b_raw, auto_loading(r_b_raw));
  const Matrix r_f = second_moment(z_f);
  const double ratio = static_cast<double>(z_f.samples()) / static_cast<double>(z_b.samples());
  return glrt_statistic(r_f, r_b, ratio, w);
}

void write_factor_block(std::ostream& os, const FactorModel& model) {
  os << "W\n" << join_csv(model.lambda_diag) << '\n';
  for (std::size_t r = 0; r < model.w.rows(); ++r) os << join_csv(model.w.row(r)) << '\n';
}

std::optional<FactorModel> read_factor_block(std::istream& is, const FilterBank& bank) {
  std::string line;
  while (std::getline(is, line)) {
    if (!trim(line).empty()) break;
  }
  if (!is && line.empty()) return std::nullopt;
  if (trim(line) != "W") throw ParseError("model: unexpected content after filter rows");
  auto read_row = [&](std::size_t expected) {
    if (!std::getline(is, line)) throw ParseError("model: truncated W block");
    const auto fields = split(trim(line), ',');
    if (fields.size() != expected) throw ParseError("model: W block row has wrong length");
    Vector v(expected);
    for (std::size_t i = 0; i < expected; ++i) {
      if (!parse_double(fields[i], v[i])) throw ParseError("model: bad number in W block");
    }
    return v;
  };
  FactorModel model;
  model.f = bank.f;
  model.lambda_diag = read_row(bank.k());
  model.w = Matrix(bank.features(), bank.k());
  for (std::size_t r = 0; r < bank.features(); ++r) {
    const Vector row = read_row(bank.k());
    std::copy(row.begin(), row.end(), model.w.row(r).begin());
  }
  return model;
}

}  // namespace cpcapp
