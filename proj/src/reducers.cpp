#include "cpcapp/reducers.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <thread>

#include "cpcapp/errors.hpp"
#include "cpcapp/linalg.hpp"
#include "cpcapp/text.hpp"

namespace cpcapp {

namespace {

void check_k(std::size_t k, std::size_t m, const char* who) {
  if (k < 1 || k > m) {
    throw ArgumentError(std::string(who) + ": k=" + std::to_string(k) + " outside [1, " +
                        std::to_string(m) + "]");
  }
}

EigenResult top_eigenpairs(const Matrix& a, std::size_t k) {
  return k == a.rows() ? sym_eig(a) : sym_eig_top(a, k);
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kPca:
      return "pca";
    case Method::kCpca:
      return "cpca";
    case Method::kCpcaPlusPlus:
      return "cpca++";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "pca") return Method::kPca;
  if (name == "cpca") return Method::kCpca;
  if (name == "cpca++" || name == "cpcapp") return Method::kCpcaPlusPlus;
  throw ArgumentError("unknown method '" + std::string(name) + "' (expected pca, cpca or cpca++)");
}

FilterBank fit_pca(const DataMatrix& data, std::size_t k) {
  check_k(k, data.features(), "fit_pca");
  if (data.samples() < 2) throw ArgumentError("fit_pca: need at least two samples");
  const DataMatrix z = center(data);
  return fit_pca_moment(second_moment(z), *z.mean(), k);
}

FilterBank fit_pca_moment(const Matrix& r, const Vector& mean, std::size_t k) {
  check_k(k, r.rows(), "fit_pca");
  if (mean.size() != r.rows()) throw ShapeError("fit_pca: mean length mismatch");
  const EigenResult eig = top_eigenpairs(r, k);
  FilterBank bank;
  bank.method = Method::kPca;
  bank.f = eig.vectors;
  bank.eigenvalues = eig.values;
  bank.train_mean_fg = mean;
  bank.train_mean_bg.assign(mean.size(), 0.0);
  return bank;
}

FilterBank fit_cpca(const CovariancePair& pair, std::size_t k, double alpha) {
  check_k(k, pair.features(), "fit_cpca");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ArgumentError("fit_cpca: alpha must be a finite non-negative number");
  }
  if (pair.r_f.rows() != pair.r_b.rows()) throw ShapeError("fit_cpca: R_b and R_f differ in size");
  Matrix contrast = pair.r_f - alpha * pair.r_b;
  symmetrize(contrast);
  const EigenResult eig = top_eigenpairs(contrast, k);
  FilterBank bank;
  bank.method = Method::kCpca;
  bank.f = eig.vectors;
  bank.eigenvalues = eig.values;
  bank.alpha = alpha;
  bank.train_mean_bg = pair.mean_b;
  bank.train_mean_fg = pair.mean_f;
  bank.loading = pair.loading;
  return bank;
}

std::vector<FilterBank> sweep_cpca(const CovariancePair& pair, std::size_t k,
                                   const std::vector<double>& alphas, unsigned threads) {
  if (alphas.empty()) throw ArgumentError("sweep_cpca: empty alpha list");
  check_k(k, pair.features(), "sweep_cpca");
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ArgumentError("sweep_cpca: invalid alpha");
  }
  std::vector<FilterBank> banks(alphas.size());
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), alphas.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < alphas.size(); ++i) banks[i] = fit_cpca(pair, k, alphas[i]);
    return banks;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < alphas.size(); i += workers) banks[i] = fit_cpca(pair, k, alphas[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return banks;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid{0.0};
  constexpr int kPoints = 40;
  for (int i = 0; i < kPoints; ++i) {
    const double t = static_cast<double>(i) / (kPoints - 1);
    grid.push_back(std::pow(10.0, -3.0 + 6.0 * t));
  }
  return grid;
}

std::vector<double> parse_alpha_grid(std::string_view spec) {
  spec = trim(spec);
  if (spec.empty() || spec == "default") return default_alpha_grid();
  std::vector<double> grid;
  if (spec.substr(0, 2) == "0+") {
    grid.push_back(0.0);
    spec.remove_prefix(2);
  }
  if (spec.substr(0, 4) == "log:") {
    const auto parts = split(spec.substr(4), ':');
    double lo = 0, hi = 0, count = 0;
    if (parts.size() != 3 || !parse_double(parts[0], lo) || !parse_double(parts[1], hi) ||
        !parse_double(parts[2], count) || lo <= 0.0 || hi < lo || count < 1 ||
        count != std::floor(count)) {
      throw ArgumentError("alpha grid: expected log:LO:HI:COUNT with 0 < LO <= HI");
    }
    const int n = static_cast<int>(count);
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      grid.push_back(std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * t));
    }
    return grid;
  }
  for (auto field : split(spec, ',')) {
    double a = 0;
    if (!parse_double(field, a) || a < 0.0) {
      throw ArgumentError("alpha grid: invalid value '" + std::string(field) + "'");
    }
    grid.push_back(a);
  }
  return grid;
}

FilterBank fit_cpcapp(const CovariancePair& pair, std::size_t k) {
  check_k(k, pair.features(), "fit_cpcapp");
  const EigenResult eig = q_eig(pair.loaded_r_b(), pair.r_f, k);
  FilterBank bank;
  bank.method = Method::kCpcaPlusPlus;
  bank.f = eig.vectors;
  bank.eigenvalues = eig.values;
  bank.train_mean_bg = pair.mean_b;
  bank.train_mean_fg = pair.mean_f;
  bank.loading = pair.loading;
  return bank;
}

Projection transform(const FilterBank& bank, const DataMatrix& data, Centering centering) {
  if (data.features() != bank.features()) {
    throw ShapeError("transform: data has " + std::to_string(data.features()) +
                     " features, model expects " + std::to_string(bank.features()));
  }
  const DataMatrix z = centering == Centering::kOwnMean ? center(data)
                                                        : center_with(data, bank.train_mean_fg);
  return Projection{transpose_times(bank.f, z.values())};
}

void write_filter_bank(std::ostream& os, const FilterBank& bank) {
  os << "cpcapp-model v1\n";
  os << method_name(bank.method) << ' ' << bank.features() << ' ' << bank.k() << ' '
     << (bank.alpha ? format_double(*bank.alpha) : std::string("none")) << ' '
     << format_double(bank.loading) << '\n';
  os << join_csv(bank.train_mean_bg) << '\n';
  os << join_csv(bank.train_mean_fg) << '\n';
  os << join_csv(bank.eigenvalues) << '\n';
  for (std::size_t r = 0; r < bank.f.rows(); ++r) os << join_csv(bank.f.row(r)) << '\n';
}

namespace {

Vector read_csv_line(std::istream& is, std::size_t expected, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError(std::string("model: missing ") + what);
  const auto fields = split(trim(line), ',');
  if (fields.size() != expected) {
    throw ParseError(std::string("model: ") + what + " has " + std::to_string(fields.size()) +
                     " values, expected " + std::to_string(expected));
  }
  Vector v(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    if (!parse_double(fields[i], v[i])) throw ParseError(std::string("model: bad number in ") + what);
  }
  return v;
}

}  // namespace

FilterBank read_filter_bank(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != "cpcapp-model v1") {
    throw ParseError("model: missing 'cpcapp-model v1' header");
  }
  if (!std::getline(is, line)) throw ParseError("model: missing parameter line");
  const auto parts = split(trim(line), ' ');
  if (parts.size() != 5) throw ParseError("model: parameter line needs 'method M K alpha loading'");
  FilterBank bank;
  try {
    bank.method = parse_method(parts[0]);
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  double m_d = 0, k_d = 0;
  if (!parse_double(parts[1], m_d) || !parse_double(parts[2], k_d) || m_d < 1 || k_d < 1 ||
      k_d > m_d || m_d != std::floor(m_d) || k_d != std::floor(k_d)) {
    throw ParseError("model: invalid M or K");
  }
  const auto m = static_cast<std::size_t>(m_d);
  const auto k = static_cast<std::size_t>(k_d);
  if (parts[3] != "none") {
    double a = 0;
    if (!parse_double(parts[3], a)) throw ParseError("model: invalid alpha");
    bank.alpha = a;
  }
  if (bank.alpha.has_value() != (bank.method == Method::kCpca)) {
    throw ParseError("model: alpha must be present exactly for cpca models");
  }
  if (!parse_double(parts[4], bank.loading)) throw ParseError("model: invalid loading");
  bank.train_mean_bg = read_csv_line(is, m, "background mean");
  bank.train_mean_fg = read_csv_line(is, m, "foreground mean");
  bank.eigenvalues = read_csv_line(is, k, "eigenvalues");
  bank.f = Matrix(m, k);
  for (std::size_t r = 0; r < m; ++r) {
    const Vector row = read_csv_line(is, k, "filter row");
    std::copy(row.begin(), row.end(), bank.f.row(r).begin());
  }
  return bank;
}

}  // namespace cpcapp
