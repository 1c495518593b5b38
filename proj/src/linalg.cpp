#include "cpcapp/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cpcapp/errors.hpp"

namespace cpcapp {

namespace {

std::atomic<std::uint64_t> g_eig_count{0};

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_symmetric(const Matrix& a, const char* who) {
  if (!a.is_square()) {
    throw ShapeError(std::string(who) + ": matrix is " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + ", expected square");
  }
  if (!all_finite(a)) throw ArgumentError(std::string(who) + ": non-finite entry");
  const double tol = 1e-9 * max_abs(a);
  if (asymmetry(a) > tol) throw ShapeError(std::string(who) + ": matrix is not symmetric");
}

// Householder reduction of a symmetric matrix to tridiagonal form T = QᵀAQ.
// Reflector k acts on coordinates k+1..n-1 and is stored as (v, beta) with
// H_k = I - beta·v·vᵀ.
struct Tridiagonal {
  Vector diag;
  Vector off;  // off[i] couples i and i+1; off[n-1] = 0
  std::vector<Vector> reflectors;
  Vector betas;
};

Tridiagonal tridiagonalize(const Matrix& input) {
  const std::size_t n = input.rows();
  Matrix a = input;
  symmetrize(a);
  Tridiagonal t;
  t.diag.assign(n, 0.0);
  t.off.assign(n, 0.0);
  if (n >= 3) {
    t.reflectors.reserve(n - 2);
    t.betas.reserve(n - 2);
  }
  Vector p(n), w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    Vector v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = a(k + 1 + i, k);
    const double xnorm = norm2(v);
    double beta = 0.0;
    double alpha = v[0];
    if (xnorm > 0.0) {
      alpha = v[0] >= 0.0 ? -xnorm : xnorm;
      v[0] -= alpha;
      const double vnorm2 = dot(v, v);
      beta = vnorm2 > 0.0 ? 2.0 / vnorm2 : 0.0;
    }
    t.diag[k] = a(k, k);
    t.off[k] = alpha;
    if (beta != 0.0) {
      // Trailing block update A ← H·A·H written as A − v·wᵀ − w·vᵀ.
      for (std::size_t i = 0; i < m; ++i) {
        auto row = a.row(k + 1 + i).subspan(k + 1, m);
        p[i] = beta * dot(row, v);
      }
      const double half = 0.5 * beta * dot(std::span<const double>(p.data(), m), v);
      for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - half * v[i];
      for (std::size_t i = 0; i < m; ++i) {
        auto row = a.row(k + 1 + i).subspan(k + 1, m);
        const double vi = v[i];
        const double wi = w[i];
        for (std::size_t j = 0; j < m; ++j) row[j] -= vi * w[j] + wi * v[j];
      }
    }
    t.reflectors.push_back(std::move(v));
    t.betas.push_back(beta);
  }
  if (n >= 2) {
    t.diag[n - 2] = a(n - 2, n - 2);
    t.off[n - 2] = a(n - 1, n - 2);
  }
  if (n >= 1) t.diag[n - 1] = a(n - 1, n - 1);
  return t;
}

// Applies Q = H_0·H_1·…·H_{n-3} to x in place.
void apply_q(const Tridiagonal& t, std::span<double> x) {
  for (std::size_t r = t.reflectors.size(); r-- > 0;) {
    const double beta = t.betas[r];
    if (beta == 0.0) continue;
    const Vector& v = t.reflectors[r];
    auto tail = x.subspan(r + 1, v.size());
    const double s = beta * dot(v, tail);
    for (std::size_t i = 0; i < v.size(); ++i) tail[i] -= s * v[i];
  }
}

// Implicit-shift QL on (diag, off). When rows is non-null it holds one vector
// per row and receives the same rotations, so rows(i, :) ends up as the
// eigenvector for diag[i].
void tridiagonal_ql(Vector& d, Vector& e, std::size_t lo, std::size_t hi, Matrix* rows,
                    std::size_t& iterations, std::size_t cap) {
  for (std::size_t l = lo; l < hi; ++l) {
    for (;;) {
      std::size_t m = l;
      for (; m + 1 < hi; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd) break;
      }
      if (m == l) break;
      if (++iterations > cap) {
        throw ConvergenceError("sym_eig: QL iteration did not converge within " +
                               std::to_string(cap) + " iterations");
      }
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool deflated = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (rows != nullptr) {
          auto zi = rows->row(i);
          auto zi1 = rows->row(i + 1);
          for (std::size_t k = 0; k < zi.size(); ++k) {
            const double t = zi1[k];
            zi1[k] = s * zi[k] + c * t;
            zi[k] = c * zi[k] - s * t;
          }
        }
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

void apply_sign_convention(std::span<double> v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::abs(x));
  if (best == 0.0) return;
  // Components within a relative 1e-9 of the maximum count as tied; the
  // lowest index among them decides the sign.
  const double cutoff = best * (1.0 - 1e-9);
  for (double x : v) {
    if (std::abs(x) >= cutoff) {
      if (x < 0.0) {
        for (double& y : v) y = -y;
      }
      return;
    }
  }
}

void normalize(std::span<double> v) {
  const double nrm = norm2(v);
  if (nrm > 0.0) {
    for (double& x : v) x /= nrm;
  }
}

std::vector<std::size_t> descending_order(const Vector& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });
  return order;
}

// Solves (T − shift·I)·x = b for an unreduced tridiagonal block using
// Gaussian elimination with partial pivoting. Zero pivots are replaced by a
// tiny value, which is what inverse iteration wants.
class ShiftedTridiagonalSolver {
 public:
  ShiftedTridiagonalSolver(std::span<const double> d, std::span<const double> e, double shift,
                           double tiny)
      : n_(d.size()), u0_(n_), u1_(n_, 0.0), u2_(n_, 0.0), mult_(n_, 0.0), swap_(n_, false) {
    double r0 = d[0] - shift;
    double r1 = n_ > 1 ? e[0] : 0.0;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      const double c = e[i];
      const double a_next = d[i + 1] - shift;
      const double b_next = i + 2 < n_ ? e[i + 1] : 0.0;
      if (std::abs(r0) >= std::abs(c)) {
        if (r0 == 0.0) r0 = tiny;
        const double m = c / r0;
        u0_[i] = r0;
        u1_[i] = r1;
        u2_[i] = 0.0;
        mult_[i] = m;
        r0 = a_next - m * r1;
        r1 = b_next;
      } else {
        const double m = r0 / c;
        u0_[i] = c;
        u1_[i] = a_next;
        u2_[i] = b_next;
        mult_[i] = m;
        swap_[i] = true;
        r0 = r1 - m * a_next;
        r1 = -m * b_next;
      }
    }
    if (r0 == 0.0) r0 = tiny;
    u0_[n_ - 1] = r0;
  }

  void solve(std::span<double> x) const {
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (swap_[i]) std::swap(x[i], x[i + 1]);
      x[i + 1] -= mult_[i] * x[i];
    }
    for (std::size_t i = n_; i-- > 0;) {
      double s = x[i];
      if (i + 1 < n_) s -= u1_[i] * x[i + 1];
      if (i + 2 < n_) s -= u2_[i] * x[i + 2];
      x[i] = s / u0_[i];
    }
  }

 private:
  std::size_t n_;
  Vector u0_, u1_, u2_, mult_;
  std::vector<bool> swap_;
};

struct BlockEigenvalue {
  double value;
  std::size_t block_lo;
  std::size_t block_hi;
  std::size_t order;  // position in the concatenated QL output, for stable ties
};

}  // namespace

EigenResult sym_eig(const Matrix& a) {
  check_symmetric(a, "sym_eig");
  g_eig_count.fetch_add(1, std::memory_order_relaxed);
  const std::size_t n = a.rows();
  EigenResult out;
  if (n == 0) return out;

  Tridiagonal t = tridiagonalize(a);
  // Row i of `rows` starts as column i of Q and tracks the i-th eigenvector
  // through the QL rotations.
  Matrix rows(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto qi = rows.row(i);
    qi[i] = 1.0;
    apply_q(t, qi);
  }

  Vector d = t.diag;
  Vector e = t.off;
  std::size_t iterations = 0;
  tridiagonal_ql(d, e, 0, n, &rows, iterations, 100 * n);

  const auto order = descending_order(d);
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = d[order[c]];
    Vector v(rows.row(order[c]).begin(), rows.row(order[c]).end());
    normalize(v);
    apply_sign_convention(v);
    out.vectors.set_column(c, v);
  }
  return out;
}

EigenResult sym_eig_top(const Matrix& a, std::size_t k) {
  check_symmetric(a, "sym_eig_top");
  const std::size_t n = a.rows();
  if (k < 1 || k > n) throw ArgumentError("sym_eig_top: k must lie in [1, M]");
  g_eig_count.fetch_add(1, std::memory_order_relaxed);

  Tridiagonal t = tridiagonalize(a);
  const Vector& d0 = t.diag;
  const Vector& e0 = t.off;

  // Split into unreduced blocks; each block is solved independently so that
  // eigenvalues shared by several blocks get vectors with disjoint support.
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  {
    std::size_t lo = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double dd = std::abs(d0[i]) + std::abs(d0[i + 1]);
      if (std::abs(e0[i]) <= kEps * dd) {
        blocks.emplace_back(lo, i + 1);
        lo = i + 1;
      }
    }
    blocks.emplace_back(lo, n);
  }

  double tnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tnorm = std::max(tnorm, std::abs(d0[i]) + std::abs(e0[i]) + (i > 0 ? std::abs(e0[i - 1]) : 0.0));
  }
  const double tiny = std::max(tnorm, 1.0) * kEps;

  std::vector<BlockEigenvalue> all;
  all.reserve(n);
  std::size_t iterations = 0;
  for (const auto& [lo, hi] : blocks) {
    Vector d(d0.begin() + static_cast<std::ptrdiff_t>(lo), d0.begin() + static_cast<std::ptrdiff_t>(hi));
    Vector e(e0.begin() + static_cast<std::ptrdiff_t>(lo), e0.begin() + static_cast<std::ptrdiff_t>(hi));
    e.back() = 0.0;
    tridiagonal_ql(d, e, 0, d.size(), nullptr, iterations, 100 * n);
    for (double v : d) all.push_back({v, lo, hi, all.size()});
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const BlockEigenvalue& x, const BlockEigenvalue& y) { return x.value > y.value; });

  EigenResult out;
  out.values.resize(k);
  out.vectors = Matrix(n, k);
  // Vectors already computed, in tridiagonal coordinates, with their block.
  std::vector<std::pair<const BlockEigenvalue*, Vector>> done;
  const double cluster_tol = 1e-3 * std::max(tnorm, tiny);

  for (std::size_t c = 0; c < k; ++c) {
    const BlockEigenvalue& ev = all[c];
    const std::size_t lo = ev.block_lo;
    const std::size_t m = ev.block_hi - ev.block_lo;
    Vector y(n, 0.0);
    if (m == 1) {
      y[lo] = 1.0;
    } else {
      std::span<const double> bd(d0.data() + lo, m);
      std::span<const double> be(e0.data() + lo, m - 1);
      // Perturb the shift slightly for exact repeats within a block so the
      // solver does not see a bitwise-identical singular system twice.
      double shift = ev.value;
      for (const auto& [prev, _] : done) {
        if (prev->block_lo == lo && std::abs(prev->value - shift) <= 10.0 * tiny) shift -= 10.0 * tiny;
      }
      ShiftedTridiagonalSolver solver(bd, be, shift, tiny);
      Vector x(m);
      // Deterministic, non-degenerate start vector.
      std::uint64_t state = 0x9E3779B97F4A7C15ull ^ (c + 1);
      for (std::size_t i = 0; i < m; ++i) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        x[i] = 0.5 + static_cast<double>(state >> 11) * 0x1.0p-53;
      }
      for (int it = 0; it < 4; ++it) {
        // Orthogonalise against earlier vectors of the same block and cluster.
        for (const auto& [prev, pv] : done) {
          if (prev->block_lo != lo || std::abs(prev->value - ev.value) > cluster_tol) continue;
          double s = 0.0;
          for (std::size_t i = 0; i < m; ++i) s += pv[lo + i] * x[i];
          for (std::size_t i = 0; i < m; ++i) x[i] -= s * pv[lo + i];
        }
        normalize(x);
        solver.solve(x);
        normalize(x);
      }
      for (const auto& [prev, pv] : done) {
        if (prev->block_lo != lo || std::abs(prev->value - ev.value) > cluster_tol) continue;
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += pv[lo + i] * x[i];
        for (std::size_t i = 0; i < m; ++i) x[i] -= s * pv[lo + i];
      }
      normalize(x);
      std::copy(x.begin(), x.end(), y.begin() + static_cast<std::ptrdiff_t>(lo));
    }
    done.emplace_back(&ev, y);

    Vector v = y;
    apply_q(t, v);
    normalize(v);
    apply_sign_convention(v);
    out.values[c] = ev.value;
    out.vectors.set_column(c, v);
  }
  return out;
}

std::uint64_t eigendecomposition_count() { return g_eig_count.load(std::memory_order_relaxed); }

Matrix inv_sqrt_sym(const Matrix& a) {
  const EigenResult eig = sym_eig(a);
  const std::size_t n = a.rows();
  for (double lambda : eig.values) {
    if (!(lambda > 0.0)) {
      throw DefinitenessError("inv_sqrt_sym: eigenvalue " + std::to_string(lambda) +
                              " is not positive; apply diagonal loading first");
    }
  }
  // B = V·diag(λ^{-1/2})·Vᵀ
  Matrix scaled = eig.vectors;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) scaled(r, c) /= std::sqrt(eig.values[c]);
  Matrix b = times_transpose(scaled, eig.vectors);
  symmetrize(b);
  return b;
}

Matrix diagonal_load(const Matrix& a, double rho) {
  if (!a.is_square()) throw ShapeError("diagonal_load: matrix not square");
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw ArgumentError("diagonal_load: rho must be a finite non-negative number");
  }
  Matrix out = a;
  for (std::size_t i = 0; i < out.rows(); ++i) out(i, i) += rho;
  return out;
}

double auto_loading(const Matrix& r_b) {
  check_symmetric(r_b, "auto_loading");
  const std::size_t m = r_b.rows();
  if (m == 0) return 0.0;
  const double mean_diag = trace(r_b) / static_cast<double>(m);
  if (!(mean_diag > 0.0)) return LoadingRule::kZeroTraceRho;
  const double floor = LoadingRule::kFloorFactor * mean_diag;
  // λ_min(R_b) ≥ floor  ⇔  R_b − floor·I is positive semi-definite.
  if (is_positive_definite(diagonal_load(r_b, 0.0) - floor * Matrix::identity(m))) return 0.0;
  return LoadingRule::kRhoFactor * mean_diag;
}

Matrix cholesky(const Matrix& a) {
  if (!a.is_square()) throw ShapeError("cholesky: matrix not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto li = l.row(i);
    for (std::size_t j = 0; j <= i; ++j) {
      auto lj = l.row(j);
      const double s = a(i, j) - dot(li.first(j), lj.first(j));
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) {
          throw DefinitenessError("cholesky: matrix is not positive definite (pivot " +
                                  std::to_string(i) + ")");
        }
        li[i] = std::sqrt(s);
      } else {
        li[j] = s / lj[j];
      }
    }
  }
  return l;
}

bool is_positive_definite(const Matrix& a) {
  try {
    (void)cholesky(a);
    return true;
  } catch (const DefinitenessError&) {
    return false;
  }
}

Matrix solve(const Matrix& a, const Matrix& b) {
  if (!a.is_square() || a.rows() != b.rows()) throw ShapeError("solve: incompatible shapes");
  const std::size_t n = a.rows();
  Matrix lu = a;
  Matrix x = b;
  const double scale = std::max(max_abs(a), std::numeric_limits<double>::min());
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (std::abs(lu(piv, k)) <= 1e-14 * scale) throw RankError("solve: matrix is singular");
    if (piv != k) {
      std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(piv).begin());
      std::swap_ranges(x.row(k).begin(), x.row(k).end(), x.row(piv).begin());
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double s = x(i, j);
      for (std::size_t c = i + 1; c < n; ++c) s -= lu(i, c) * x(c, j);
      x(i, j) = s / lu(i, i);
    }
  }
  return x;
}

double log_det_spd(const Matrix& a) {
  Matrix l;
  try {
    l = cholesky(a);
  } catch (const DefinitenessError&) {
    throw RankError("log_det_spd: matrix is singular or indefinite");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

namespace {

// Rows of x are overwritten with L⁻¹·x (forward substitution, L lower).
void forward_substitute_rows(const Matrix& l, Matrix& x) {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t j = 0; j < i; ++j) {
      const double lij = l(i, j);
      if (lij == 0.0) continue;
      auto xj = x.row(j);
      for (std::size_t c = 0; c < xi.size(); ++c) xi[c] -= lij * xj[c];
    }
    const double inv = 1.0 / l(i, i);
    for (double& v : xi) v *= inv;
  }
}

// x ← L⁻ᵀ·x for a single vector.
void back_substitute_transpose(const Matrix& l, std::span<double> x) {
  const std::size_t n = l.rows();
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= l(j, i) * x[j];
    x[i] = s / l(i, i);
  }
}

}  // namespace

EigenResult q_eig(const Matrix& r_b, const Matrix& r_f, std::size_t k, Whitening whitening) {
  check_symmetric(r_b, "q_eig");
  check_symmetric(r_f, "q_eig");
  const std::size_t m = r_b.rows();
  if (r_f.rows() != m) throw ShapeError("q_eig: R_b and R_f differ in size");
  if (k < 1 || k > m) throw ArgumentError("q_eig: k must lie in [1, M]");

  Matrix r;        // symmetric matrix similar to Q
  Matrix back;     // maps eigenvectors of r to eigenvectors of Q
  Matrix chol;
  if (whitening == Whitening::kCholesky) {
    chol = cholesky(r_b);
    Matrix x = r_f;
    forward_substitute_rows(chol, x);  // L⁻¹R_f
    Matrix y = x.transposed();          // R_f L⁻ᵀ... transposed, i.e. (L⁻¹R_f)ᵀ
    forward_substitute_rows(chol, y);  // L⁻¹R_f L⁻ᵀ (symmetric)
    r = std::move(y);
  } else {
    back = inv_sqrt_sym(r_b);
    r = back * r_f * back;
  }
  symmetrize(r);

  const EigenResult inner = (k == m) ? sym_eig(r) : sym_eig_top(r, k);
  EigenResult out;
  out.values.resize(k);
  out.vectors = Matrix(m, k);
  const double lambda_max = std::max(std::abs(inner.values.front()), 1.0);
  for (std::size_t c = 0; c < k; ++c) {
    double lambda = inner.values[c];
    // The spectrum is non-negative in exact arithmetic; clamp round-off.
    if (lambda < 0.0 && lambda > -1e-9 * lambda_max * static_cast<double>(m)) lambda = 0.0;
    Vector v = inner.vectors.column(c);
    if (whitening == Whitening::kCholesky) {
      back_substitute_transpose(chol, v);
    } else {
      v = back * v;
    }
    normalize(v);
    apply_sign_convention(v);
    out.values[c] = lambda;
    out.vectors.set_column(c, v);
  }
  return out;
}

Matrix orthonormalize(const Matrix& a) {
  Matrix q = a;
  const std::size_t cols = a.cols();
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t c = 0; c < cols; ++c) {
      Vector v = q.column(c);
      for (std::size_t p = 0; p < c; ++p) {
        const Vector u = q.column(p);
        const double s = dot(u, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= s * u[i];
      }
      const double nrm = norm2(v);
      if (nrm == 0.0) throw RankError("orthonormalize: columns are linearly dependent");
      for (double& x : v) x /= nrm;
      q.set_column(c, v);
    }
  }
  return q;
}

double max_principal_angle(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("max_principal_angle: row counts differ");
  const Matrix qa = orthonormalize(a);
  const Matrix qb = orthonormalize(b);
  // Sines of the principal angles are the singular values of (I − QaQaᵀ)Qb.
  const Matrix resid = qb - qa * transpose_times(qa, qb);
  Matrix gram = transpose_times(resid, resid);
  symmetrize(gram);
  double largest = 0.0;
  const EigenResult eig = sym_eig(gram);
  if (!eig.values.empty()) largest = std::max(eig.values.front(), 0.0);
  double sine = std::min(1.0, std::sqrt(largest));
  // If b spans more than a, the extra directions are at 90 degrees.
  if (qb.cols() > qa.cols()) sine = 1.0;
  return std::asin(sine);
}

}  // namespace cpcapp
