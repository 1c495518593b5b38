// Acceptance run: one PASS/FAIL line per criterion, with its measurements
// and runtime. Exit status is the number of failing criteria.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "cpcapp/bench.hpp"
#include "cpcapp/datagen.hpp"
#include "cpcapp/factorization.hpp"
#include "cpcapp/linalg.hpp"
#include "cpcapp/reducers.hpp"
#include "cpcapp/splicing.hpp"
#include "cpcapp/statistics.hpp"
#include "support.hpp"

using namespace cpcapp;
namespace fs = std::filesystem;
using testing_support::pearson;
using testing_support::random_matrix;
using testing_support::random_spd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double abs_cos(std::span<const double> a, std::span<const double> b) {
  return std::abs(dot(a, b)) / (norm2(a) * norm2(b));
}

CovariancePair pair_from(const Matrix& r_b, const Matrix& r_f) {
  CovariancePair p;
  p.r_b = r_b;
  p.r_f = r_f;
  p.n_b = p.n_f = 100;
  p.mean_b.assign(r_b.rows(), 0.0);
  p.mean_f.assign(r_b.rows(), 0.0);
  return p;
}

FourClassData four_class(std::uint64_t seed, std::size_t n) {
  SyntheticSpec spec = SyntheticSpec::defaults(DatasetKind::kFourClass, seed);
  spec.n_fg = spec.n_bg = n;
  return gen_four_class(spec);
}

// 1. Closed-form filters of the four-class construction.
Outcome criterion_1() {
  const Matrix u = oracle_four_class_filters();
  auto cosines = [&](std::size_t n) {
    const FourClassData d = four_class(0, n);
    const FilterBank b = fit_cpcapp(build_covariance_pair(d.background, d.foreground.data), 2);
    return std::pair{abs_cos(b.f.column(0), u.column(0)), abs_cos(b.f.column(1), u.column(1))};
  };
  const auto [a1, a2] = cosines(400);
  const auto [b1, b2] = cosines(10000);
  const bool pass = a1 >= 0.95 && a2 >= 0.95 && b1 >= 0.99 && b2 >= 0.99;
  return {pass, fmt("seed 0: N=400 |cos| %.4f %.4f (>= 0.95); N=10^4 |cos| %.4f %.4f (>= 0.99)", a1, a2, b1, b2)};
}

// 2. Eigenvalues of the analytic Q.
Outcome criterion_2() {
  const Matrix q = analytic_four_class_q();
  Eigen::EigenSolver<Eigen::MatrixXd> oracle(testing_support::to_eigen(q));
  std::vector<double> ev;
  for (Eigen::Index i = 0; i < oracle.eigenvalues().size(); ++i) ev.push_back(oracle.eigenvalues()[i].real());
  std::sort(ev.rbegin(), ev.rend());
  const bool pass = std::abs(ev[0] - 30.33) <= 0.01 && std::abs(ev[1] - 23.50) <= 0.01;
  return {pass, fmt("top eigenvalues %.4f %.4f (targets 30.33 23.50, tol 0.01)", ev[0], ev[1])};
}

// 3. The haystack example with gamma=10, rho=0.01, beta=5, eps=0.1.
Outcome criterion_3() {
  const Haystack h = gen_haystack(SyntheticSpec::defaults(DatasetKind::kHaystack));
  const CovariancePair p = pair_from(h.r_b, h.r_f);
  const double pp = abs_cos(fit_cpcapp(p, 1).f.column(0), h.c);
  const double pca = abs_cos(fit_pca_moment(h.r_f, Vector(h.c.size(), 0.0), 1).f.column(0), h.a);
  const double cp = abs_cos(fit_cpca(p, 1, 5.0 / 10.0).f.column(0), h.c);
  const bool pass = pp >= 0.99 && pca >= 0.99 && cp >= 0.99;
  return {pass, fmt("cpca++ vs c %.6f, pca vs a %.6f, cpca(alpha=0.5) vs c %.6f (each >= 0.99)", pp, pca, cp)};
}

// 4. PCA on the four-class foreground, the negative control.
Outcome criterion_4() {
  const FourClassData d = four_class(0, 400);
  const FilterBank b = fit_pca(d.foreground.data, 2);
  double h3[2] = {0, 0};
  for (int c = 0; c < 2; ++c)
    for (std::size_t r = 20; r < 30; ++r) h3[c] += b.f(r, c) * b.f(r, c);
  const Matrix y = transform(b, d.foreground.data).y;
  const auto& labels = d.foreground.labels;
  std::vector<Vector> centroid(4, Vector(2, 0.0));
  std::vector<double> count(4, 0.0);
  for (std::size_t j = 0; j < y.cols(); ++j) {
    for (int i = 0; i < 2; ++i) centroid[labels[j] - 1][i] += y(i, j);
    count[labels[j] - 1] += 1;
  }
  for (int c = 0; c < 4; ++c)
    for (auto& v : centroid[c]) v /= count[c];
  double spread = 0;
  for (std::size_t j = 0; j < y.cols(); ++j)
    for (int i = 0; i < 2; ++i) spread += std::pow(y(i, j) - centroid[labels[j] - 1][i], 2);
  const double within = std::sqrt(spread / static_cast<double>(y.cols()));
  double between = INFINITY;
  for (int a = 0; a < 4; ++a)
    for (int c = a + 1; c < 4; ++c)
      between = std::min(between, std::hypot(centroid[a][0] - centroid[c][0], centroid[a][1] - centroid[c][1]));
  const bool pass = h3[0] >= 0.8 && h3[1] >= 0.8 && between < within;
  return {pass, fmt("h3 mass %.4f %.4f (>= 0.8); min centroid distance %.3f vs within-class std %.3f (need <)", h3[0],
                    h3[1], between, within)};
}

// 5. cPCA at alpha = 0 against PCA of the foreground.
Outcome criterion_5() {
  double worst = 0;
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const DataMatrix fg(random_matrix(12, 80, gen));
    const DataMatrix bg(random_matrix(12, 80, gen));
    const FilterBank c = fit_cpca(build_covariance_pair(bg, fg), 3, 0.0);
    worst = std::max(worst, max_principal_angle(c.f, fit_pca(fg, 3).f));
  }
  const FourClassData d = four_class(0, 400);
  const FilterBank c = fit_cpca(build_covariance_pair(d.background, d.foreground.data), 2, 0.0);
  worst = std::max(worst, max_principal_angle(c.f, fit_pca(d.foreground.data, 2).f));
  return {worst < 1e-6, fmt("largest principal angle %.3g rad over 21 cases (< 1e-6)", worst)};
}

// 6. One decomposition against 41, and the wall-clock speedup.
Outcome criterion_6() {
  BenchOptions opt;
  const BenchReport r =
      run_bench(SyntheticSpec::defaults(DatasetKind::kFourClass, 0), {Method::kCpca, Method::kCpcaPlusPlus}, opt);
  const auto* cp = r.find(Method::kCpca);
  const auto* pp = r.find(Method::kCpcaPlusPlus);
  const bool pass = r.grid_size == 41 && cp->eigendecompositions == 41 && pp->eigendecompositions == 1 &&
                    r.speedup() >= 10.0;
  return {pass, fmt("grid %zu: cpca %llu eigs %.3g s, cpca++ %llu eig %.3g s, speedup %.1fx (>= 10x)", r.grid_size,
                    static_cast<unsigned long long>(cp->eigendecompositions), cp->seconds,
                    static_cast<unsigned long long>(pp->eigendecompositions), pp->seconds, r.speedup())};
}

// 7. Biorthogonality and idempotence on random instances up to M = 50.
Outcome criterion_7() {
  std::mt19937_64 gen(7);
  double bi = 0, idem = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + (trial * 13) % 49;
    const std::size_t k = 1 + trial % std::min<std::size_t>(m, 8);
    Matrix r_b;
    if (trial % 2 == 0) {
      r_b = random_spd(m, gen);
    } else {
      const Matrix x = random_matrix(m, m / 2 + 1, gen);
      r_b = times_transpose(x, x);
      symmetrize(r_b);
    }
    CovariancePair p = pair_from(r_b, random_spd(m, gen));
    p.loading = auto_loading(r_b);
    const FactorModel f = recover_w(p, fit_cpcapp(p, k));
    bi = std::max(bi, max_abs(transpose_times(f.f, f.w) - Matrix::identity(k)));
    const Matrix proj = times_transpose(f.w, f.f);
    idem = std::max(idem, frobenius_norm(proj * proj - proj) / frobenius_norm(proj));
  }
  return {bi < 1e-7 && idem < 1e-6,
          fmt("max |F^T W - I| %.3g (< 1e-7), max relative |P^2 - P| %.3g (< 1e-6) over 100 instances", bi, idem)};
}

// 8. GLRT optimality and the identical-statistics value 2^K.
Outcome criterion_8() {
  const Haystack h = gen_haystack(SyntheticSpec::defaults(DatasetKind::kHaystack, 8));
  Rng rng(8);
  const DataMatrix fg = center(sample_gaussian(h.r_f, 4000, rng));
  const DataMatrix bg = center(sample_gaussian(h.r_b, 4000, rng));
  const CovariancePair p = build_covariance_pair(bg, fg);
  std::mt19937_64 gen(8);
  bool optimal = true;
  double best = 0, runner_up = 0;
  for (std::size_t k = 1; k <= 2; ++k) {
    const FactorModel m = recover_w(p, fit_cpcapp(p, k));
    const double g = glrt_statistic(fg, bg, m.w);
    best = std::max(best, g);
    for (int i = 0; i < 100; ++i) {
      const double r = glrt_statistic(fg, bg, random_matrix(h.c.size(), k, gen));
      runner_up = std::max(runner_up, r / g);
      optimal = optimal && r <= g * (1 + 1e-12);
    }
  }
  // The haystack foreground is rank deficient, so the identical-statistics
  // check uses full-rank samples.
  const DataMatrix z = center(DataMatrix(random_matrix(6, 500, gen)));
  double rel = 0;
  for (std::size_t k = 1; k <= 4; ++k) {
    const double g = glrt_statistic(z, z, random_matrix(6, k, gen));
    rel = std::max(rel, std::abs(g - std::pow(2.0, k)) / std::pow(2.0, k));
  }
  return {optimal && rel < 1e-6,
          fmt("optimal W beats 200 random W (largest random/optimal ratio %.4f); identical case rel err %.3g (< 1e-6)",
              runner_up, rel)};
}

// 9. Denoising gap on textured digits, averaged over 50 seeds.
Outcome criterion_9() {
  constexpr int kSeeds = 50;
  constexpr std::size_t kN = 1200;
  double gap = 0, worst = INFINITY;
  for (int seed = 0; seed < kSeeds; ++seed) {
    SyntheticSpec spec = SyntheticSpec::defaults(DatasetKind::kTexturedDigits, seed);
    spec.n_fg = spec.n_bg = kN;
    const TexturedDigits d = gen_textured_digits(spec);
    const CovariancePair p = build_covariance_pair(d.background, d.foreground.data);
    const FactorModel contrast = recover_w(p, fit_cpcapp(p, 3));
    const FactorModel plain = orthogonal_factor_model(fit_pca_moment(p.r_f, p.mean_f, 3));
    double a = 0, b = 0;
    const std::size_t n = d.foreground.data.samples();
    for (std::size_t j = 0; j < n; ++j) {
      const Vector z = d.foreground.data.sample(j);
      const Vector clean = d.clean.sample(j);
      a += pearson(denoise(contrast, z, p.mean_f), clean);
      b += pearson(denoise(plain, z, p.mean_f), clean);
    }
    const double g = (a - b) / static_cast<double>(n);
    gap += g;
    worst = std::min(worst, g);
  }
  gap /= kSeeds;
  return {gap >= 0.1, fmt("mean correlation gap %.4f over %d seeds at N=%zu (>= 0.1); smallest seed gap %.4f", gap,
                          kSeeds, kN, worst)};
}

// 10. Splice localization on 20 training and 5 test images.
Outcome criterion_10() {
  std::vector<TrainingImage> train;
  for (int i = 0; i < 20; ++i) {
    const SplicedImage s = gen_spliced_image(SyntheticSpec::defaults(DatasetKind::kSplicedImage, 100 + i));
    train.push_back({s.probe, s.surface_mask});
  }
  const SpliceConfig cfg;
  const FilterBank bank = train_splice(train, cfg);
  double f1 = 0, mcc = 0, base = 0;
  for (int i = 0; i < 5; ++i) {
    const SplicedImage s = gen_spliced_image(SyntheticSpec::defaults(DatasetKind::kSplicedImage, 500 + i));
    const ProbabilityMap map = localize(bank, s.probe, cfg);
    const ConfusionCounts c = binarize_and_score(map, s.edge_truth, 0.5);
    f1 += f1_score(c) / 5;
    mcc += mcc_score(c) / 5;
    base += random_scorer_f1(edge_mask(s.probe), s.edge_truth, 0.5) / 5;
  }
  return {f1 >= 2 * base && mcc > 0,
          fmt("mean F1 %.4f vs random baseline %.4f (ratio %.2f, need >= 2); mean MCC %.4f (> 0)", f1, base, f1 / base,
              mcc)};
}

// 11. Metrics against per-pixel brute force.
Outcome criterion_11() {
  std::mt19937_64 gen(11);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + static_cast<int>(gen() % 400);
    std::vector<int> truth(n), pred(n);
    for (int i = 0; i < n; ++i) {
      truth[i] = static_cast<int>(gen() % 3 == 0);
      pred[i] = static_cast<int>(gen() % (t % 5 + 2) == 0);
    }
    if (t % 100 == 0) std::fill(pred.begin(), pred.end(), 0);
    if (t % 100 == 1) std::fill(truth.begin(), truth.end(), 0);
    double tp = 0, tn = 0, fp = 0, fn = 0;
    for (int i = 0; i < n; ++i) {
      tp += truth[i] && pred[i];
      tn += !truth[i] && !pred[i];
      fp += !truth[i] && pred[i];
      fn += truth[i] && !pred[i];
    }
    const double f1_oracle = (2 * tp + fp + fn) == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
    const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    const double mcc_oracle = den == 0 ? 0.0 : (tp * tn - fp * fn) / std::sqrt(den);
    ConfusionCounts c;
    c.tp = static_cast<std::uint64_t>(tp);
    c.tn = static_cast<std::uint64_t>(tn);
    c.fp = static_cast<std::uint64_t>(fp);
    c.fn = static_cast<std::uint64_t>(fn);
    mismatches += f1_score(c) != f1_oracle || mcc_score(c) != mcc_oracle;
  }
  ConfusionCounts zero;
  const bool degenerate = f1_score(zero) == 0.0 && mcc_score(zero) == 0.0;
  return {mismatches == 0 && degenerate,
          fmt("%d of 1000 tallies differ from the oracle; zero-denominator rule %s", mismatches,
              degenerate ? "returns 0" : "broken")};
}

// 12. Every CLI pipeline, run twice into fresh directories.
int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cpcapp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cpcapp::cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::fprintf(stderr, "step failed: %s\n", err.str().c_str());
  return code;
}

int run_pipelines(const fs::path& root) {
  const std::string d = root.string();
  int failures = 0;
  auto step = [&](std::vector<std::string> args) { failures += cli(std::move(args)) != 0; };
  step({"generate", "four-class", "--seed", "12", "--out", d + "/fc"});
  step({"generate", "haystack", "--seed", "12", "--n-fg", "500", "--n-bg", "500", "--out", d + "/hs"});
  step({"generate", "textured-digits", "--seed", "12", "--n-fg", "300", "--n-bg", "300", "--previews", "2", "--out",
        d + "/td"});
  step({"generate", "spliced-image", "--seed", "12", "--count", "4", "--out", d + "/sp"});
  step({"generate", "spliced-image", "--seed", "13", "--count", "1", "--out", d + "/sp_test"});
  for (const char* method : {"pca", "cpca", "cpca++"}) {
    const std::string m = d + "/fc_" + (std::string(method) == "cpca++" ? "pp" : method) + ".model";
    std::vector<std::string> args{"fit", "--fg", d + "/fc/foreground.csv", "--bg", d + "/fc/background.csv",
                                  "--method", method, "-k", "2", "--out", m};
    if (std::string(method) == "cpca") args.insert(args.end(), {"--alpha", "2.5"});
    step(args);
    step({"transform", "--model", m, "--in", d + "/fc/foreground.csv", "--out", m + ".proj.csv"});
    step({"score", "--model", m, "--in", d + "/fc/foreground.csv", "--out", m + ".score.csv", "--centering",
          "train"});
  }
  step({"fit", "--fg", d + "/fc/foreground.csv", "--bg", d + "/fc/background.csv", "--method", "cpca", "-k", "2",
        "--alpha-grid", "0+log:0.01:100:5", "--out", d + "/grid.model"});
  step({"fit", "--fg", d + "/td/foreground.csv", "--bg", d + "/td/background.csv", "--method", "cpca++", "-k", "3",
        "--out", d + "/td.model"});
  step({"denoise", "--model", d + "/td.model", "--in", d + "/td/foreground_000.pgm", "--out", d + "/td_den.pgm", "-k",
        "3"});
  step({"fit", "--fg", d + "/hs/foreground.csv", "--bg", d + "/hs/background.csv", "--method", "cpca++", "-k", "1",
        "--out", d + "/hs.model"});
  step({"train-splice", "--train-dir", d + "/sp", "--out", d + "/splice.model"});
  step({"localize", "--model", d + "/splice.model", "--image", d + "/sp_test/image_000.ppm", "--out",
        d + "/map.pgm"});
  {
    std::vector<std::string> args{"cpcapp", "eval", "--pred", d + "/map.pgm", "--truth", d + "/sp_test/edge_000.pgm"};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ofstream out(d + "/eval.txt");
    std::ostringstream err;
    failures += cpcapp::cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err) != 0;
  }
  return failures;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[fs::relative(e.path(), dir).string()] = {std::istreambuf_iterator<char>(in),
                                                   std::istreambuf_iterator<char>()};
  }
  return files;
}

Outcome criterion_12() {
  const fs::path base = fs::temp_directory_path() / "cpcapp_acceptance";
  fs::remove_all(base);
  const int fail_a = run_pipelines(base / "a");
  const int fail_b = run_pipelines(base / "b");
  const auto a = snapshot(base / "a");
  const auto b = snapshot(base / "b");
  std::size_t differing = 0;
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    differing += it == b.end() || it->second != bytes;
  }
  differing += b.size() > a.size() ? b.size() - a.size() : 0;
  fs::remove_all(base);
  return {fail_a == 0 && fail_b == 0 && differing == 0 && !a.empty(),
          fmt("%zu output files per run, %zu differ; failed steps %d + %d", a.size(), differing, fail_a, fail_b)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 closed-form filters", criterion_1},   {"2 analytic eigenvalues", criterion_2},
      {"3 haystack example", criterion_3},      {"4 PCA negative control", criterion_4},
      {"5 cPCA at alpha 0", criterion_5},       {"6 efficiency", criterion_6},
      {"7 factorization", criterion_7},         {"8 GLRT", criterion_8},
      {"9 denoising", criterion_9},             {"10 splice localization", criterion_10},
      {"11 metrics", criterion_11},             {"12 determinism", criterion_12},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
