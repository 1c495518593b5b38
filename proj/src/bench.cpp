#include "cpcapp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <sstream>

#include "cpcapp/errors.hpp"
#include "cpcapp/linalg.hpp"
#include "cpcapp/text.hpp"

namespace cpcapp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Best per-call time over several batches, plus the eig count of one call.
BenchEntry time_fit(Method method, const std::function<void()>& fit, const BenchOptions& options) {
  BenchEntry entry;
  entry.method = method;
  const std::uint64_t before = eigendecomposition_count();
  fit();
  entry.eigendecompositions = eigendecomposition_count() - before;
  double best = 0.0;
  for (int r = 0; r < std::max(1, options.repeats); ++r) {
    const auto start = Clock::now();
    long calls = 0;
    double elapsed = 0.0;
    do {
      fit();
      ++calls;
      elapsed = seconds_since(start);
    } while (elapsed < options.min_batch_seconds);
    const double per_call = elapsed / static_cast<double>(calls);
    if (r == 0 || per_call < best) best = per_call;
  }
  entry.seconds = std::max(best, 1e-12);
  return entry;
}

}  // namespace

const BenchEntry* BenchReport::find(Method m) const {
  for (const auto& e : entries) {
    if (e.method == m) return &e;
  }
  return nullptr;
}

double BenchReport::speedup() const {
  const BenchEntry* slow = find(Method::kCpca);
  const BenchEntry* fast = find(Method::kCpcaPlusPlus);
  if (!slow || !fast) throw StateError("speedup needs both cpca and cpca++ entries");
  return slow->seconds / fast->seconds;
}

std::string BenchReport::to_text() const {
  std::ostringstream os;
  os << "dataset " << dataset << " M=" << features << " N_f=" << n_fg << " N_b=" << n_bg << " K=" << k
     << " alphas=" << grid_size << '\n';
  os << "moments_seconds " << format_short(moment_seconds) << '\n';
  os << "method,seconds,eigendecompositions\n";
  for (const auto& e : entries) {
    os << method_name(e.method) << ',' << format_short(e.seconds) << ',' << e.eigendecompositions << '\n';
  }
  if (find(Method::kCpca) && find(Method::kCpcaPlusPlus)) {
    const auto* slow = find(Method::kCpca);
    const auto* fast = find(Method::kCpcaPlusPlus);
    os << "speedup cpca/cpca++ " << format_short(speedup()) << '\n';
    os << "eig_ratio cpca/cpca++ " << slow->eigendecompositions << ':' << fast->eigendecompositions << '\n';
  }
  return os.str();
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> methods;
  for (auto name : split(list, ',')) {
    const Method m = parse_method(trim(name));
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
  }
  if (methods.empty()) throw ArgumentError("empty method list");
  return methods;
}

BenchReport run_bench(const DataMatrix& fg, const DataMatrix& bg, const std::string& descriptor,
                      const std::vector<Method>& methods, const BenchOptions& options) {
  if (methods.empty()) throw ArgumentError("run_bench: no methods");
  if (fg.features() != bg.features()) throw ShapeError("run_bench: foreground and background differ in M");
  if (options.k < 1 || options.k > fg.features()) throw ArgumentError("run_bench: k outside [1, M]");
  if (options.alphas.empty()) throw ArgumentError("run_bench: empty alpha grid");

  BenchReport report;
  report.dataset = descriptor;
  report.features = fg.features();
  report.n_fg = fg.samples();
  report.n_bg = bg.samples();
  report.k = options.k;
  report.grid_size = options.alphas.size();

  const auto start = Clock::now();
  const CovariancePair pair = build_covariance_pair(bg, fg);
  report.moment_seconds = seconds_since(start);

  for (Method m : methods) {
    switch (m) {
      case Method::kPca:
        report.entries.push_back(
            time_fit(m, [&] { (void)fit_pca_moment(pair.r_f, pair.mean_f, options.k); }, options));
        break;
      case Method::kCpca:
        report.entries.push_back(time_fit(
            m, [&] { (void)sweep_cpca(pair, options.k, options.alphas, options.threads); }, options));
        break;
      case Method::kCpcaPlusPlus:
        report.entries.push_back(time_fit(m, [&] { (void)fit_cpcapp(pair, options.k); }, options));
        break;
    }
  }
  return report;
}

BenchReport run_bench(const SyntheticSpec& spec, const std::vector<Method>& methods, const BenchOptions& options) {
  const std::string name = dataset_kind_name(spec.kind) + " seed=" + std::to_string(spec.seed);
  switch (spec.kind) {
    case DatasetKind::kFourClass: {
      const FourClassData d = gen_four_class(spec);
      return run_bench(d.foreground.data, d.background, name, methods, options);
    }
    case DatasetKind::kTexturedDigits: {
      const TexturedDigits d = gen_textured_digits(spec);
      return run_bench(d.foreground.data, d.background, name, methods, options);
    }
    case DatasetKind::kHaystack: {
      const Haystack h = gen_haystack(spec);
      Rng rng(spec.seed);
      const DataMatrix fg = sample_gaussian(h.r_f, spec.n_fg, rng);
      const DataMatrix bg = sample_gaussian(h.r_b, spec.n_bg, rng);
      return run_bench(fg, bg, name, methods, options);
    }
    case DatasetKind::kSplicedImage:
      break;
  }
  throw ArgumentError("bench: spliced-image is not a sample dataset; use four-class, haystack or textured-digits");
}

}  // namespace cpcapp
