#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpcapp/datagen.hpp"
#include "cpcapp/reducers.hpp"
#include "cpcapp/statistics.hpp"

namespace cpcapp {

struct BenchOptions {
  std::size_t k = 2;
  std::vector<double> alphas = default_alpha_grid();
  // Each timing is the best of `repeats` batches; a batch repeats the fit
  // until it has run for at least min_batch_seconds.
  int repeats = 5;
  double min_batch_seconds = 0.02;
  unsigned threads = 1;
};

struct BenchEntry {
  Method method = Method::kPca;
  double seconds = 0.0;                  // wall-clock per fit
  std::uint64_t eigendecompositions = 0;  // per fit
};

struct BenchReport {
  std::string dataset;
  std::size_t features = 0;
  std::size_t n_fg = 0;
  std::size_t n_bg = 0;
  std::size_t k = 0;
  std::size_t grid_size = 0;
  double moment_seconds = 0.0;  // shared covariance estimation, not part of any entry
  std::vector<BenchEntry> entries;

  const BenchEntry* find(Method m) const;
  /// time_cpca / time_cpcapp; throws StateError if either method is missing.
  double speedup() const;
  std::string to_text() const;
};

/// Parses a comma-separated method list; throws ArgumentError on unknown names.
std::vector<Method> parse_methods(const std::string& list);

/// Times each method on the same covariance pair built from fg and bg.
BenchReport run_bench(const DataMatrix& fg, const DataMatrix& bg, const std::string& descriptor,
                      const std::vector<Method>& methods, const BenchOptions& options);

/// Generates the dataset described by spec, then benchmarks it. Spliced
/// images are not a sample dataset and are rejected with ArgumentError.
BenchReport run_bench(const SyntheticSpec& spec, const std::vector<Method>& methods, const BenchOptions& options);

}  // namespace cpcapp
