#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cpcapp/image.hpp"
#include "cpcapp/reducers.hpp"
#include "cpcapp/statistics.hpp"

namespace cpcapp {

/// Overlapping n×n windows of an image, flattened as columns. Element
/// ch·n² + r·n + c of a column holds channel ch at window row r, column c.
struct PatchGrid {
  int image_w = 0;
  int image_h = 0;
  int n = 0;
  int stride = 0;
  int channels = 0;
  DataMatrix patches;
  std::vector<std::pair<int, int>> origins;  // (x, y) of each window's top-left pixel

  std::size_t count() const { return origins.size(); }
};

struct ProbabilityMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  /// 8-bit rendering, round(255·p).
  Image to_image() const;
  static ProbabilityMap from_image(const Image& img);
};

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  bool operator==(const ConfusionCounts&) const = default;
};

/// Sobel gradient magnitude of the luma, thresholded at Otsu's level. 0/255.
Image edge_mask(const Image& img);

/// Otsu threshold of non-negative samples over a 256-bin histogram on
/// [0, max]. Returns the upper edge of the last background bin (0 when all
/// samples are equal).
double otsu_threshold(std::span<const double> samples);

PatchGrid extract_patches(const Image& img, int n, int stride);

/// Pixel window of one patch column, inverse of the flattening.
Image patch_image(const PatchGrid& grid, std::size_t index);

struct PatchLabels {
  std::vector<std::size_t> foreground;
  std::vector<std::size_t> background;
};

/// Foreground: spliced fraction in [lo, hi]. Background: no spliced pixel and
/// an edge-pixel fraction of at least bg_edge_min. Everything else is left out.
PatchLabels label_patches(const PatchGrid& grid, const Image& surface_mask, const Image& edge, double lo,
                          double hi, double bg_edge_min);

/// Output power of each patch after projection, normalised by its maximum.
/// All zeros when every patch has zero power.
Vector score_patches(const FilterBank& bank, const DataMatrix& test, Centering centering = Centering::kOwnMean);

/// Average of the scores of the patches covering each pixel, accumulated in
/// patch order, then multiplied by the 0/1 edge mask.
ProbabilityMap reconstruct_map(std::span<const double> scores, const PatchGrid& grid, const Image& edge);

/// 2·TP / (2·TP + FN + FP), or 0 when the denominator is 0.
double f1_score(const ConfusionCounts& c);
/// Matthews correlation coefficient, or 0 when any marginal is 0.
double mcc_score(const ConfusionCounts& c);

/// A pixel is positive iff its probability is ≥ threshold; truth is positive
/// where nonzero.
ConfusionCounts binarize_and_score(const ProbabilityMap& map, const Image& truth, double threshold);

/// Expected F1 of a scorer that gives each edge-mask pixel an independent
/// uniform score (pixels outside the mask score 0), at the given threshold.
double random_scorer_f1(const Image& edge, const Image& truth, double threshold);

struct SpliceConfig {
  int n = 8;
  int stride = 4;
  double fg_lo = 0.3;
  double fg_hi = 0.7;
  double bg_edge_min = 0.05;
  double threshold = 0.5;
  std::size_t k = 6;
  Method method = Method::kCpcaPlusPlus;
  double alpha = 1.0;  // cpca only
  Centering centering = Centering::kOwnMean;
};

struct TrainingImage {
  Image probe;
  Image surface_mask;
};

/// Labeled training patches pooled over all images (foreground, background).
std::pair<DataMatrix, DataMatrix> collect_training_patches(std::span<const TrainingImage> images,
                                                           const SpliceConfig& cfg);

/// Collects patches and fits a bank with cfg.method.
FilterBank train_splice(std::span<const TrainingImage> images, const SpliceConfig& cfg);

/// Probability map of spliced-boundary pixels for one image.
ProbabilityMap localize(const FilterBank& bank, const Image& probe, const SpliceConfig& cfg);

}  // namespace cpcapp
