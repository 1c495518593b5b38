#include "cpcapp/splicing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cpcapp/errors.hpp"

namespace cpcapp {

Image ProbabilityMap::to_image() const {
  Image img(width, height, 1);
  for (std::size_t i = 0; i < values.size(); ++i) img.pixels[i] = to_byte(255.0 * values[i]);
  return img;
}

ProbabilityMap ProbabilityMap::from_image(const Image& img) {
  if (img.empty()) throw ArgumentError("probability map: empty image");
  ProbabilityMap map{img.width, img.height, luma(img)};
  for (double& v : map.values) v /= 255.0;
  return map;
}

double otsu_threshold(std::span<const double> samples) {
  constexpr int kBins = 256;
  double top = 0.0;
  for (double v : samples) top = std::max(top, v);
  if (samples.empty() || top <= 0.0) return 0.0;
  std::vector<double> hist(kBins, 0.0);
  for (double v : samples) {
    const int b = std::min(kBins - 1, static_cast<int>(v / top * kBins));
    hist[std::max(b, 0)] += 1.0;
  }
  const double total = static_cast<double>(samples.size());
  double sum_all = 0.0;
  for (int b = 0; b < kBins; ++b) sum_all += b * hist[b];
  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int best_bin = 0;
  for (int b = 0; b < kBins - 1; ++b) {
    w0 += hist[b];
    sum0 += b * hist[b];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_bin = b;
    }
  }
  return top * (best_bin + 1) / kBins;
}

Image edge_mask(const Image& img) {
  if (img.empty()) throw ArgumentError("edge_mask: empty image");
  const int w = img.width, h = img.height;
  const std::vector<double> y = luma(img);
  auto at = [&](int px, int py) {
    px = std::clamp(px, 0, w - 1);
    py = std::clamp(py, 0, h - 1);
    return y[static_cast<std::size_t>(py) * w + px];
  };
  std::vector<double> mag(y.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double gx = (at(c + 1, r - 1) + 2 * at(c + 1, r) + at(c + 1, r + 1)) -
                        (at(c - 1, r - 1) + 2 * at(c - 1, r) + at(c - 1, r + 1));
      const double gy = (at(c - 1, r + 1) + 2 * at(c, r + 1) + at(c + 1, r + 1)) -
                        (at(c - 1, r - 1) + 2 * at(c, r - 1) + at(c + 1, r - 1));
      mag[static_cast<std::size_t>(r) * w + c] = std::hypot(gx, gy);
    }
  }
  const double t = otsu_threshold(mag);
  Image out(w, h, 1);
  if (t <= 0.0) return out;
  for (std::size_t i = 0; i < mag.size(); ++i) out.pixels[i] = mag[i] > t ? 255 : 0;
  return out;
}

PatchGrid extract_patches(const Image& img, int n, int stride) {
  if (img.empty()) throw ArgumentError("extract_patches: empty image");
  if (n < 1 || n > std::min(img.width, img.height)) {
    throw ArgumentError("extract_patches: patch size " + std::to_string(n) + " does not fit a " +
                        std::to_string(img.width) + "x" + std::to_string(img.height) + " image");
  }
  if (stride < 1) throw ArgumentError("extract_patches: stride must be at least 1");
  PatchGrid grid;
  grid.image_w = img.width;
  grid.image_h = img.height;
  grid.n = n;
  grid.stride = stride;
  grid.channels = img.channels;
  for (int y = 0; y + n <= img.height; y += stride) {
    for (int x = 0; x + n <= img.width; x += stride) grid.origins.emplace_back(x, y);
  }
  const std::size_t m = static_cast<std::size_t>(img.channels) * n * n;
  Matrix values(m, grid.origins.size());
  for (std::size_t j = 0; j < grid.origins.size(); ++j) {
    const auto [ox, oy] = grid.origins[j];
    for (int ch = 0; ch < img.channels; ++ch) {
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
          values(static_cast<std::size_t>(ch) * n * n + static_cast<std::size_t>(r) * n + c, j) =
              img.at(ox + c, oy + r, ch);
        }
      }
    }
  }
  grid.patches = DataMatrix(std::move(values));
  return grid;
}

Image patch_image(const PatchGrid& grid, std::size_t index) {
  if (index >= grid.count()) throw ArgumentError("patch_image: index out of range");
  if (grid.patches.centered()) throw StateError("patch_image: patches have been centered");
  const int n = grid.n;
  Image out(n, n, grid.channels);
  for (int ch = 0; ch < grid.channels; ++ch) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        out.at(c, r, ch) = to_byte(
            grid.patches.values()(static_cast<std::size_t>(ch) * n * n + static_cast<std::size_t>(r) * n + c, index));
      }
    }
  }
  return out;
}

namespace {

void require_dims(const PatchGrid& grid, const Image& img, const char* what) {
  if (img.width != grid.image_w || img.height != grid.image_h || img.channels != 1) {
    throw ShapeError(std::string(what) + " must be a single-channel image matching the patch grid");
  }
}

// Fraction of nonzero pixels of a 1-channel image inside one window.
double window_fraction(const Image& img, int ox, int oy, int n) {
  std::size_t hits = 0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) hits += img.at(ox + c, oy + r) != 0;
  }
  return static_cast<double>(hits) / (static_cast<double>(n) * n);
}

}  // namespace

PatchLabels label_patches(const PatchGrid& grid, const Image& surface_mask, const Image& edge, double lo,
                          double hi, double bg_edge_min) {
  if (lo > hi) throw ArgumentError("label_patches: fg range lower bound exceeds upper bound");
  require_dims(grid, surface_mask, "surface mask");
  require_dims(grid, edge, "edge mask");
  PatchLabels labels;
  for (std::size_t j = 0; j < grid.count(); ++j) {
    const auto [ox, oy] = grid.origins[j];
    const double spliced = window_fraction(surface_mask, ox, oy, grid.n);
    if (spliced >= lo && spliced <= hi) {
      labels.foreground.push_back(j);
    } else if (spliced == 0.0 && window_fraction(edge, ox, oy, grid.n) >= bg_edge_min) {
      labels.background.push_back(j);
    }
  }
  return labels;
}

Vector score_patches(const FilterBank& bank, const DataMatrix& test, Centering centering) {
  const Projection p = transform(bank, test, centering);
  const std::size_t n = p.y.cols();
  Vector v(n, 0.0);
  for (std::size_t i = 0; i < p.y.rows(); ++i) {
    const auto row = p.y.row(i);
    for (std::size_t j = 0; j < n; ++j) v[j] += row[j] * row[j];
  }
  const double top = *std::max_element(v.begin(), v.end());
  if (!(top > 0.0)) return Vector(n, 0.0);
  for (double& x : v) x /= top;
  return v;
}

ProbabilityMap reconstruct_map(std::span<const double> scores, const PatchGrid& grid, const Image& edge) {
  if (scores.size() != grid.count()) {
    throw ArgumentError("reconstruct_map: " + std::to_string(scores.size()) + " scores for " +
                        std::to_string(grid.count()) + " patches");
  }
  require_dims(grid, edge, "edge mask");
  const std::size_t npx = static_cast<std::size_t>(grid.image_w) * grid.image_h;
  std::vector<double> sum(npx, 0.0);
  std::vector<std::uint32_t> hits(npx, 0);
  for (std::size_t j = 0; j < grid.count(); ++j) {
    const auto [ox, oy] = grid.origins[j];
    for (int r = 0; r < grid.n; ++r) {
      for (int c = 0; c < grid.n; ++c) {
        const std::size_t i = static_cast<std::size_t>(oy + r) * grid.image_w + ox + c;
        sum[i] += scores[j];
        ++hits[i];
      }
    }
  }
  ProbabilityMap map{grid.image_w, grid.image_h, std::vector<double>(npx, 0.0)};
  for (std::size_t i = 0; i < npx; ++i) {
    if (hits[i] == 0 || edge.pixels[i] == 0) continue;
    map.values[i] = std::clamp(sum[i] / hits[i], 0.0, 1.0);
  }
  return map;
}

double f1_score(const ConfusionCounts& c) {
  const double denom = 2.0 * static_cast<double>(c.tp) + static_cast<double>(c.fn) + static_cast<double>(c.fp);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / denom;
}

double mcc_score(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
  const double a = tp + fp, b = tp + fn, d = tn + fp, e = tn + fn;
  if (a == 0.0 || b == 0.0 || d == 0.0 || e == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(a * b * d * e);
}

ConfusionCounts binarize_and_score(const ProbabilityMap& map, const Image& truth, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ArgumentError("threshold must lie in [0, 1]");
  if (truth.width != map.width || truth.height != map.height || truth.channels != 1 ||
      map.values.size() != truth.pixels.size()) {
    throw ShapeError("binarize_and_score: map and truth dimensions differ");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const bool pred = map.values[i] >= threshold;
    const bool actual = truth.pixels[i] != 0;
    if (pred && actual) {
      ++c.tp;
    } else if (pred) {
      ++c.fp;
    } else if (actual) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

double random_scorer_f1(const Image& edge, const Image& truth, double threshold) {
  if (edge.width != truth.width || edge.height != truth.height || edge.channels != 1 || truth.channels != 1) {
    throw ShapeError("random_scorer_f1: mask dimensions differ");
  }
  const double q = 1.0 - std::clamp(threshold, 0.0, 1.0);
  double e = 0.0, t = 0.0, both = 0.0;
  for (std::size_t i = 0; i < edge.pixels.size(); ++i) {
    const bool in_e = edge.pixels[i] != 0;
    const bool in_t = truth.pixels[i] != 0;
    e += in_e;
    t += in_t;
    both += in_e && in_t;
  }
  const double denom = q * e + t;
  return denom == 0.0 ? 0.0 : 2.0 * q * both / denom;
}

namespace {

Matrix select_columns(const Matrix& src, const std::vector<std::size_t>& idx) {
  Matrix out(src.rows(), idx.size());
  for (std::size_t r = 0; r < src.rows(); ++r) {
    const auto in = src.row(r);
    auto dst = out.row(r);
    for (std::size_t j = 0; j < idx.size(); ++j) dst[j] = in[idx[j]];
  }
  return out;
}

Matrix hconcat(const std::vector<Matrix>& parts, std::size_t rows) {
  std::size_t cols = 0;
  for (const auto& p : parts) cols += p.cols();
  Matrix out(rows, cols);
  std::size_t at = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(p.row(r).begin(), p.row(r).end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(at));
    }
    at += p.cols();
  }
  return out;
}

}  // namespace

std::pair<DataMatrix, DataMatrix> collect_training_patches(std::span<const TrainingImage> images,
                                                           const SpliceConfig& cfg) {
  if (images.empty()) throw ArgumentError("train-splice: no training images");
  std::vector<Matrix> fg_parts, bg_parts;
  std::size_t m = 0;
  for (const auto& ti : images) {
    const PatchGrid grid = extract_patches(ti.probe, cfg.n, cfg.stride);
    if (m == 0) m = grid.patches.features();
    if (grid.patches.features() != m) throw ShapeError("train-splice: images differ in channel count");
    const Image edge = edge_mask(ti.probe);
    const PatchLabels labels =
        label_patches(grid, ti.surface_mask, edge, cfg.fg_lo, cfg.fg_hi, cfg.bg_edge_min);
    fg_parts.push_back(select_columns(grid.patches.values(), labels.foreground));
    bg_parts.push_back(select_columns(grid.patches.values(), labels.background));
  }
  Matrix fg = hconcat(fg_parts, m);
  Matrix bg = hconcat(bg_parts, m);
  if (fg.cols() == 0) throw ArgumentError("train-splice: no foreground patches found");
  if (bg.cols() == 0) throw ArgumentError("train-splice: no background patches found");
  return {DataMatrix(std::move(fg)), DataMatrix(std::move(bg))};
}

FilterBank train_splice(std::span<const TrainingImage> images, const SpliceConfig& cfg) {
  const auto [fg, bg] = collect_training_patches(images, cfg);
  switch (cfg.method) {
    case Method::kPca:
      return fit_pca(fg, cfg.k);
    case Method::kCpca:
      return fit_cpca(build_covariance_pair(bg, fg), cfg.k, cfg.alpha);
    case Method::kCpcaPlusPlus:
      break;
  }
  return fit_cpcapp(build_covariance_pair(bg, fg), cfg.k);
}

ProbabilityMap localize(const FilterBank& bank, const Image& probe, const SpliceConfig& cfg) {
  const PatchGrid grid = extract_patches(probe, cfg.n, cfg.stride);
  if (grid.patches.features() != bank.features()) {
    throw ShapeError("localize: model expects " + std::to_string(bank.features()) + " features, image patches have " +
                     std::to_string(grid.patches.features()));
  }
  const Vector scores = score_patches(bank, grid.patches, cfg.centering);
  return reconstruct_map(scores, grid, edge_mask(probe));
}

}  // namespace cpcapp
