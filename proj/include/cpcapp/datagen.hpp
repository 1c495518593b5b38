#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cpcapp/image.hpp"
#include "cpcapp/matrix.hpp"
#include "cpcapp/statistics.hpp"

namespace cpcapp {

/// Portable random stream: mt19937_64 with hand-written uniform and Gaussian
/// transforms, so the output does not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Integer uniform on [0, n). Uses rejection to avoid modulo bias.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

enum class DatasetKind { kFourClass, kHaystack, kTexturedDigits, kSplicedImage };

DatasetKind parse_dataset_kind(const std::string& name);
std::string dataset_kind_name(DatasetKind kind);

struct SyntheticSpec {
  DatasetKind kind = DatasetKind::kFourClass;
  std::uint64_t seed = 0;
  std::size_t n_fg = 0;
  std::size_t n_bg = 0;
  std::map<std::string, double> params;

  /// Spec with the default counts and parameters of a kind.
  static SyntheticSpec defaults(DatasetKind kind, std::uint64_t seed = 0);
  double param(const std::string& name, double fallback) const;
};

struct LabeledDataset {
  DataMatrix data;
  std::vector<int> labels;
};

// ---------------------------------------------------------------------------
// Four-class mixture, M = 30 as three 10-dimensional blocks h1, h2, h3.
// Foreground class k in {1,2,3,4} shifts h1 by 0 or 6 and h2 by 0 or 3
// (classes 1..4 = (0,0), (0,3), (6,0), (6,3)). Block spreads are 1, 1, 10 in
// the foreground and 3, 1, 10 in the background.
//
// param "stddev" (default 0): when 1 the spreads are read as standard
// deviations instead of variances.
// ---------------------------------------------------------------------------

struct FourClassData {
  LabeledDataset foreground;
  DataMatrix background;
};

FourClassData gen_four_class(const SyntheticSpec& spec);

/// Closed-form filters: block indicator vectors of h1 and h2, each scaled by 1/√10.
Matrix oracle_four_class_filters();

/// Exact population Q = R_b⁻¹R_f of the four-class model (variance reading).
Matrix analytic_four_class_q();

// ---------------------------------------------------------------------------
// Needle in a haystack: R_b = γ·aaᵀ + ρ·I, R_f = β·aaᵀ + ε·ccᵀ with a = e1,
// c = e2. Parameters gamma, beta, eps, rho, M.
// ---------------------------------------------------------------------------

struct Haystack {
  Matrix r_b;
  Matrix r_f;
  Vector c;
  Vector a;
};

/// "x ≪ y" is checked as x ≤ kMuchSmaller·y.
inline constexpr double kMuchSmaller = 0.1;

/// Throws ArgumentError if any constraint on the parameters is violated.
Haystack gen_haystack(const SyntheticSpec& spec);

/// N zero-mean Gaussian samples with covariance cov (PSD allowed).
DataMatrix sample_gaussian(const Matrix& cov, std::size_t n, Rng& rng);

// ---------------------------------------------------------------------------
// Textured digits: 28×28 glyphs (ring = label 0, bar = label 1) added on top
// of smoothed-noise texture. Parameters: texture_std (30), blur_sigma (1.5),
// contrast (8), noise_std (2).
// ---------------------------------------------------------------------------

struct TexturedDigits {
  LabeledDataset foreground;
  DataMatrix background;
  /// Glyph layer of each foreground sample (what was added to the texture).
  DataMatrix clean;
};

inline constexpr int kDigitSide = 28;

TexturedDigits gen_textured_digits(const SyntheticSpec& spec);

// ---------------------------------------------------------------------------
// Spliced image: a donor region (random star polygon) pasted into a host
// scene of anti-aliased rectangles and discs. The donor differs in mean level
// and texture statistics, and the composite carries a colour fringe (zero
// luma) in a band around the splice boundary.
//
// Parameters (defaults): width, height (96); area_min, area_max (0.05, 0.15)
// as fractions of the image; shapes_min, shapes_max (14, 20) authentic shape
// count; shape_min, shape_max (0.04, 0.12) shape half-size as a fraction of
// the image side; feather (2) anti-aliasing box radius; halo (8) fringe band
// radius; fringe_min, fringe_max (25, 40) fringe amplitude; star_min (0.55)
// smallest polygon radius relative to the largest; donor_blur (2),
// donor_texture (6), donor_noise (2); shift_min, shift_max (50, 60) donor
// grey-level offset from the host; offset_min, offset_max (45, 60) the same
// for authentic shapes.
// ---------------------------------------------------------------------------

struct SplicedImage {
  Image probe;         // RGB
  Image surface_mask;  // 255 on spliced pixels
  Image edge_truth;    // 255 on the splice boundary, dilated by one pixel
};

SplicedImage gen_spliced_image(const SyntheticSpec& spec);

/// Independent seed for item `stream` of a batch generated from `seed`
/// (splitmix64 finaliser), so consecutive batch seeds do not share items.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Pixels of mask (nonzero) that have an 8-neighbour outside the mask.
Image mask_boundary(const Image& mask);
/// 3×3 binary dilation.
Image dilate(const Image& mask);

}  // namespace cpcapp
