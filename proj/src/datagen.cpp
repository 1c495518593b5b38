#include "cpcapp/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cpcapp/errors.hpp"
#include "cpcapp/linalg.hpp"

namespace cpcapp {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("Rng::below: empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(t);
  has_cached_ = true;
  return r * std::cos(t);
}

DatasetKind parse_dataset_kind(const std::string& name) {
  if (name == "four-class") return DatasetKind::kFourClass;
  if (name == "haystack") return DatasetKind::kHaystack;
  if (name == "textured-digits") return DatasetKind::kTexturedDigits;
  if (name == "spliced-image") return DatasetKind::kSplicedImage;
  throw ArgumentError("unknown dataset kind '" + name +
                      "' (expected four-class, haystack, textured-digits or spliced-image)");
}

std::string dataset_kind_name(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kFourClass:
      return "four-class";
    case DatasetKind::kHaystack:
      return "haystack";
    case DatasetKind::kTexturedDigits:
      return "textured-digits";
    case DatasetKind::kSplicedImage:
      return "spliced-image";
  }
  return "?";
}

SyntheticSpec SyntheticSpec::defaults(DatasetKind kind, std::uint64_t seed) {
  SyntheticSpec s;
  s.kind = kind;
  s.seed = seed;
  switch (kind) {
    case DatasetKind::kFourClass:
      s.n_fg = s.n_bg = 400;
      s.params = {{"stddev", 0.0}};
      break;
    case DatasetKind::kHaystack:
      s.n_fg = s.n_bg = 10000;
      s.params = {{"gamma", 10.0}, {"beta", 5.0}, {"eps", 0.1}, {"rho", 0.01}, {"M", 4.0}};
      break;
    case DatasetKind::kTexturedDigits:
      s.n_fg = s.n_bg = 5000;
      s.params = {{"texture_std", 30.0}, {"blur_sigma", 1.5}, {"contrast", 8.0}, {"noise_std", 2.0}};
      break;
    case DatasetKind::kSplicedImage:
      s.n_fg = s.n_bg = 1;
      s.params = {{"width", 96.0},      {"height", 96.0},       {"area_min", 0.05},  {"area_max", 0.15},
                  {"shapes_min", 14.0}, {"shapes_max", 20.0},   {"shape_min", 0.04}, {"shape_max", 0.12},
                  {"feather", 2.0},     {"halo", 8.0},          {"fringe_min", 25.0}, {"fringe_max", 40.0},
                  {"star_min", 0.55},   {"donor_blur", 2.0},    {"donor_texture", 6.0}, {"donor_noise", 2.0},
                  {"shift_min", 50.0},  {"shift_max", 60.0},
                  {"offset_min", 45.0}, {"offset_max", 60.0}};
      break;
  }
  return s;
}

double SyntheticSpec::param(const std::string& name, double fallback) const {
  const auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

namespace {

void require_counts(const SyntheticSpec& spec) {
  if (spec.n_fg < 1 || spec.n_bg < 1) throw ArgumentError("dataset counts must be at least 1");
}

void require_kind(const SyntheticSpec& spec, DatasetKind kind) {
  if (spec.kind != kind) {
    throw ArgumentError("generator for " + dataset_kind_name(kind) + " called with a " +
                        dataset_kind_name(spec.kind) + " spec");
  }
}

constexpr std::size_t kBlock = 10;

}  // namespace

FourClassData gen_four_class(const SyntheticSpec& spec) {
  require_kind(spec, DatasetKind::kFourClass);
  require_counts(spec);
  const bool stddev = spec.param("stddev", 0.0) != 0.0;
  auto spread = [stddev](double v) { return stddev ? v : std::sqrt(v); };
  const double fg_sd[3] = {spread(1.0), spread(1.0), spread(10.0)};
  const double bg_sd[3] = {spread(3.0), spread(1.0), spread(10.0)};

  Rng rng(spec.seed);
  FourClassData out;
  Matrix fg(3 * kBlock, spec.n_fg);
  out.foreground.labels.resize(spec.n_fg);
  // Equally likely classes: a shuffled, balanced allocation (counts differ by
  // at most one), which keeps the block shifts uncorrelated in the sample.
  for (std::size_t j = 0; j < spec.n_fg; ++j) out.foreground.labels[j] = 1 + static_cast<int>(j % 4);
  for (std::size_t j = spec.n_fg; j > 1; --j) std::swap(out.foreground.labels[j - 1], out.foreground.labels[rng.below(j)]);
  for (std::size_t j = 0; j < spec.n_fg; ++j) {
    const int k = out.foreground.labels[j];
    const double shift[3] = {k >= 3 ? 6.0 : 0.0, (k == 2 || k == 4) ? 3.0 : 0.0, 0.0};
    for (std::size_t b = 0; b < 3; ++b) {
      for (std::size_t i = 0; i < kBlock; ++i) fg(b * kBlock + i, j) = shift[b] + fg_sd[b] * rng.normal();
    }
  }
  Matrix bg(3 * kBlock, spec.n_bg);
  for (std::size_t j = 0; j < spec.n_bg; ++j) {
    for (std::size_t b = 0; b < 3; ++b) {
      for (std::size_t i = 0; i < kBlock; ++i) bg(b * kBlock + i, j) = bg_sd[b] * rng.normal();
    }
  }
  out.foreground.data = DataMatrix(std::move(fg));
  out.background = DataMatrix(std::move(bg));
  return out;
}

Matrix oracle_four_class_filters() {
  Matrix f(3 * kBlock, 2);
  const double v = 1.0 / std::sqrt(static_cast<double>(kBlock));
  for (std::size_t i = 0; i < kBlock; ++i) {
    f(i, 0) = v;
    f(kBlock + i, 1) = v;
  }
  return f;
}

Matrix analytic_four_class_q() {
  // Population moments: R_b = diag(3,1,10)⊗I, R_f = diag(9,2.25,0)⊗11ᵀ + diag(1,1,10)⊗I.
  // The h1 shift takes values 0 and 6 with equal probability (variance 9), the
  // h2 shift 0 and 3 (variance 2.25).
  const std::size_t m = 3 * kBlock;
  Matrix r_b(m, m), r_f(m, m);
  const double bg_var[3] = {3.0, 1.0, 10.0};
  const double fg_var[3] = {1.0, 1.0, 10.0};
  const double shift_var[3] = {9.0, 2.25, 0.0};
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t i = 0; i < kBlock; ++i) {
      r_b(b * kBlock + i, b * kBlock + i) = bg_var[b];
      for (std::size_t j = 0; j < kBlock; ++j) r_f(b * kBlock + i, b * kBlock + j) = shift_var[b];
      r_f(b * kBlock + i, b * kBlock + i) += fg_var[b];
    }
  }
  return solve(r_b, r_f);
}

Haystack gen_haystack(const SyntheticSpec& spec) {
  require_kind(spec, DatasetKind::kHaystack);
  const double gamma = spec.param("gamma", 10.0);
  const double beta = spec.param("beta", 5.0);
  const double eps = spec.param("eps", 0.1);
  const double rho = spec.param("rho", 0.01);
  const double m_d = spec.param("M", 4.0);
  for (double v : {gamma, beta, eps, rho}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError("haystack: gamma, beta, eps and rho must be positive");
  }
  if (!(m_d >= 2.0) || m_d != std::floor(m_d) || m_d > 1e6) throw ArgumentError("haystack: M must be an integer >= 2");
  if (!(eps <= kMuchSmaller * beta)) throw ArgumentError("haystack: eps must be much smaller than beta");
  if (!(beta * rho / gamma < eps)) throw ArgumentError("haystack: beta*rho/gamma must be below eps");
  if (!(rho <= kMuchSmaller * gamma)) throw ArgumentError("haystack: rho must be much smaller than gamma");

  const auto m = static_cast<std::size_t>(m_d);
  Haystack h;
  h.a.assign(m, 0.0);
  h.c.assign(m, 0.0);
  h.a[0] = 1.0;
  h.c[1] = 1.0;
  h.r_b = Matrix(m, m);
  h.r_f = Matrix(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      h.r_b(i, j) = gamma * h.a[i] * h.a[j] + (i == j ? rho : 0.0);
      h.r_f(i, j) = beta * h.a[i] * h.a[j] + eps * h.c[i] * h.c[j];
    }
  }
  return h;
}

DataMatrix sample_gaussian(const Matrix& cov, std::size_t n, Rng& rng) {
  if (n < 1) throw ArgumentError("sample_gaussian: need at least one sample");
  const EigenResult e = sym_eig(cov);
  const std::size_t m = cov.rows();
  Matrix factor = e.vectors;
  for (std::size_t c = 0; c < m; ++c) {
    const double s = std::sqrt(std::max(e.values[c], 0.0));
    for (std::size_t r = 0; r < m; ++r) factor(r, c) *= s;
  }
  Matrix g(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) g(i, j) = rng.normal();
  }
  return DataMatrix(factor * g);
}

namespace {

Vector gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  Vector k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Zero-mean stationary noise field with standard deviation `sd`: white noise
// on a padded canvas, separable Gaussian blur, cropped to w×h and rescaled by
// the kernel's exact variance gain.
std::vector<double> smooth_noise(int w, int h, double sigma, double sd, Rng& rng) {
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  if (sigma <= 0.0) {
    for (double& v : out) v = sd * rng.normal();
    return out;
  }
  const Vector k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  const int pw = w + 2 * r;
  const int ph = h + 2 * r;
  std::vector<double> noise(static_cast<std::size_t>(pw) * ph);
  for (double& v : noise) v = rng.normal();
  std::vector<double> rows(static_cast<std::size_t>(pw) * h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < pw; ++x) {
      double acc = 0.0;
      for (int t = 0; t < static_cast<int>(k.size()); ++t) acc += k[t] * noise[static_cast<std::size_t>(y + t) * pw + x];
      rows[static_cast<std::size_t>(y) * pw + x] = acc;
    }
  }
  double gain = 0.0;
  for (double v : k) gain += v * v;
  const double scale = sd / gain;  // the 2-D variance gain is gain²
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int t = 0; t < static_cast<int>(k.size()); ++t) acc += k[t] * rows[static_cast<std::size_t>(y) * pw + x + t];
      out[static_cast<std::size_t>(y) * w + x] = scale * acc;
    }
  }
  return out;
}

// Glyph intensity in [0, 1] on a kDigitSide² canvas.
std::vector<double> draw_glyph(int label, Rng& rng) {
  const int n = kDigitSide;
  std::vector<double> g(static_cast<std::size_t>(n) * n, 0.0);
  const double cx = 13.5 + rng.uniform(-2.0, 2.0);
  const double cy = 13.5 + rng.uniform(-2.0, 2.0);
  const double width = rng.uniform(1.0, 1.6);
  if (label == 0) {
    const double rx = rng.uniform(5.5, 8.0);
    const double ry = rx * rng.uniform(1.0, 1.35);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double dx = (x - cx) / rx;
        const double dy = (y - cy) / ry;
        const double rr = std::sqrt(dx * dx + dy * dy);
        const double dist = (rr - 1.0) * std::min(rx, ry);
        g[static_cast<std::size_t>(y) * n + x] = std::exp(-0.5 * dist * dist / (width * width));
      }
    }
  } else {
    const double angle = rng.uniform(-0.35, 0.35);
    const double half = rng.uniform(7.0, 10.0);
    const double ux = std::sin(angle);
    const double uy = std::cos(angle);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double px = x - cx;
        const double py = y - cy;
        const double along = std::clamp(px * ux + py * uy, -half, half);
        const double dx = px - along * ux;
        const double dy = py - along * uy;
        const double dist2 = dx * dx + dy * dy;
        g[static_cast<std::size_t>(y) * n + x] = std::exp(-0.5 * dist2 / (width * width));
      }
    }
  }
  return g;
}

}  // namespace

TexturedDigits gen_textured_digits(const SyntheticSpec& spec) {
  require_kind(spec, DatasetKind::kTexturedDigits);
  require_counts(spec);
  const double texture_std = spec.param("texture_std", 30.0);
  const double blur = spec.param("blur_sigma", 1.5);
  const double contrast = spec.param("contrast", 8.0);
  const double noise_std = spec.param("noise_std", 2.0);
  if (!(texture_std >= 0.0) || !(blur >= 0.0) || !(noise_std >= 0.0) || !std::isfinite(contrast)) {
    throw ArgumentError("textured-digits: invalid parameters");
  }
  constexpr double kMean = 128.0;
  const std::size_t m = static_cast<std::size_t>(kDigitSide) * kDigitSide;

  Rng rng(spec.seed);
  auto texture = [&](Matrix& dst, std::size_t col) {
    const auto t = smooth_noise(kDigitSide, kDigitSide, blur, texture_std, rng);
    for (std::size_t i = 0; i < m; ++i) dst(i, col) = kMean + t[i] + noise_std * rng.normal();
  };

  TexturedDigits out;
  Matrix fg(m, spec.n_fg), clean(m, spec.n_fg);
  out.foreground.labels.resize(spec.n_fg);
  for (std::size_t j = 0; j < spec.n_fg; ++j) {
    const int label = static_cast<int>(rng.below(2));
    out.foreground.labels[j] = label;
    const auto g = draw_glyph(label, rng);
    texture(fg, j);
    for (std::size_t i = 0; i < m; ++i) {
      clean(i, j) = contrast * g[i];
      fg(i, j) += clean(i, j);
    }
  }
  Matrix bg(m, spec.n_bg);
  for (std::size_t j = 0; j < spec.n_bg; ++j) texture(bg, j);
  out.foreground.data = DataMatrix(std::move(fg));
  out.background = DataMatrix(std::move(bg));
  out.clean = DataMatrix(std::move(clean));
  return out;
}

Image mask_boundary(const Image& mask) {
  Image out(mask.width, mask.height, 1);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      bool edge = false;
      for (int dy = -1; dy <= 1 && !edge; ++dy) {
        for (int dx = -1; dx <= 1 && !edge; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
          edge = mask.at(nx, ny) == 0;
        }
      }
      if (edge) out.at(x, y) = 255;
    }
  }
  return out;
}

Image dilate(const Image& mask) {
  Image out(mask.width, mask.height, 1);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      bool hit = false;
      for (int dy = -1; dy <= 1 && !hit; ++dy) {
        for (int dx = -1; dx <= 1 && !hit; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
          hit = mask.at(nx, ny) != 0;
        }
      }
      if (hit) out.at(x, y) = 255;
    }
  }
  return out;
}

namespace {

struct Point {
  double x, y;
};

bool inside_polygon(const std::vector<Point>& poly, double px, double py) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > py) != (b.y > py) && px < (b.x - a.x) * (py - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

// Random star-shaped polygon rasterised at pixel centres, with pixel area in
// [lo, hi]·w·h.
Image splice_region(int w, int h, double lo, double hi, double r_min, Rng& rng) {
  const double total = static_cast<double>(w) * h;
  for (int attempt = 0; attempt < 200; ++attempt) {
    const int vertices = 7 + static_cast<int>(rng.below(6));
    std::vector<double> radii(vertices);
    for (double& r : radii) r = rng.uniform(r_min, 1.0);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    std::vector<Point> unit(vertices);
    double area = 0.0;
    for (int i = 0; i < vertices; ++i) {
      const double t = phase + 2.0 * std::numbers::pi * i / vertices;
      unit[i] = {radii[i] * std::cos(t), radii[i] * std::sin(t)};
    }
    for (int i = 0; i < vertices; ++i) {
      const Point& a = unit[i];
      const Point& b = unit[(i + 1) % vertices];
      area += 0.5 * (a.x * b.y - b.x * a.y);
    }
    const double target = rng.uniform(lo, hi) * total;
    const double scale = std::sqrt(target / area);
    const double margin = 3.0;
    const double reach = scale;  // every vertex lies within the unit disc
    if (2.0 * (reach + margin) >= std::min(w, h)) continue;
    const double cx = rng.uniform(reach + margin, w - reach - margin);
    const double cy = rng.uniform(reach + margin, h - reach - margin);
    std::vector<Point> poly(vertices);
    for (int i = 0; i < vertices; ++i) poly[i] = {cx + scale * unit[i].x, cy + scale * unit[i].y};

    Image mask(w, h, 1);
    std::size_t count = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (inside_polygon(poly, x + 0.5, y + 0.5)) {
          mask.at(x, y) = 255;
          ++count;
        }
      }
    }
    const double frac = static_cast<double>(count) / total;
    if (frac >= lo && frac <= hi) return mask;
  }
  throw ArgumentError("spliced-image: could not place a region with the requested area bounds");
}

// Box average of a 0/255 mask over a (2r+1)² window, values in [0, 1].
std::vector<double> box_average(const Image& mask, int r) {
  const int w = mask.width, h = mask.height;
  std::vector<double> out(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          acc += mask.at(std::clamp(x + dx, 0, w - 1), std::clamp(y + dy, 0, h - 1)) ? 1.0 : 0.0;
        }
      }
      out[static_cast<std::size_t>(y) * w + x] = acc / ((2.0 * r + 1) * (2.0 * r + 1));
    }
  }
  return out;
}

struct Layer {
  std::vector<double> rgb;  // interleaved
};

// Smooth-textured colour field with base colour `base`.
Layer textured_layer(int w, int h, const double base[3], double blur, double texture_sd, double noise_sd, Rng& rng) {
  const auto t = smooth_noise(w, h, blur, texture_sd, rng);
  Layer l;
  l.rgb.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (int c = 0; c < 3; ++c) l.rgb[i * 3 + c] = base[c] + t[i] + noise_sd * rng.normal();
  }
  return l;
}

}  // namespace

SplicedImage gen_spliced_image(const SyntheticSpec& spec) {
  require_kind(spec, DatasetKind::kSplicedImage);
  const double w_d = spec.param("width", 96.0);
  const double h_d = spec.param("height", 96.0);
  const double lo = spec.param("area_min", 0.05);
  const double hi = spec.param("area_max", 0.15);
  const double fringe_lo = spec.param("fringe_min", 25.0);
  const double fringe_hi = spec.param("fringe_max", 40.0);
  const double halo_radius = spec.param("halo", 8.0);
  if (!(w_d >= 16 && h_d >= 16 && w_d <= 8192 && h_d <= 8192) || w_d != std::floor(w_d) || h_d != std::floor(h_d)) {
    throw ArgumentError("spliced-image: width and height must be integers in [16, 8192]");
  }
  if (!(lo > 0.0 && lo <= hi && hi < 1.0)) throw ArgumentError("spliced-image: need 0 < area_min <= area_max < 1");
  if (!(fringe_lo >= 0.0 && fringe_lo <= fringe_hi) || !(halo_radius >= 1.0 && halo_radius <= 64.0)) {
    throw ArgumentError("spliced-image: invalid fringe or halo parameters");
  }
  if (!(spec.param("shift_min", 50.0) >= 0.0 && spec.param("shift_min", 50.0) <= spec.param("shift_max", 60.0))) {
    throw ArgumentError("spliced-image: need 0 <= shift_min <= shift_max");
  }
  if (!(spec.param("offset_min", 45.0) >= 0.0 && spec.param("offset_min", 45.0) <= spec.param("offset_max", 60.0))) {
    throw ArgumentError("spliced-image: need 0 <= offset_min <= offset_max");
  }
  const double feather_d = spec.param("feather", 2.0);
  if (!(feather_d >= 0.0 && feather_d <= 16.0) || !(spec.param("shapes_min", 14.0) >= 0.0) ||
      !(spec.param("shape_min", 0.04) > 0.0) || !(spec.param("shape_max", 0.12) >= spec.param("shape_min", 0.04)) ||
      !(spec.param("star_min", 0.55) > 0.0 && spec.param("star_min", 0.55) <= 1.0)) {
    throw ArgumentError("spliced-image: invalid feather, shape or star parameters");
  }
  const int w = static_cast<int>(w_d);
  const int h = static_cast<int>(h_d);
  const std::size_t npx = static_cast<std::size_t>(w) * h;

  Rng rng(spec.seed);
  const double gray = rng.uniform(80.0, 170.0);
  double host_base[3];
  for (double& b : host_base) b = gray + rng.uniform(-6.0, 6.0);
  Layer host = textured_layer(w, h, host_base, 2.5, 6.0, 1.5, rng);

  SplicedImage out;
  out.surface_mask = splice_region(w, h, lo, hi, spec.param("star_min", 0.55), rng);

  // Authentic structure: flat-shaded rectangles and discs, anti-aliased with
  // the same feather as the splice and kept clear of the spliced region so
  // the two kinds of edge never touch.
  const int feather = static_cast<int>(feather_d);
  Image keep_out = out.surface_mask;
  for (int i = 0; i < 10; ++i) keep_out = dilate(keep_out);
  const int shapes_lo = static_cast<int>(spec.param("shapes_min", 14.0));
  const int shapes_hi = std::max(shapes_lo, static_cast<int>(spec.param("shapes_max", 20.0)));
  const int shapes = shapes_lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(shapes_hi - shapes_lo + 1)));
  const double offset_lo = spec.param("offset_min", 45.0);
  const double offset_hi = spec.param("offset_max", 60.0);
  const double size_lo = spec.param("shape_min", 0.04);
  const double size_hi = spec.param("shape_max", 0.12);
  for (int s = 0; s < shapes; ++s) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      const double offset = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(offset_lo, offset_hi);
      const double tint[3] = {rng.uniform(0.92, 1.08), rng.uniform(0.92, 1.08), rng.uniform(0.92, 1.08)};
      const bool disc = rng.uniform() < 0.5;
      const double cx = rng.uniform(0.0, w);
      const double cy = rng.uniform(0.0, h);
      const double sx = rng.uniform(size_lo, size_hi) * w;
      const double sy = rng.uniform(size_lo, size_hi) * h;
      Image shape(w, h, 1);
      bool clash = false;
      for (int y = 0; y < h && !clash; ++y) {
        for (int x = 0; x < w; ++x) {
          const double dx = (x + 0.5 - cx) / sx;
          const double dy = (y + 0.5 - cy) / sy;
          const bool in = disc ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
          if (!in) continue;
          if (keep_out.at(x, y)) {
            clash = true;
            break;
          }
          shape.at(x, y) = 255;
        }
      }
      if (clash) continue;
      const std::vector<double> cover = box_average(shape, feather);
      for (std::size_t i = 0; i < npx; ++i) {
        if (cover[i] == 0.0) continue;
        for (int c = 0; c < 3; ++c) host.rgb[i * 3 + c] += cover[i] * offset * tint[c];
      }
      break;
    }
  }

  // Donor: brighter or darker, slightly finer texture, more sensor noise. The
  // direction is random unless one side would clip.
  const double shift_lo = spec.param("shift_min", 50.0);
  const double shift_hi = spec.param("shift_max", 60.0);
  double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  if (gray + shift_hi + 12.0 > 250.0) sign = -1.0;
  if (gray - shift_hi - 12.0 < 5.0) sign = 1.0;
  const double shift = sign * rng.uniform(shift_lo, shift_hi);
  double donor_base[3];
  for (int c = 0; c < 3; ++c) donor_base[c] = host_base[c] + shift + rng.uniform(-6.0, 6.0);
  const Layer donor = textured_layer(w, h, donor_base, spec.param("donor_blur", 2.0), spec.param("donor_texture", 6.0),
                                     spec.param("donor_noise", 2.0), rng);

  // Compositing fringe: a colour cast with zero luma in a band around the
  // splice boundary (flat near the boundary, fading over the halo radius).
  const double luma_w[3] = {0.299, 0.587, 0.114};
  double chroma[3] = {rng.normal(), rng.normal(), rng.normal()};
  {
    const double lw = dot(chroma, luma_w) / dot(luma_w, luma_w);
    for (int c = 0; c < 3; ++c) chroma[c] -= lw * luma_w[c];
    const double len = norm2(chroma);
    const double amp = rng.uniform(fringe_lo, fringe_hi);
    for (double& v : chroma) v *= amp / len;
  }

  const std::vector<double> alpha = box_average(out.surface_mask, feather);
  const std::vector<double> band = box_average(out.surface_mask, static_cast<int>(halo_radius));

  out.probe = Image(w, h, 3);
  for (std::size_t i = 0; i < npx; ++i) {
    const double fringe = std::min(1.0, 8.0 * band[i] * (1.0 - band[i]));
    for (int c = 0; c < 3; ++c) {
      const double v =
          (1.0 - alpha[i]) * host.rgb[i * 3 + c] + alpha[i] * donor.rgb[i * 3 + c] + fringe * chroma[c];
      out.probe.pixels[i * 3 + c] = to_byte(v);
    }
  }
  out.edge_truth = dilate(mask_boundary(out.surface_mask));
  return out;
}

}  // namespace cpcapp
