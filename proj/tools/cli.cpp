#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cpcapp/bench.hpp"
#include "cpcapp/csv.hpp"
#include "cpcapp/datagen.hpp"
#include "cpcapp/errors.hpp"
#include "cpcapp/factorization.hpp"
#include "cpcapp/image.hpp"
#include "cpcapp/reducers.hpp"
#include "cpcapp/splicing.hpp"
#include "cpcapp/statistics.hpp"
#include "cpcapp/text.hpp"

namespace cpcapp {

namespace {

namespace fs = std::filesystem;

// Well-formed options that do not make sense together; exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Model {
  FilterBank bank;
  std::optional<FactorModel> factors;
};

void save_model(const fs::path& path, const FilterBank& bank, const FactorModel* factors) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_filter_bank(os, bank);
  if (factors) write_factor_block(os, *factors);
  if (!os) throw Error("failed writing " + path.string());
}

Model load_model(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open model " + path.string());
  Model m;
  m.bank = read_filter_bank(is);
  m.factors = read_factor_block(is, m.bank);
  return m;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create directory " + dir.string());
}

unsigned parse_thread_count(const std::string& text, const char* what) {
  double t = 0;
  if (!parse_double(text, t) || t < 1 || t > 1024 || t != std::floor(t)) {
    throw UsageError(std::string(what) + " must be an integer in [1, 1024]");
  }
  return static_cast<unsigned>(t);
}

Centering parse_centering(const std::string& name) {
  return name == "train" ? Centering::kTrainingMean : Centering::kOwnMean;
}

std::string index_name(const std::string& prefix, std::size_t i, const std::string& ext) {
  std::string digits = std::to_string(i);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return prefix + digits + ext;
}

// Pixels in channel-planar, row-major order (the patch convention).
Vector image_to_vector(const Image& img) {
  Vector v(img.pixels.size());
  std::size_t i = 0;
  for (int ch = 0; ch < img.channels; ++ch) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) v[i++] = img.at(x, y, ch);
    }
  }
  return v;
}

Image vector_to_image(std::span<const double> v, int width, int height, int channels) {
  Image img(width, height, channels);
  std::size_t i = 0;
  for (int ch = 0; ch < channels; ++ch) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) img.at(x, y, ch) = to_byte(v[i++]);
    }
  }
  return img;
}

Image column_as_digit(const Matrix& values, std::size_t j) {
  return vector_to_image(values.column(j), kDigitSide, kDigitSide, 1);
}

void write_labels(const fs::path& path, const std::vector<int>& labels) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  for (int l : labels) os << l << '\n';
}

void write_vector_row(const fs::path& path, const Vector& v) {
  write_csv(path, Matrix(1, v.size(), v));
}

SyntheticSpec build_spec(const std::string& kind_name, std::uint64_t seed, const CLI::Option* n_fg_opt,
                         std::size_t n_fg, const CLI::Option* n_bg_opt, std::size_t n_bg,
                         const std::vector<std::string>& params) {
  DatasetKind kind;
  try {
    kind = parse_dataset_kind(kind_name);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  SyntheticSpec spec = SyntheticSpec::defaults(kind, seed);
  if (n_fg_opt->count()) spec.n_fg = n_fg;
  if (n_bg_opt->count()) spec.n_bg = n_bg;
  for (const auto& p : params) {
    const auto eq = p.find('=');
    double value = 0;
    if (eq == std::string::npos || !parse_double(std::string_view(p).substr(eq + 1), value)) {
      throw UsageError("--param expects NAME=VALUE, got '" + p + "'");
    }
    const std::string name = p.substr(0, eq);
    if (!spec.params.count(name)) throw UsageError("unknown parameter '" + name + "' for " + kind_name);
    spec.params[name] = value;
  }
  return spec;
}

// ---- generate ----

struct GenerateArgs {
  std::string kind;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t n_fg = 0;
  std::size_t n_bg = 0;
  std::vector<std::string> params;
  std::size_t count = 1;
  std::size_t previews = 8;
  CLI::Option* n_fg_opt = nullptr;
  CLI::Option* n_bg_opt = nullptr;
};

void run_generate(const GenerateArgs& a, std::ostream& out) {
  const SyntheticSpec spec = build_spec(a.kind, a.seed, a.n_fg_opt, a.n_fg, a.n_bg_opt, a.n_bg, a.params);
  const fs::path dir = a.out;
  ensure_directory(dir);
  switch (spec.kind) {
    case DatasetKind::kFourClass: {
      const FourClassData d = gen_four_class(spec);
      write_samples_csv(dir / "foreground.csv", d.foreground.data);
      write_labels(dir / "labels.csv", d.foreground.labels);
      write_samples_csv(dir / "background.csv", d.background);
      break;
    }
    case DatasetKind::kHaystack: {
      const Haystack h = gen_haystack(spec);
      write_csv(dir / "r_b.csv", h.r_b);
      write_csv(dir / "r_f.csv", h.r_f);
      write_vector_row(dir / "a.csv", h.a);
      write_vector_row(dir / "c.csv", h.c);
      Rng rng(spec.seed);
      write_samples_csv(dir / "foreground.csv", sample_gaussian(h.r_f, spec.n_fg, rng));
      write_samples_csv(dir / "background.csv", sample_gaussian(h.r_b, spec.n_bg, rng));
      break;
    }
    case DatasetKind::kTexturedDigits: {
      const TexturedDigits d = gen_textured_digits(spec);
      write_samples_csv(dir / "foreground.csv", d.foreground.data);
      write_labels(dir / "labels.csv", d.foreground.labels);
      write_samples_csv(dir / "background.csv", d.background);
      write_samples_csv(dir / "clean.csv", d.clean);
      const std::size_t shown = std::min(a.previews, d.foreground.data.samples());
      for (std::size_t j = 0; j < shown; ++j) {
        write_netpbm(dir / index_name("foreground_", j, ".pgm"), column_as_digit(d.foreground.data.values(), j));
        write_netpbm(dir / index_name("clean_", j, ".pgm"), column_as_digit(d.clean.values(), j));
      }
      break;
    }
    case DatasetKind::kSplicedImage: {
      if (a.count < 1) throw UsageError("--count must be at least 1");
      for (std::size_t i = 0; i < a.count; ++i) {
        SyntheticSpec item = spec;
        item.seed = derive_seed(spec.seed, i);
        const SplicedImage s = gen_spliced_image(item);
        write_netpbm(dir / index_name("image_", i, ".ppm"), s.probe);
        write_netpbm(dir / index_name("mask_", i, ".pgm"), s.surface_mask);
        write_netpbm(dir / index_name("edge_", i, ".pgm"), s.edge_truth);
      }
      break;
    }
  }
  out << "wrote " << dataset_kind_name(spec.kind) << " seed=" << spec.seed << " to " << dir.string() << '\n';
}

// ---- fit ----

struct FitArgs {
  std::string fg;
  std::string bg;
  std::string method;
  std::size_t k = 0;
  double alpha = 0.0;
  std::string alpha_grid;
  std::string out;
  bool transpose = false;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* grid_opt = nullptr;
  CLI::Option* bg_opt = nullptr;
};

void run_fit(const FitArgs& a, unsigned threads, std::ostream& out) {
  Method method;
  try {
    method = parse_method(a.method);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  if (method != Method::kCpca && (a.alpha_opt->count() || a.grid_opt->count())) {
    throw UsageError("--alpha and --alpha-grid apply to --method cpca only");
  }
  if (method != Method::kPca && !a.bg_opt->count()) throw UsageError("--bg is required for cpca and cpca++");
  std::vector<double> grid;
  if (method == Method::kCpca && !a.alpha_opt->count()) {
    try {
      grid = parse_alpha_grid(a.alpha_grid);
    } catch (const ArgumentError& e) {
      throw UsageError(e.what());
    }
  }

  const DataMatrix fg = read_csv(a.fg, a.transpose);
  if (a.k < 1 || a.k > fg.features()) {
    throw ArgumentError("-k " + std::to_string(a.k) + " outside [1, " + std::to_string(fg.features()) + "]");
  }
  if (method == Method::kPca) {
    if (a.bg_opt->count()) {
      const DataMatrix bg = read_csv(a.bg, a.transpose);
      if (bg.features() != fg.features()) throw ShapeError("foreground and background differ in feature count");
    }
    const FilterBank bank = fit_pca(fg, a.k);
    const FactorModel factors = orthogonal_factor_model(bank);
    save_model(a.out, bank, &factors);
    out << "method pca k=" << a.k << " eigenvalues " << join_csv(bank.eigenvalues) << '\n';
    return;
  }

  const DataMatrix bg = read_csv(a.bg, a.transpose);
  if (bg.features() != fg.features()) throw ShapeError("foreground and background differ in feature count");
  const CovariancePair pair = build_covariance_pair(bg, fg);
  if (method == Method::kCpcaPlusPlus) {
    const FilterBank bank = fit_cpcapp(pair, a.k);
    const FactorModel factors = recover_w(pair, bank);
    save_model(a.out, bank, &factors);
    out << "method cpca++ k=" << a.k << " loading " << format_short(pair.loading) << " eigenvalues "
        << join_csv(bank.eigenvalues) << '\n';
    return;
  }
  if (a.alpha_opt->count()) {
    const FilterBank bank = fit_cpca(pair, a.k, a.alpha);
    const FactorModel factors = orthogonal_factor_model(bank);
    save_model(a.out, bank, &factors);
    out << "method cpca k=" << a.k << " alpha " << format_short(a.alpha) << " eigenvalues "
        << join_csv(bank.eigenvalues) << '\n';
    return;
  }
  // One model per grid value: <stem>_a<idx><ext>.
  const std::vector<FilterBank> banks = sweep_cpca(pair, a.k, grid, threads);
  const fs::path base = a.out;
  const fs::path parent = base.parent_path();
  out << "index,alpha,model\n";
  for (std::size_t i = 0; i < banks.size(); ++i) {
    std::string idx = std::to_string(i);
    if (idx.size() < 2) idx.insert(0, 1, '0');
    const fs::path path = parent / (base.stem().string() + "_a" + idx + base.extension().string());
    const FactorModel factors = orthogonal_factor_model(banks[i]);
    save_model(path, banks[i], &factors);
    out << i << ',' << format_double(grid[i]) << ',' << path.string() << '\n';
  }
}

// ---- transform / score ----

struct ApplyArgs {
  std::string model;
  std::string in;
  std::string out;
  std::string centering = "own";
  bool transpose = false;
};

DataMatrix read_matching(const ApplyArgs& a, const FilterBank& bank) {
  const DataMatrix data = read_csv(a.in, a.transpose);
  if (data.features() != bank.features()) {
    throw ShapeError(a.in + " has " + std::to_string(data.features()) + " features, model expects " +
                     std::to_string(bank.features()));
  }
  return data;
}

void run_transform(const ApplyArgs& a) {
  const Model m = load_model(a.model);
  const DataMatrix data = read_matching(a, m.bank);
  const Projection p = transform(m.bank, data, parse_centering(a.centering));
  write_csv(a.out, p.y.transposed());
}

void run_score(const ApplyArgs& a) {
  const Model m = load_model(a.model);
  const DataMatrix data = read_matching(a, m.bank);
  const Vector w = score_patches(m.bank, data, parse_centering(a.centering));
  write_csv(a.out, Matrix(w.size(), 1, w));
}

// ---- denoise ----

struct DenoiseArgs {
  std::string model;
  std::string in;
  std::string out;
  std::size_t k = 0;
};

void run_denoise(const DenoiseArgs& a) {
  const Model m = load_model(a.model);
  const Image img = read_netpbm(a.in);
  const std::size_t pixels = img.pixels.size();
  if (pixels != m.bank.features()) {
    throw ShapeError(a.in + " has " + std::to_string(pixels) + " samples per image, model expects " +
                     std::to_string(m.bank.features()));
  }
  if (a.k < 1 || a.k > m.bank.k()) {
    throw ArgumentError("-k " + std::to_string(a.k) + " outside [1, " + std::to_string(m.bank.k()) + "]");
  }
  FactorModel factors;
  if (m.factors) {
    factors = *m.factors;
  } else if (m.bank.method != Method::kCpcaPlusPlus) {
    factors = orthogonal_factor_model(m.bank);
  } else {
    throw ParseError(a.model + ": cpca++ model has no W block; refit it with `fit`");
  }
  const Vector z = image_to_vector(img);
  const Vector restored = denoise(factors.truncated(a.k), z, m.bank.train_mean_fg);
  write_netpbm(a.out, vector_to_image(restored, img.width, img.height, img.channels));
}

// ---- splicing ----

struct SpliceArgs {
  std::string model;
  std::string image;
  std::string train_dir;
  std::string out;
  std::string method = "cpca++";
  std::string centering = "own";
  SpliceConfig cfg;
};

void check_patch_geometry(const SpliceConfig& cfg) {
  if (cfg.n < 1 || cfg.stride < 1) throw UsageError("--n and --stride must be positive");
}

void run_localize(const SpliceArgs& a) {
  check_patch_geometry(a.cfg);
  const Model m = load_model(a.model);
  const Image probe = read_netpbm(a.image);
  const std::size_t m_expected = static_cast<std::size_t>(probe.channels) * a.cfg.n * a.cfg.n;
  if (m_expected != m.bank.features()) {
    throw ShapeError("model expects " + std::to_string(m.bank.features()) + " features but " +
                     std::to_string(probe.channels) + "-channel patches of side " + std::to_string(a.cfg.n) +
                     " have " + std::to_string(m_expected));
  }
  SpliceConfig cfg = a.cfg;
  cfg.centering = parse_centering(a.centering);
  write_netpbm(a.out, localize(m.bank, probe, cfg).to_image());
}

void run_train_splice(const SpliceArgs& a, std::ostream& out) {
  check_patch_geometry(a.cfg);
  SpliceConfig cfg = a.cfg;
  try {
    cfg.method = parse_method(a.method);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = a.train_dir;
  if (!fs::is_directory(dir)) throw ParseError("training directory " + dir.string() + " does not exist");
  std::vector<fs::path> probes;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("image_", 0) == 0 && entry.path().extension() == ".ppm") probes.push_back(entry.path());
  }
  std::sort(probes.begin(), probes.end());
  if (probes.empty()) throw ParseError("no image_*.ppm files in " + dir.string());
  std::vector<TrainingImage> images;
  for (const auto& p : probes) {
    const std::string suffix = p.stem().string().substr(6);
    const fs::path mask = dir / ("mask_" + suffix + ".pgm");
    if (!fs::exists(mask)) throw ParseError("missing " + mask.string() + " for " + p.string());
    images.push_back(TrainingImage{read_netpbm(p), read_netpbm(mask)});
  }
  const FilterBank bank = train_splice(images, cfg);
  save_model(a.out, bank, nullptr);
  out << "trained " << method_name(bank.method) << " on " << images.size() << " images, M=" << bank.features()
      << " K=" << bank.k() << '\n';
}

// ---- eval ----

struct EvalArgs {
  std::string pred;
  std::string truth;
  double threshold = 0.5;
};

void run_eval(const EvalArgs& a, std::ostream& out) {
  const Image pred = read_netpbm(a.pred);
  const Image truth = read_netpbm(a.truth);
  if (pred.channels != 1 || truth.channels != 1) throw ShapeError("eval expects single-channel PGM images");
  const ConfusionCounts c = binarize_and_score(ProbabilityMap::from_image(pred), truth, a.threshold);
  out << "F1=" << format_short(f1_score(c)) << " MCC=" << format_short(mcc_score(c)) << '\n';
}

// ---- bench ----

struct BenchArgs {
  std::string dataset = "four-class";
  std::uint64_t seed = 0;
  std::size_t n_fg = 0;
  std::size_t n_bg = 0;
  std::vector<std::string> params;
  std::string fg;
  std::string bg;
  bool transpose = false;
  std::string methods = "pca,cpca,cpca++";
  std::string alpha_grid;
  std::size_t k = 2;
  int repeats = 5;
  CLI::Option* n_fg_opt = nullptr;
  CLI::Option* n_bg_opt = nullptr;
  CLI::Option* fg_opt = nullptr;
  CLI::Option* bg_opt = nullptr;
};

void run_bench_command(const BenchArgs& a, unsigned threads, std::ostream& out) {
  BenchOptions options;
  std::vector<Method> methods;
  try {
    methods = parse_methods(a.methods);
    options.alphas = parse_alpha_grid(a.alpha_grid);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  options.k = a.k;
  options.repeats = a.repeats;
  options.threads = threads;
  if (a.fg_opt->count() != a.bg_opt->count()) throw UsageError("--fg and --bg must be given together");
  BenchReport report;
  if (a.fg_opt->count()) {
    const DataMatrix fg = read_csv(a.fg, a.transpose);
    const DataMatrix bg = read_csv(a.bg, a.transpose);
    report = run_bench(fg, bg, a.fg + " vs " + a.bg, methods, options);
  } else {
    report = run_bench(build_spec(a.dataset, a.seed, a.n_fg_opt, a.n_fg, a.n_bg_opt, a.n_bg, a.params), methods,
                       options);
  }
  out << report.to_text();
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contrastive dimensionality reduction (PCA, cPCA, cPCA++) and splice localization", "cpcapp"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string threads_text;
  app.add_option("--threads", threads_text, "Worker threads for parallel sections (env CPCAPP_THREADS)");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset");
  generate->add_option("kind", gen.kind, "four-class | haystack | textured-digits | spliced-image")->required();
  generate->add_option("--seed", gen.seed, "Random seed")->required();
  generate->add_option("--out", gen.out, "Output directory")->required();
  gen.n_fg_opt = generate->add_option("--n-fg", gen.n_fg, "Foreground sample count");
  gen.n_bg_opt = generate->add_option("--n-bg", gen.n_bg, "Background sample count");
  generate->add_option("--param", gen.params, "Generator parameter override NAME=VALUE (repeatable)");
  generate->add_option("--count", gen.count, "Number of spliced images");
  generate->add_option("--previews", gen.previews, "Textured-digit PGM previews to write");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a filter bank and write a model file");
  fit_cmd->add_option("--fg", fit.fg, "Foreground CSV")->required();
  fit.bg_opt = fit_cmd->add_option("--bg", fit.bg, "Background CSV");
  fit_cmd->add_option("--method", fit.method, "pca | cpca | cpca++")->required();
  fit_cmd->add_option("-k,--components", fit.k, "Number of filters")->required();
  fit.alpha_opt = fit_cmd->add_option("--alpha", fit.alpha, "cPCA contrast parameter");
  fit.grid_opt = fit_cmd->add_option("--alpha-grid", fit.alpha_grid, "cPCA grid: list, log:LO:HI:COUNT, 0+log:...");
  fit.alpha_opt->excludes(fit.grid_opt);
  fit_cmd->add_option("--out", fit.out, "Model path")->required();
  fit_cmd->add_flag("--transpose", fit.transpose, "CSV stores one sample per column");

  ApplyArgs tr;
  auto* transform_cmd = app.add_subcommand("transform", "Project samples onto a model's filters");
  ApplyArgs sc;
  auto* score_cmd = app.add_subcommand("score", "Per-sample normalised projection energy");
  for (auto [cmd, args] : {std::pair{transform_cmd, &tr}, std::pair{score_cmd, &sc}}) {
    cmd->add_option("--model", args->model, "Model file")->required();
    cmd->add_option("--in", args->in, "Input CSV")->required();
    cmd->add_option("--out", args->out, "Output CSV")->required();
    cmd->add_option("--centering", args->centering, "own | train")
        ->check(CLI::IsMember({"own", "train"}));
    cmd->add_flag("--transpose", args->transpose, "CSV stores one sample per column");
  }

  DenoiseArgs dn;
  auto* denoise_cmd = app.add_subcommand("denoise", "Reconstruct an image from its first K components");
  denoise_cmd->add_option("--model", dn.model, "Model file")->required();
  denoise_cmd->add_option("--in", dn.in, "Input PGM/PPM")->required();
  denoise_cmd->add_option("--out", dn.out, "Output image")->required();
  denoise_cmd->add_option("-k,--components", dn.k, "Components to keep")->required();

  SpliceArgs loc;
  auto* localize_cmd = app.add_subcommand("localize", "Splice-boundary probability map for one image");
  localize_cmd->add_option("--model", loc.model, "Model from train-splice")->required();
  localize_cmd->add_option("--image", loc.image, "Probe PPM/PGM")->required();
  localize_cmd->add_option("--out", loc.out, "Output PGM map")->required();
  localize_cmd->add_option("--n", loc.cfg.n, "Patch side");
  localize_cmd->add_option("--stride", loc.cfg.stride, "Patch stride");
  localize_cmd->add_option("--centering", loc.centering, "own | train")->check(CLI::IsMember({"own", "train"}));

  SpliceArgs ts;
  auto* train_cmd = app.add_subcommand("train-splice", "Train a splice model from image_*.ppm/mask_*.pgm pairs");
  train_cmd->add_option("--train-dir", ts.train_dir, "Directory with image_XXX.ppm and mask_XXX.pgm")->required();
  train_cmd->add_option("--out", ts.out, "Model path")->required();
  train_cmd->add_option("--n", ts.cfg.n, "Patch side");
  train_cmd->add_option("--stride", ts.cfg.stride, "Patch stride");
  train_cmd->add_option("-k,--components", ts.cfg.k, "Number of filters");
  train_cmd->add_option("--method", ts.method, "pca | cpca | cpca++");
  train_cmd->add_option("--alpha", ts.cfg.alpha, "cPCA contrast parameter");
  train_cmd->add_option("--fg-lo", ts.cfg.fg_lo, "Lower spliced-area fraction of a foreground patch");
  train_cmd->add_option("--fg-hi", ts.cfg.fg_hi, "Upper spliced-area fraction of a foreground patch");
  train_cmd->add_option("--bg-edge-min", ts.cfg.bg_edge_min, "Minimum edge fraction of a background patch");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Per-pixel F1 and MCC of a map against a truth mask");
  eval_cmd->add_option("--pred", ev.pred, "Probability map PGM")->required();
  eval_cmd->add_option("--truth", ev.truth, "Truth mask PGM")->required();
  eval_cmd->add_option("--threshold", ev.threshold, "Binarisation threshold in [0, 1]");

  BenchArgs bn;
  auto* bench_cmd = app.add_subcommand("bench", "Time pca, cpca and cpca++ on one dataset");
  bench_cmd->add_option("--dataset", bn.dataset, "four-class | haystack | textured-digits");
  bench_cmd->add_option("--seed", bn.seed, "Random seed");
  bn.n_fg_opt = bench_cmd->add_option("--n-fg", bn.n_fg, "Foreground sample count");
  bn.n_bg_opt = bench_cmd->add_option("--n-bg", bn.n_bg, "Background sample count");
  bench_cmd->add_option("--param", bn.params, "Generator parameter override NAME=VALUE");
  bn.fg_opt = bench_cmd->add_option("--fg", bn.fg, "Foreground CSV instead of a synthetic dataset");
  bn.bg_opt = bench_cmd->add_option("--bg", bn.bg, "Background CSV");
  bench_cmd->add_flag("--transpose", bn.transpose, "CSV stores one sample per column");
  bench_cmd->add_option("--methods", bn.methods, "Comma-separated methods");
  bench_cmd->add_option("--alpha-grid", bn.alpha_grid, "cPCA grid");
  bench_cmd->add_option("-k,--components", bn.k, "Number of filters");
  bench_cmd->add_option("--repeats", bn.repeats, "Timing batches per method")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    unsigned threads = 1;
    if (!threads_text.empty()) {
      threads = parse_thread_count(threads_text, "--threads");
    } else if (const char* env = std::getenv("CPCAPP_THREADS"); env && *env) {
      threads = parse_thread_count(env, "CPCAPP_THREADS");
    }
    if (*generate) run_generate(gen, out);
    if (*fit_cmd) run_fit(fit, threads, out);
    if (*transform_cmd) run_transform(tr);
    if (*score_cmd) run_score(sc);
    if (*denoise_cmd) run_denoise(dn);
    if (*localize_cmd) run_localize(loc);
    if (*train_cmd) run_train_splice(ts, out);
    if (*eval_cmd) run_eval(ev, out);
    if (*bench_cmd) run_bench_command(bn, threads, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace cpcapp
