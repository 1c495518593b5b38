#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cpcapp/bench.hpp"
#include "cpcapp/csv.hpp"
#include "cpcapp/errors.hpp"
#include "cpcapp/image.hpp"
#include "cpcapp/text.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cpcapp;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cpcapp_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string parse_error_message(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_csv(in, "data.csv");
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("read_csv turns two rows into two samples of length two") {
  const fs::path dir = scratch_dir("small");
  std::ofstream(dir / "x.csv") << "1,2\n3,4\n";
  const DataMatrix d = read_csv(dir / "x.csv");
  CHECK(d.features() == 2);
  CHECK(d.samples() == 2);
  CHECK(d.values()(0, 0) == 1.0);
  CHECK(d.values()(1, 0) == 2.0);
  CHECK(d.values()(0, 1) == 3.0);
  CHECK(d.values()(1, 1) == 4.0);

  const DataMatrix t = read_csv(dir / "x.csv", true);
  CHECK(t.values()(1, 0) == 3.0);
}

TEST_CASE("parse_csv keeps a header row and skips blank lines") {
  std::istringstream in("a,b\n\n1,2\n3,4\n\n");
  const CsvTable table = parse_csv(in);
  REQUIRE(table.header.has_value());
  CHECK(*table.header == std::vector<std::string>{"a", "b"});
  CHECK(table.rows.rows() == 2);
  CHECK(table.rows(1, 1) == 4.0);
}

TEST_CASE("parse_csv reports ragged rows and bad cells with their line") {
  const std::string ragged = parse_error_message("1,2\n3\n");
  CHECK(ragged.find("data.csv:2") != std::string::npos);
  const std::string bad = parse_error_message("1,2\n3,4\n5,x\n");
  CHECK(bad.find("data.csv:3") != std::string::npos);
  const std::string nan = parse_error_message("1,2\n3,nan\n");
  CHECK(nan.find("data.csv:2") != std::string::npos);
}

TEST_CASE("write_csv then read_csv reproduces every double bit for bit") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> g(0.0, 1e3);
  Matrix rows(40, 7);
  for (auto& v : rows.data()) v = g(gen) * std::pow(10.0, static_cast<int>(gen() % 20) - 10);
  rows(0, 0) = 0.1;
  rows(0, 1) = -0.0;
  rows(0, 2) = 1e-300;
  const fs::path dir = scratch_dir("roundtrip");
  const std::vector<std::string> header{"a", "b", "c", "d", "e", "f", "g"};
  write_csv(dir / "r.csv", rows, &header);
  const CsvTable back = read_csv_table(dir / "r.csv");
  REQUIRE(back.header.has_value());
  CHECK(*back.header == header);
  REQUIRE(back.rows.rows() == rows.rows());
  REQUIRE(back.rows.cols() == rows.cols());
  for (std::size_t i = 0; i < rows.data().size(); ++i) {
    CHECK(std::bit_cast<std::uint64_t>(back.rows.data()[i]) == std::bit_cast<std::uint64_t>(rows.data()[i]));
  }
  write_csv(dir / "r2.csv", back.rows, &header);
  CHECK(slurp(dir / "r.csv") == slurp(dir / "r2.csv"));
}

TEST_CASE("missing CSV files raise an error naming the path") {
  CHECK_THROWS(read_csv("/nonexistent/cpcapp/none.csv"));
}

TEST_CASE("format_double round-trips and format_short is minimal") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(gen);
    double y = 0;
    REQUIRE(parse_double(format_double(x), y));
    CHECK(y == x);
    REQUIRE(parse_double(format_short(x), y));
    CHECK(y == x);
  }
  CHECK(format_short(1.0) == "1.0");
  CHECK(format_short(0.5) == "0.5");
  CHECK(format_short(0.0) == "0.0");
}

TEST_CASE("parse_double accepts padded numbers and rejects junk") {
  double v = 0;
  CHECK(parse_double(" 2.5 ", v));
  CHECK(v == 2.5);
  CHECK(parse_double("-1e-3", v));
  CHECK(v == -1e-3);
  CHECK_FALSE(parse_double("", v));
  CHECK_FALSE(parse_double("1.5x", v));
  CHECK_FALSE(parse_double("inf", v));
  CHECK_FALSE(parse_double("nan", v));
}

TEST_CASE("split and trim") {
  const auto parts = split("a,,b", ',');
  REQUIRE(parts.size() == 3);
  CHECK(parts[1].empty());
  CHECK(trim("  x y \t") == "x y");
  CHECK(join_csv(std::vector<double>{1.0, 0.25}) == format_double(1.0) + "," + format_double(0.25));
}

TEST_CASE("netpbm write then read returns the same image") {
  std::mt19937_64 gen(5);
  const fs::path dir = scratch_dir("netpbm");
  for (int channels : {1, 3}) {
    Image img(13, 9, channels);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(gen() & 0xff);
    const fs::path path = dir / (channels == 1 ? "a.pgm" : "a.ppm");
    write_netpbm(path, img);
    CHECK(read_netpbm(path) == img);
  }
}

TEST_CASE("read_netpbm rejects other formats and truncated data") {
  const fs::path dir = scratch_dir("badpbm");
  std::ofstream(dir / "ascii.pgm") << "P2\n2 2\n255\n0 1 2 3\n";
  CHECK_THROWS_AS(read_netpbm(dir / "ascii.pgm"), ParseError);
  std::ofstream(dir / "short.pgm", std::ios::binary) << "P5\n4 4\n255\n" << std::string(5, 'a');
  CHECK_THROWS_AS(read_netpbm(dir / "short.pgm"), ParseError);
  std::ofstream(dir / "deep.pgm", std::ios::binary) << "P5\n1 1\n65535\n" << std::string(2, 'a');
  CHECK_THROWS_AS(read_netpbm(dir / "deep.pgm"), ParseError);
}

TEST_CASE("luma of a gray image is the image itself") {
  Image img(3, 1, 1);
  img.pixels = {0, 128, 255};
  CHECK(luma(img) == std::vector<double>{0.0, 128.0, 255.0});
  Image rgb(1, 1, 3);
  rgb.pixels = {255, 0, 0};
  CHECK(luma(rgb)[0] == doctest::Approx(0.299 * 255).epsilon(1e-12));
}

TEST_CASE("bench on a 41-value grid counts 41 eigendecompositions for cpca and one for cpca++") {
  BenchOptions opt;
  opt.repeats = 2;
  opt.min_batch_seconds = 0.005;
  const auto spec = SyntheticSpec::defaults(DatasetKind::kFourClass, 0);
  const BenchReport r = run_bench(spec, {Method::kPca, Method::kCpca, Method::kCpcaPlusPlus}, opt);
  CHECK(r.grid_size == 41);
  REQUIRE(r.find(Method::kCpca) != nullptr);
  REQUIRE(r.find(Method::kCpcaPlusPlus) != nullptr);
  REQUIRE(r.find(Method::kPca) != nullptr);
  CHECK(r.find(Method::kCpca)->eigendecompositions == 41);
  CHECK(r.find(Method::kCpcaPlusPlus)->eigendecompositions == 1);
  CHECK(r.find(Method::kPca)->eigendecompositions == 1);
  CHECK(r.speedup() > 1.0);
  const double ratio = r.find(Method::kPca)->seconds / r.find(Method::kCpcaPlusPlus)->seconds;
  CHECK(ratio >= 0.2);
  CHECK(ratio <= 5.0);
  CHECK(r.to_text().find("cpca++") != std::string::npos);
}

TEST_CASE("bench rejects unknown methods and spliced images") {
  CHECK_THROWS_AS(parse_methods("pca,svd"), ArgumentError);
  CHECK(parse_methods("cpca++,pca").size() == 2);
  BenchReport empty;
  CHECK_THROWS_AS(empty.speedup(), StateError);
  CHECK_THROWS_AS(run_bench(SyntheticSpec::defaults(DatasetKind::kSplicedImage, 0), {Method::kPca}, BenchOptions{}),
                  ArgumentError);
}
