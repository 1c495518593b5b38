#include "cpcapp/image.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "cpcapp/errors.hpp"

namespace cpcapp {

Image::Image(int w, int h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c),
      pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c), fill) {
  if (w <= 0 || h <= 0 || (c != 1 && c != 3)) throw ArgumentError("Image: invalid dimensions");
}

std::vector<double> luma(const Image& img) {
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (img.channels == 1) {
      out[i] = img.pixels[i];
    } else {
      const auto* p = &img.pixels[i * 3];
      out[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
  }
  return out;
}

std::uint8_t to_byte(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v));
}

void write_netpbm(const std::filesystem::path& path, const Image& img) {
  if (img.empty()) throw ArgumentError("write_netpbm: empty image");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << (img.channels == 1 ? "P5" : "P6") << '\n' << img.width << ' ' << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!os) throw Error("failed writing " + path.string());
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& is) {
  std::string tok;
  int ch;
  while ((ch = is.get()) != EOF) {
    if (ch == '#') {
      while ((ch = is.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int header_int(std::istream& is, const std::string& path) {
  const std::string tok = header_token(is);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path + ": malformed netpbm header");
  }
}

}  // namespace

Image read_netpbm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path.string());
  const std::string magic = header_token(is);
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw ParseError(path.string() + ": not a binary PGM/PPM file");
  }
  const int w = header_int(is, path.string());
  const int h = header_int(is, path.string());
  const int maxval = header_int(is, path.string());
  if (maxval != 255) throw ParseError(path.string() + ": only 8-bit (maxval 255) images are supported");
  Image img(w, h, channels);
  is.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (is.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
    throw ParseError(path.string() + ": truncated pixel data");
  }
  return img;
}

}  // namespace cpcapp
