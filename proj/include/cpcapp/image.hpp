#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace cpcapp {

/// 8-bit raster, interleaved channels (1 = gray, 3 = RGB).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, int c, std::uint8_t fill = 0);

  bool empty() const { return pixels.empty(); }
  std::uint8_t& at(int x, int y, int c = 0) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool operator==(const Image&) const = default;
};

/// Rec. 601 luma of each pixel (gray images are returned as-is), as doubles.
std::vector<double> luma(const Image& img);

std::uint8_t to_byte(double v);

/// Binary PGM (P5) for 1-channel images, binary PPM (P6) for 3-channel ones.
void write_netpbm(const std::filesystem::path& path, const Image& img);

/// Reads P5 or P6 with maxval 255. Throws ParseError on anything else.
Image read_netpbm(const std::filesystem::path& path);

}  // namespace cpcapp
