#pragma once

#include "cnlbp/plane.hpp"

#include <string>
#include <vector>

namespace cnlbp {

// A decoded image: 1 (gray) or 3 (R, G, B) bands of integer intensities in
// [0, gray_levels], all bands sharing the same dimensions.
struct RasterImage {
  int gray_levels = 255;
  std::vector<PlaneI> bands;

  int width() const { return bands.empty() ? 0 : static_cast<int>(bands.front().cols()); }
  int height() const { return bands.empty() ? 0 : static_cast<int>(bands.front().rows()); }
  int band_count() const { return static_cast<int>(bands.size()); }
};

// Decodes a PNG, JPEG or BMP file. Three-channel sources come back as B=3 in
// R,G,B order, single-channel sources as B=1. Throws std::runtime_error on
// unreadable, truncated or unsupported input.
RasterImage load_image(const std::string& path);

// Bilinear resampling over pixel centers, each band independently; results
// are rounded half away from zero and clamped to [0, gray_levels]. Resizing
// to the source dimensions reproduces the input bit for bit.
RasterImage resize_bilinear(const RasterImage& img, int width, int height);

// Writes an 8-bit grayscale (B=1) or 24-bit (B=3) BMP.
void save_bmp(const RasterImage& img, const std::string& path);

} // namespace cnlbp
