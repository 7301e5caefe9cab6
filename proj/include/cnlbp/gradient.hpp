#pragma once

#include "cnlbp/image.hpp"
#include "cnlbp/plane.hpp"

#include <vector>

namespace cnlbp {

// Per-band Sobel responses. angle_deg is the full-quadrant gradient
// direction in degrees, in (-180, 180]; pixels with zero gradient get 0.
struct GradientField {
  std::vector<PlaneF> magnitude;
  std::vector<PlaneF> angle_deg;

  int band_count() const { return static_cast<int>(magnitude.size()); }
};

// 3x3 Sobel cross-correlation with replicate padding, so the field is
// defined at every pixel.
GradientField sobel_field(const RasterImage& img);

// Wraps an angle difference to (-180, 180].
double wrap_degrees(double deg);

} // namespace cnlbp
