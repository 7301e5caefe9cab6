#include "cnlbp/gradient.hpp"

#include <cmath>
#include <numbers>

namespace cnlbp {

double wrap_degrees(double deg) {
  while (deg > 180.0) deg -= 360.0;
  while (deg <= -180.0) deg += 360.0;
  return deg;
}

GradientField sobel_field(const RasterImage& img) {
  // Cross-correlation kernels; kx responds to increasing intensity to the
  // right, ky to increasing intensity upward.
  static constexpr int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static constexpr int ky[3][3] = {{1, 2, 1}, {0, 0, 0}, {-1, -2, -1}};

  const int w = img.width();
  const int h = img.height();
  GradientField field;
  field.magnitude.reserve(img.bands.size());
  field.angle_deg.reserve(img.bands.size());

  for (const PlaneI& band : img.bands) {
    PlaneF mag(h, w);
    PlaneF ang(h, w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        int gx = 0;
        int gy = 0;
        for (int u = -1; u <= 1; ++u) {
          const int yy = std::clamp(y + u, 0, h - 1);  // replicate padding
          for (int v = -1; v <= 1; ++v) {
            const int xx = std::clamp(x + v, 0, w - 1);
            const int value = band(yy, xx);
            gx += kx[u + 1][v + 1] * value;
            gy += ky[u + 1][v + 1] * value;
          }
        }
        mag(y, x) = std::sqrt(static_cast<double>(gx) * gx + static_cast<double>(gy) * gy);
        if (gx == 0 && gy == 0) {
          ang(y, x) = 0.0;
        } else {
          double deg = std::atan2(static_cast<double>(gy), static_cast<double>(gx)) * 180.0 /
                       std::numbers::pi;
          if (deg <= -180.0) deg = 180.0;
          ang(y, x) = deg;
        }
      }
    }
    field.magnitude.push_back(std::move(mag));
    field.angle_deg.push_back(std::move(ang));
  }
  return field;
}

} // namespace cnlbp
