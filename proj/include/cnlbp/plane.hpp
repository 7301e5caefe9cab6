#pragma once

#include <Eigen/Core>

#include <cmath>

namespace cnlbp {

// Row-major so that .data() enumerates pixels in node order (y * width + x).
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PlaneI = Plane<int>;
using PlaneF = Plane<double>;

namespace detail {

// Fractional parts within this distance of the grid are snapped, so samples
// that land on integer coordinates (up to cos/sin rounding) read one pixel.
inline constexpr double kGridSnapEps = 1e-9;

} // namespace detail

// Bilinear interpolation in the incremental form
//   v00 + fx*(v10-v00) + fy*(v01-v00) + fx*fy*(v11-v10-v01+v00),
// which returns the stored value exactly on constant planes and at grid
// points. (x, y) must lie inside [0, cols-1] x [0, rows-1].
template <typename Scalar>
inline double bilinear_sample(const Plane<Scalar>& plane, double x, double y) {
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  double fx = x - x0;
  double fy = y - y0;
  if (fx < detail::kGridSnapEps) {
    fx = 0.0;
  } else if (fx > 1.0 - detail::kGridSnapEps) {
    ++x0;
    fx = 0.0;
  }
  if (fy < detail::kGridSnapEps) {
    fy = 0.0;
  } else if (fy > 1.0 - detail::kGridSnapEps) {
    ++y0;
    fy = 0.0;
  }
  const int x1 = (fx == 0.0) ? x0 : x0 + 1;
  const int y1 = (fy == 0.0) ? y0 : y0 + 1;
  const double v00 = static_cast<double>(plane(y0, x0));
  const double v10 = static_cast<double>(plane(y0, x1));
  const double v01 = static_cast<double>(plane(y1, x0));
  const double v11 = static_cast<double>(plane(y1, x1));
  return v00 + fx * (v10 - v00) + fy * (v01 - v00) + fx * fy * (v11 - v10 - v01 + v00);
}

} // namespace cnlbp
