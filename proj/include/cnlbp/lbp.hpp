#pragma once

#include "cnlbp/plane.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace cnlbp {

// Circular sampling pattern: `samples` points on a radius-`radius` circle.
struct NeighborhoodSpec {
  int samples = 8;  // P
  int radius = 1;   // R
};

// Number of circular 0<->1 transitions in the low `samples` bits of `code`.
int uniformity(std::uint32_t code, int samples);

// Bin mapping for uniform codes: every code with at most two transitions gets
// its own bin, in ascending code order; all remaining codes share the last
// bin. Total bins: P(P-1)+3.
class UniformTable {
 public:
  explicit UniformTable(int samples);
  // Custom code set (must be sorted ascending); used by verification hooks.
  UniformTable(int samples, std::vector<std::uint32_t> uniform_codes);

  int samples() const { return samples_; }
  int bin_count() const { return samples_ * (samples_ - 1) + 3; }
  int nonuniform_bin() const { return samples_ * (samples_ - 1) + 2; }
  int uniform_code_count() const { return static_cast<int>(uniform_codes_.size()); }
  const std::vector<std::uint32_t>& uniform_codes() const { return uniform_codes_; }

  int bin_of(std::uint32_t code) const;

 private:
  int samples_;
  std::vector<std::uint32_t> uniform_codes_;
};

UniformTable build_uniform_table(int samples);

// Sample p lies at (cx + R*cos(2*pi*p/P), cy - R*sin(2*pi*p/P)), read by
// bilinear interpolation; samples on integer coordinates read the pixel
// directly. The center must be at least ceil(R) away from every border.
Eigen::VectorXd sample_circle(const PlaneF& plane, int cx, int cy, const NeighborhoodSpec& spec);

// sum_p 1(samples[p] > center) * 2^p. The indicator is strict, so ties
// between a sample and the center contribute 0.
std::uint32_t lbp_code(const Eigen::VectorXd& samples, double center);

struct CodeImage {
  NeighborhoodSpec spec;
  int margin = 0;                 // pixels closer than this to a border are invalid
  Plane<std::int32_t> codes;      // -1 where invalid

  int width() const { return static_cast<int>(codes.cols()); }
  int height() const { return static_cast<int>(codes.rows()); }
  bool valid(int x, int y) const {
    return x >= margin && y >= margin && x < width() - margin && y < height() - margin;
  }
  std::int64_t valid_count() const;
};

// Codes at every pixel with a full neighborhood; the ceil(R)-wide border is
// masked rather than padded. Throws if the plane is smaller than
// (2*ceil(R)+1) in either dimension.
CodeImage encode_image(const PlaneF& plane, const NeighborhoodSpec& spec);

// Bin counts of valid codes, length P(P-1)+3; normalized by the valid-pixel
// count when `normalize` is set.
Eigen::VectorXd histogram(const CodeImage& img, const UniformTable& table, bool normalize);

} // namespace cnlbp
