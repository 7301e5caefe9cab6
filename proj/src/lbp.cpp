#include "cnlbp/lbp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cnlbp {

namespace {

void validate_spec(const NeighborhoodSpec& spec) {
  if (spec.samples < 2 || spec.samples > 30) {
    throw std::invalid_argument("neighborhood: samples must be in [2, 30]");
  }
  if (spec.radius < 1) throw std::invalid_argument("neighborhood: radius must be >= 1");
}

struct SampleOffset {
  double dx, dy;
};

// Sample p at angle 2*pi*p/P, x to the right and y downward, so p=0 is the
// east neighbor and the sequence runs counterclockwise. Offsets landing on
// the integer grid (up to cos/sin rounding) are snapped so those samples
// read single pixels exactly.
std::vector<SampleOffset> circle_offsets(const NeighborhoodSpec& spec) {
  std::vector<SampleOffset> offsets(spec.samples);
  for (int p = 0; p < spec.samples; ++p) {
    const double angle = 2.0 * std::numbers::pi * p / spec.samples;
    double dx = spec.radius * std::cos(angle);
    double dy = -spec.radius * std::sin(angle);
    if (std::abs(dx - std::round(dx)) < detail::kGridSnapEps) dx = std::round(dx);
    if (std::abs(dy - std::round(dy)) < detail::kGridSnapEps) dy = std::round(dy);
    offsets[p] = {dx, dy};
  }
  return offsets;
}

} // namespace

int uniformity(std::uint32_t code, int samples) {
  if (samples < 2 || samples > 30) throw std::invalid_argument("uniformity: samples out of range");
  const std::uint32_t mask = (1u << samples) - 1;
  if (code > mask) throw std::invalid_argument("uniformity: code out of range");
  const std::uint32_t rotated = ((code << 1) | (code >> (samples - 1))) & mask;
  return std::popcount(code ^ rotated);
}

UniformTable::UniformTable(int samples) : samples_(samples) {
  if (samples < 2 || samples > 30) {
    throw std::invalid_argument("UniformTable: samples must be in [2, 30]");
  }
  const std::uint32_t mask = (1u << samples) - 1;
  uniform_codes_.reserve(static_cast<std::size_t>(samples) * (samples - 1) + 2);
  uniform_codes_.push_back(0);
  uniform_codes_.push_back(mask);
  // Every other uniform code is a circular run of 1..P-1 ones.
  for (int len = 1; len < samples; ++len) {
    const std::uint32_t base = (1u << len) - 1;
    for (int start = 0; start < samples; ++start) {
      uniform_codes_.push_back(((base << start) | (base >> (samples - start))) & mask);
    }
  }
  std::sort(uniform_codes_.begin(), uniform_codes_.end());
  if (std::adjacent_find(uniform_codes_.begin(), uniform_codes_.end()) != uniform_codes_.end() ||
      static_cast<int>(uniform_codes_.size()) != samples * (samples - 1) + 2) {
    throw std::logic_error("UniformTable: enumeration produced a wrong code set");
  }
}

UniformTable::UniformTable(int samples, std::vector<std::uint32_t> uniform_codes)
    : samples_(samples), uniform_codes_(std::move(uniform_codes)) {
  if (samples < 2 || samples > 30) {
    throw std::invalid_argument("UniformTable: samples must be in [2, 30]");
  }
}

int UniformTable::bin_of(std::uint32_t code) const {
  const auto it = std::lower_bound(uniform_codes_.begin(), uniform_codes_.end(), code);
  if (it != uniform_codes_.end() && *it == code) {
    return static_cast<int>(it - uniform_codes_.begin());
  }
  return nonuniform_bin();
}

UniformTable build_uniform_table(int samples) { return UniformTable(samples); }

Eigen::VectorXd sample_circle(const PlaneF& plane, int cx, int cy, const NeighborhoodSpec& spec) {
  validate_spec(spec);
  const int margin = spec.radius;
  if (cx < margin || cy < margin || cx >= plane.cols() - margin || cy >= plane.rows() - margin) {
    throw std::invalid_argument("sample_circle: center too close to a border");
  }
  const auto offsets = circle_offsets(spec);
  Eigen::VectorXd samples(spec.samples);
  for (int p = 0; p < spec.samples; ++p) {
    samples[p] = bilinear_sample(plane, cx + offsets[p].dx, cy + offsets[p].dy);
  }
  return samples;
}

std::uint32_t lbp_code(const Eigen::VectorXd& samples, double center) {
  std::uint32_t code = 0;
  for (int p = 0; p < samples.size(); ++p) {
    if (samples[p] > center) code |= 1u << p;
  }
  return code;
}

std::int64_t CodeImage::valid_count() const {
  const std::int64_t w = width() - 2 * margin;
  const std::int64_t h = height() - 2 * margin;
  return (w > 0 && h > 0) ? w * h : 0;
}

CodeImage encode_image(const PlaneF& plane, const NeighborhoodSpec& spec) {
  validate_spec(spec);
  const int w = static_cast<int>(plane.cols());
  const int h = static_cast<int>(plane.rows());
  const int margin = spec.radius;
  if (w < 2 * margin + 1 || h < 2 * margin + 1) {
    throw std::invalid_argument("encode_image: plane too small for the sampling radius");
  }

  CodeImage out;
  out.spec = spec;
  out.margin = margin;
  out.codes = Plane<std::int32_t>::Constant(h, w, -1);

  const auto offsets = circle_offsets(spec);
  for (int y = margin; y < h - margin; ++y) {
    for (int x = margin; x < w - margin; ++x) {
      const double center = plane(y, x);
      std::uint32_t code = 0;
      for (int p = 0; p < spec.samples; ++p) {
        const double v = bilinear_sample(plane, x + offsets[p].dx, y + offsets[p].dy);
        if (v > center) code |= 1u << p;
      }
      out.codes(y, x) = static_cast<std::int32_t>(code);
    }
  }
  return out;
}

Eigen::VectorXd histogram(const CodeImage& img, const UniformTable& table, bool normalize) {
  if (img.spec.samples != table.samples()) {
    throw std::invalid_argument("histogram: code image and table sample counts differ");
  }
  Eigen::VectorXd bins = Eigen::VectorXd::Zero(table.bin_count());
  std::int64_t valid = 0;
  const std::int32_t* codes = img.codes.data();
  const std::int64_t total = static_cast<std::int64_t>(img.codes.size());
  for (std::int64_t i = 0; i < total; ++i) {
    if (codes[i] < 0) continue;
    bins[table.bin_of(static_cast<std::uint32_t>(codes[i]))] += 1.0;
    ++valid;
  }
  if (normalize && valid > 0) bins /= static_cast<double>(valid);
  return bins;
}

} // namespace cnlbp
