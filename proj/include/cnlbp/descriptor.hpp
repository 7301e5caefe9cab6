#pragma once

#include "cnlbp/graph.hpp"
#include "cnlbp/image.hpp"
#include "cnlbp/lbp.hpp"
#include "cnlbp/measures.hpp"

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cnlbp {

// The six per-band map families, in concatenation order.
enum class MapFamily { Intensity, GradientMagnitude, Clustering, InDegree, OutDegree, Eigenvector };

inline constexpr std::array<MapFamily, 6> kMapFamilies = {
    MapFamily::Intensity,      MapFamily::GradientMagnitude, MapFamily::Clustering,
    MapFamily::InDegree,       MapFamily::OutDegree,         MapFamily::Eigenvector,
};

// Short names used in file outputs: "ti", "gi", "cc", "idc", "odc", "ec".
const char* family_name(MapFamily family);

struct DescriptorConfig {
  GraphParams graph;
  std::vector<NeighborhoodSpec> scales{{8, 1}, {16, 2}, {24, 3}};
  bool normalize = true;
  int resize_width = 128;
  int resize_height = 128;
  double ec_tol = 1e-6;
  int ec_max_iter = 1000;

  void validate() const;  // throws std::invalid_argument
};

// One plane per band per family, families indexed by MapFamily.
struct MapFamilySet {
  std::array<std::vector<PlaneF>, 6> planes;

  std::span<const PlaneF> of(MapFamily family) const {
    return planes[static_cast<std::size_t>(family)];
  }
  int band_count() const { return static_cast<int>(planes.front().size()); }
  int plane_count() const;
};

struct FeatureSegment {
  MapFamily family;
  int samples = 0;  // P of the scale
  int radius = 0;   // R of the scale
  int band = 0;
  int offset = 0;
  int bin_count = 0;
};

struct FeatureVector {
  Eigen::VectorXd values;
  std::vector<FeatureSegment> layout;
};

// The intensity planes themselves, the Sobel magnitude planes, and the four
// network measures of each band's pixel graph. The image is used as given;
// extract() resizes beforehand.
MapFamilySet compute_map_families(const RasterImage& img, const DescriptorConfig& cfg);

// Full pipeline: resize, gradient field, per-band graphs, map families, then
// for each family (TI, GI, CC, IDC, ODC, EC), each scale in config order and
// each band, the uniform-pattern histogram of the encoded plane.
FeatureVector extract(const RasterImage& img, const DescriptorConfig& cfg);

// 6 * bands * sum over scales of P(P-1)+3.
int feature_length(int bands, std::span<const NeighborhoodSpec> scales);

// Canonical flat key=value rendering of a config, and its FNV-1a digest.
// Equal configs always produce equal digests.
std::string config_to_string(const DescriptorConfig& cfg);
std::string config_digest(const DescriptorConfig& cfg);

// JSON-lines export: one object per image with fields path, label (omitted
// when empty), config_digest and vector.
void write_jsonl_record(std::ostream& os, const std::string& path, const std::string& label,
                        const std::string& digest, const FeatureVector& fv);

// CSV export: a "# config_digest=..." comment, then a header row naming each
// column <family>_<P>_<R>_<band>_<bin> after path and label columns.
void write_csv_header(std::ostream& os, const std::string& digest, const FeatureVector& fv);
void write_csv_row(std::ostream& os, const std::string& path, const std::string& label,
                   const FeatureVector& fv);

} // namespace cnlbp
