#pragma once

#include "cnlbp/gradient.hpp"
#include "cnlbp/image.hpp"
#include "cnlbp/plane.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace cnlbp {

// Gate thresholds for pixel-graph construction.
struct GraphParams {
  double radius = 3.0;         // q: candidate search radius in pixels
  double similarity = 0.315;   // r: upper bound on the distance/intensity weight
  double gradient_diff = 5.0;  // s: upper bound on the signed magnitude difference
  double angle_diff = 45.0;    // t: upper bound on the signed angle difference, degrees
  int gray_levels = 255;       // L

  void validate() const;  // throws std::invalid_argument
};

// Directed graph over the pixels of one band. Nodes are indexed row-major
// (y * width + x); adjacency is CSR in both directions with neighbor lists
// sorted ascending, which gives O(log k) membership tests and cheap in-edge
// traversal.
class DirectedPixelGraph {
 public:
  DirectedPixelGraph() = default;

  // Rows of `out_targets` must be sorted ascending and free of self-loops.
  static DirectedPixelGraph from_adjacency(int width, int height,
                                           std::vector<std::int64_t> out_offsets,
                                           std::vector<int> out_targets);

  // Convenience for tests and tools: builds from an explicit edge list
  // (duplicates collapsed, self-loops rejected).
  static DirectedPixelGraph from_edges(int width, int height,
                                       std::span<const std::pair<int, int>> edges);

  int width() const { return width_; }
  int height() const { return height_; }
  int node_count() const { return width_ * height_; }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(out_targets_.size()); }

  std::span<const int> out_neighbors(int i) const {
    return {out_targets_.data() + out_offsets_[i],
            static_cast<std::size_t>(out_offsets_[i + 1] - out_offsets_[i])};
  }
  std::span<const int> in_neighbors(int i) const {
    return {in_sources_.data() + in_offsets_[i],
            static_cast<std::size_t>(in_offsets_[i + 1] - in_offsets_[i])};
  }
  int out_degree(int i) const { return static_cast<int>(out_offsets_[i + 1] - out_offsets_[i]); }
  int in_degree(int i) const { return static_cast<int>(in_offsets_[i + 1] - in_offsets_[i]); }

  bool has_edge(int from, int to) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::int64_t> out_offsets_{0};
  std::vector<std::int64_t> in_offsets_{0};
  std::vector<int> out_targets_;
  std::vector<int> in_sources_;

  void build_in_from_out();
};

// Euclidean distance between the row-major coordinates of two pixel indices.
double pixel_distance(int i, int j, int width);

// (d^2 + q^2 |Ii - Ij| / L) / (2 q^2). Callers only evaluate weights for
// 0 < d <= q; beyond the radius no edge exists at all.
double edge_weight(int intensity_i, int intensity_j, double distance, const GraphParams& params);

// True iff 0 < d <= q, the weight is within the similarity threshold, and the
// SIGNED magnitude and wrapped angle differences are within their thresholds.
// The signed gates are what make the graph directed: i->j may hold while
// j->i does not.
bool link_predicate(int i, int j, const PlaneI& band, const PlaneF& magnitude,
                    const PlaneF& angle_deg, const GraphParams& params);

// Builds the full graph of one band. Candidates are enumerated in a
// (2*floor(q)+1)^2 window, which is equivalent to testing all pixel pairs
// because no pair beyond the radius can link.
DirectedPixelGraph build_graph(const PlaneI& band, const PlaneF& magnitude,
                               const PlaneF& angle_deg, const GraphParams& params);

// One graph per band.
std::vector<DirectedPixelGraph> build_graphs(const RasterImage& img, const GradientField& field,
                                             const GraphParams& params);

struct Degrees {
  Eigen::VectorXi in;
  Eigen::VectorXi out;
};
Degrees degrees(const DirectedPixelGraph& g);

// Text dump: header line "nodes=<MN> edges=<E>" followed by one "i j" line
// per edge, sorted by (i, j).
void write_edge_dump(const DirectedPixelGraph& g, std::ostream& os);

namespace detail {

// Shared gate evaluation; dist_sq is the squared pixel distance.
bool gates_pass(double dist_sq, int intensity_i, int intensity_j, double mag_i, double mag_j,
                double angle_i, double angle_j, const GraphParams& params);

} // namespace detail

} // namespace cnlbp
