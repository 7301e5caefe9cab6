#include "cnlbp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace cnlbp {

void GraphParams::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("graph: radius must be > 0");
  if (!(similarity > 0.0)) throw std::invalid_argument("graph: similarity must be > 0");
  if (gradient_diff < 0.0) throw std::invalid_argument("graph: gradient_diff must be >= 0");
  if (angle_diff < 0.0) throw std::invalid_argument("graph: angle_diff must be >= 0");
  if (gray_levels <= 0) throw std::invalid_argument("graph: gray_levels must be > 0");
}

namespace detail {

bool gates_pass(double dist_sq, int intensity_i, int intensity_j, double mag_i, double mag_j,
                double angle_i, double angle_j, const GraphParams& params) {
  const double q2 = params.radius * params.radius;
  if (dist_sq <= 0.0 || dist_sq > q2) return false;
  const double w =
      (dist_sq + q2 * std::abs(intensity_i - intensity_j) / params.gray_levels) / (2.0 * q2);
  if (w > params.similarity) return false;
  if (mag_i - mag_j > params.gradient_diff) return false;
  return wrap_degrees(angle_i - angle_j) <= params.angle_diff;
}

} // namespace detail

double pixel_distance(int i, int j, int width) {
  const double dx = static_cast<double>(i % width) - static_cast<double>(j % width);
  const double dy = static_cast<double>(i / width) - static_cast<double>(j / width);
  return std::sqrt(dx * dx + dy * dy);
}

double edge_weight(int intensity_i, int intensity_j, double distance, const GraphParams& params) {
  const double q2 = params.radius * params.radius;
  return (distance * distance + q2 * std::abs(intensity_i - intensity_j) / params.gray_levels) /
         (2.0 * q2);
}

bool link_predicate(int i, int j, const PlaneI& band, const PlaneF& magnitude,
                    const PlaneF& angle_deg, const GraphParams& params) {
  if (i == j) return false;
  const int width = static_cast<int>(band.cols());
  const int xi = i % width, yi = i / width;
  const int xj = j % width, yj = j / width;
  const double dx = xi - xj;
  const double dy = yi - yj;
  return detail::gates_pass(dx * dx + dy * dy, band(yi, xi), band(yj, xj), magnitude(yi, xi),
                            magnitude(yj, xj), angle_deg(yi, xi), angle_deg(yj, xj), params);
}

DirectedPixelGraph build_graph(const PlaneI& band, const PlaneF& magnitude,
                               const PlaneF& angle_deg, const GraphParams& params) {
  params.validate();
  if (band.rows() != magnitude.rows() || band.cols() != magnitude.cols() ||
      band.rows() != angle_deg.rows() || band.cols() != angle_deg.cols()) {
    throw std::invalid_argument("build_graph: band and gradient dimensions differ");
  }

  const int w = static_cast<int>(band.cols());
  const int h = static_cast<int>(band.rows());

  // Candidate offsets inside the radius, ordered so neighbor lists come out
  // sorted by node index.
  struct Offset {
    int dy, dx, dist_sq;
  };
  const int win = static_cast<int>(std::floor(params.radius));
  std::vector<Offset> offsets;
  for (int dy = -win; dy <= win; ++dy) {
    for (int dx = -win; dx <= win; ++dx) {
      const int d2 = dx * dx + dy * dy;
      if (d2 == 0) continue;
      if (static_cast<double>(d2) <= params.radius * params.radius) {
        offsets.push_back({dy, dx, d2});
      }
    }
  }

  std::vector<std::int64_t> out_offsets(static_cast<std::size_t>(w) * h + 1, 0);
  std::vector<int> out_targets;
  out_targets.reserve(static_cast<std::size_t>(w) * h * offsets.size() / 2);

  const int* intensity = band.data();
  const double* mag = magnitude.data();
  const double* ang = angle_deg.data();

  int node = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++node) {
      for (const Offset& o : offsets) {
        const int ny = y + o.dy;
        const int nx = x + o.dx;
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        const int other = ny * w + nx;
        if (detail::gates_pass(o.dist_sq, intensity[node], intensity[other], mag[node],
                               mag[other], ang[node], ang[other], params)) {
          out_targets.push_back(other);
        }
      }
      out_offsets[node + 1] = static_cast<std::int64_t>(out_targets.size());
    }
  }

  return DirectedPixelGraph::from_adjacency(w, h, std::move(out_offsets), std::move(out_targets));
}

std::vector<DirectedPixelGraph> build_graphs(const RasterImage& img, const GradientField& field,
                                             const GraphParams& params) {
  if (img.band_count() != field.band_count()) {
    throw std::invalid_argument("build_graphs: band counts differ");
  }
  std::vector<DirectedPixelGraph> graphs;
  graphs.reserve(img.bands.size());
  for (int b = 0; b < img.band_count(); ++b) {
    graphs.push_back(build_graph(img.bands[b], field.magnitude[b], field.angle_deg[b], params));
  }
  return graphs;
}

DirectedPixelGraph DirectedPixelGraph::from_adjacency(int width, int height,
                                                      std::vector<std::int64_t> out_offsets,
                                                      std::vector<int> out_targets) {
  DirectedPixelGraph g;
  g.width_ = width;
  g.height_ = height;
  g.out_offsets_ = std::move(out_offsets);
  g.out_targets_ = std::move(out_targets);
  g.build_in_from_out();
  return g;
}

DirectedPixelGraph DirectedPixelGraph::from_edges(int width, int height,
                                                  std::span<const std::pair<int, int>> edges) {
  const int n = width * height;
  std::vector<std::pair<int, int>> sorted(edges.begin(), edges.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<std::int64_t> offsets(n + 1, 0);
  std::vector<int> targets;
  targets.reserve(sorted.size());
  for (const auto& [from, to] : sorted) {
    if (from < 0 || from >= n || to < 0 || to >= n) {
      throw std::invalid_argument("from_edges: node index out of range");
    }
    if (from == to) throw std::invalid_argument("from_edges: self-loop");
    ++offsets[from + 1];
    targets.push_back(to);
  }
  for (int i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  return from_adjacency(width, height, std::move(offsets), std::move(targets));
}

void DirectedPixelGraph::build_in_from_out() {
  const int n = node_count();
  in_offsets_.assign(n + 1, 0);
  for (const int target : out_targets_) ++in_offsets_[target + 1];
  for (int i = 0; i < n; ++i) in_offsets_[i + 1] += in_offsets_[i];

  in_sources_.resize(out_targets_.size());
  std::vector<std::int64_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
  for (int i = 0; i < n; ++i) {
    for (const int target : out_neighbors(i)) {
      in_sources_[cursor[target]++] = i;  // sources arrive in ascending i
    }
  }
}

bool DirectedPixelGraph::has_edge(int from, int to) const {
  const auto row = out_neighbors(from);
  return std::binary_search(row.begin(), row.end(), to);
}

Degrees degrees(const DirectedPixelGraph& g) {
  const int n = g.node_count();
  Degrees d;
  d.in.resize(n);
  d.out.resize(n);
  for (int i = 0; i < n; ++i) {
    d.in[i] = g.in_degree(i);
    d.out[i] = g.out_degree(i);
  }
  return d;
}

void write_edge_dump(const DirectedPixelGraph& g, std::ostream& os) {
  os << "nodes=" << g.node_count() << " edges=" << g.edge_count() << "\n";
  for (int i = 0; i < g.node_count(); ++i) {
    for (const int j : g.out_neighbors(i)) {
      os << i << " " << j << "\n";
    }
  }
}

} // namespace cnlbp
