#include "cnlbp/selftest.hpp"

#include "cnlbp/descriptor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace cnlbp::selftest {

std::vector<std::pair<int, int>> brute_force_edges(const PlaneI& band, const PlaneF& magnitude,
                                                   const PlaneF& angle_deg,
                                                   const GraphParams& params) {
  const int w = static_cast<int>(band.cols());
  const int h = static_cast<int>(band.rows());
  const int n = w * h;
  const double q = params.radius;

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    const int xi = i % w, yi = i / w;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const int xj = j % w, yj = j / w;
      const double d = std::sqrt(static_cast<double>(xi - xj) * (xi - xj) +
                                 static_cast<double>(yi - yj) * (yi - yj));
      if (d > q) continue;  // beyond the search radius nothing links
      const double weight =
          (d * d + q * q * std::abs(band(yi, xi) - band(yj, xj)) / params.gray_levels) /
          (2.0 * q * q);
      if (weight > params.similarity) continue;
      if (magnitude(yi, xi) - magnitude(yj, xj) > params.gradient_diff) continue;
      if (wrap_degrees(angle_deg(yi, xi) - angle_deg(yj, xj)) > params.angle_diff) continue;
      edges.emplace_back(i, j);
    }
  }
  return edges;
}

Eigen::VectorXd clustering_triple_loop(const DirectedPixelGraph& g) {
  const int n = g.node_count();

  // Work from a dense adjacency copy so the reference path shares nothing
  // with the CSR membership machinery.
  Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (const int j : g.out_neighbors(i)) adj(i, j) = 1;
  }

  Eigen::VectorXd cc = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    double numerator = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const int aij = adj(i, j) + adj(j, i);
      if (aij == 0) continue;  // factor is zero, term contributes nothing
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const int aik = adj(i, k) + adj(k, i);
        const int ajk = adj(j, k) + adj(k, j);
        numerator += std::cbrt(static_cast<double>(aij * aik * ajk));
      }
    }
    numerator /= 2.0;

    int k_tot = 0;
    int bilateral = 0;
    for (int j = 0; j < n; ++j) {
      k_tot += adj(i, j) + adj(j, i);
      bilateral += adj(i, j) * adj(j, i);
    }
    const double denom = static_cast<double>(k_tot) * (k_tot - 1) - 2.0 * bilateral;
    cc[i] = denom > 0.0 ? numerator / denom : 0.0;
  }
  return cc;
}

namespace {

RasterImage random_image(int width, int height, int bands, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RasterImage img;
  for (int b = 0; b < bands; ++b) {
    PlaneI plane(height, width);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) plane(y, x) = static_cast<int>(rng() % 256);
    }
    img.bands.push_back(std::move(plane));
  }
  return img;
}

std::vector<std::pair<int, int>> collect_edges(const DirectedPixelGraph& g) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(g.edge_count()));
  for (int i = 0; i < g.node_count(); ++i) {
    for (const int j : g.out_neighbors(i)) edges.emplace_back(i, j);
  }
  return edges;
}

DirectedPixelGraph random_graph(int nodes, double edge_prob, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      if (i != j && coin(rng) < edge_prob) edges.emplace_back(i, j);
    }
  }
  return DirectedPixelGraph::from_edges(nodes, 1, edges);
}

} // namespace

CheckResult check_graph_brute_force() {
  const GraphParams params;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const RasterImage img = random_image(12, 12, 1, seed);
    const GradientField field = sobel_field(img);
    const DirectedPixelGraph g = build_graph(img.bands[0], field.magnitude[0],
                                             field.angle_deg[0], params);
    const auto got = collect_edges(g);
    const auto expected = brute_force_edges(img.bands[0], field.magnitude[0], field.angle_deg[0],
                                            params);
    if (got != expected) {
      std::ostringstream detail;
      detail << "edge sets differ on seed " << seed << " (" << got.size() << " vs "
             << expected.size() << " edges)";
      return {"graph-brute-force", false, detail.str()};
    }
  }
  return {"graph-brute-force", true, "5 random 12x12 bands, all-pairs enumeration matches"};
}

CheckResult check_clustering_triple_loop() {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DirectedPixelGraph g = random_graph(60, 0.08, seed);
    const Eigen::VectorXd got = Eigen::Map<const Eigen::VectorXd>(
        clustering_coefficient(g).values.data(), g.node_count());
    const Eigen::VectorXd expected = clustering_triple_loop(g);
    const double err = (got - expected).cwiseAbs().maxCoeff();
    if (err > 1e-12) {
      std::ostringstream detail;
      detail << "max deviation " << err << " on seed " << seed;
      return {"clustering-triple-loop", false, detail.str()};
    }
  }
  return {"clustering-triple-loop", true, "5 random 60-node graphs within 1e-12"};
}

CheckResult check_uniform_census(std::span<const UniformTable> tables) {
  for (const UniformTable& table : tables) {
    const int p = table.samples();
    const int expected = p * (p - 1) + 2;

    int exhaustive = 0;
    for (std::uint32_t code = 0; code < (1u << p); ++code) {
      if (uniformity(code, p) <= 2) ++exhaustive;
    }
    if (exhaustive != expected) {
      std::ostringstream detail;
      detail << "P=" << p << ": enumeration found " << exhaustive << " uniform codes, expected "
             << expected;
      return {"uniform-census", false, detail.str()};
    }

    const auto& codes = table.uniform_codes();
    const bool sorted = std::is_sorted(codes.begin(), codes.end()) &&
                        std::adjacent_find(codes.begin(), codes.end()) == codes.end();
    bool all_uniform = true;
    for (const std::uint32_t code : codes) {
      if (code >= (1u << p) || uniformity(code, p) > 2) all_uniform = false;
    }
    if (!sorted || !all_uniform || table.uniform_code_count() != expected ||
        table.bin_count() != expected + 1) {
      std::ostringstream detail;
      detail << "P=" << p << ": table holds " << table.uniform_code_count()
             << " codes (expected " << expected << ")"
             << (sorted ? "" : ", not sorted") << (all_uniform ? "" : ", non-uniform code present");
      return {"uniform-census", false, detail.str()};
    }
  }
  return {"uniform-census", true, "code counts and bin layout verified exhaustively"};
}

CheckResult check_vector_length() {
  RasterImage img;
  for (int b = 0; b < 3; ++b) {
    PlaneI plane(128, 128);
    for (int y = 0; y < 128; ++y) {
      for (int x = 0; x < 128; ++x) plane(y, x) = (3 * x + 5 * y + 7 * b) % 256;
    }
    img.bands.push_back(std::move(plane));
  }

  const DescriptorConfig cfg;
  const FeatureVector fv = extract(img, cfg);
  const int expected = feature_length(3, cfg.scales);
  if (fv.values.size() != 15426 || expected != 15426) {
    std::ostringstream detail;
    detail << "got " << fv.values.size() << " values (formula says " << expected
           << "), expected 15426";
    return {"vector-length", false, detail.str()};
  }
  for (const FeatureSegment& seg : fv.layout) {
    if (seg.bin_count != seg.samples * (seg.samples - 1) + 3) {
      return {"vector-length", false, "segment bin count mismatch"};
    }
  }
  return {"vector-length", true, "default config on 128x128 RGB gives 15426 values"};
}

std::vector<CheckResult> run_all() {
  const UniformTable tables[] = {UniformTable(8), UniformTable(16), UniformTable(24)};
  return {
      check_graph_brute_force(),
      check_clustering_triple_loop(),
      check_uniform_census(tables),
      check_vector_length(),
  };
}

} // namespace cnlbp::selftest
