#include "cnlbp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cnlbp {

const char* measure_name(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::Clustering: return "cc";
    case MeasureKind::InDegree: return "idc";
    case MeasureKind::OutDegree: return "odc";
    case MeasureKind::Eigenvector: return "ec";
  }
  return "?";
}

namespace {

PlaneF plane_from_nodes(const DirectedPixelGraph& g, const Eigen::VectorXd& values) {
  return Eigen::Map<const PlaneF>(values.data(), g.height(), g.width());
}

// Sorted union of the in- and out-neighbor lists.
void union_neighbors(const DirectedPixelGraph& g, int node, std::vector<int>& out) {
  out.clear();
  const auto a = g.out_neighbors(node);
  const auto b = g.in_neighbors(node);
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
}

} // namespace

MeasureImage clustering_coefficient(const DirectedPixelGraph& g) {
  const int n = g.node_count();
  Eigen::VectorXd cc = Eigen::VectorXd::Zero(n);

  // cbrt of the possible (a_ij * a_ik * a_jk) products; link-pair sums are
  // binary so products fall in {1, 2, 4, 8}.
  double cbrt_of[9];
  for (int p = 0; p < 9; ++p) cbrt_of[p] = std::cbrt(static_cast<double>(p));

  std::vector<int> hood;
  for (int i = 0; i < n; ++i) {
    const int k_tot = g.in_degree(i) + g.out_degree(i);
    if (k_tot <= 1) continue;

    int bilateral = 0;
    for (const int j : g.out_neighbors(i)) {
      if (g.has_edge(j, i)) ++bilateral;
    }
    const double denom = static_cast<double>(k_tot) * (k_tot - 1) - 2.0 * bilateral;
    if (denom <= 0.0) continue;

    union_neighbors(g, i, hood);
    double numerator = 0.0;
    for (std::size_t a = 0; a < hood.size(); ++a) {
      const int j = hood[a];
      const int aij = (g.has_edge(i, j) ? 1 : 0) + (g.has_edge(j, i) ? 1 : 0);
      for (std::size_t b = a + 1; b < hood.size(); ++b) {
        const int k = hood[b];
        const int ajk = (g.has_edge(j, k) ? 1 : 0) + (g.has_edge(k, j) ? 1 : 0);
        if (ajk == 0) continue;
        const int aik = (g.has_edge(i, k) ? 1 : 0) + (g.has_edge(k, i) ? 1 : 0);
        numerator += cbrt_of[aij * aik * ajk];
      }
    }
    cc[i] = numerator / denom;
  }
  return {MeasureKind::Clustering, plane_from_nodes(g, cc)};
}

std::pair<MeasureImage, MeasureImage> degree_centrality(const DirectedPixelGraph& g) {
  const int n = g.node_count();
  if (n < 2) throw std::invalid_argument("degree_centrality: graph needs at least two nodes");

  Eigen::VectorXd idc(n), odc(n);
  const double scale = 1.0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    idc[i] = g.in_degree(i) * scale;
    odc[i] = g.out_degree(i) * scale;
  }
  return {MeasureImage{MeasureKind::InDegree, plane_from_nodes(g, idc)},
          MeasureImage{MeasureKind::OutDegree, plane_from_nodes(g, odc)}};
}

PowerIterationResult power_iteration(const DirectedPixelGraph& g, EdgeDirection direction,
                                     double tol, int max_iter, double teleport) {
  if (!(tol > 0.0)) throw std::invalid_argument("power_iteration: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("power_iteration: max_iter must be >= 1");

  const int n = g.node_count();
  PowerIterationResult result;

  // Iterate on the shifted operator A+I (next = A*u + u). The shift leaves
  // every eigenvector of A in place but makes the Perron root strictly
  // dominant inside each component, so periodic structures (isolated
  // bilateral paths and directed cycles, common in near-noise pixel graphs)
  // cannot stall the iteration. Standard graph toolkits iterate the same way.
  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd next(n);

  for (int iter = 1; iter <= max_iter; ++iter) {
    for (int i = 0; i < n; ++i) {
      double sum = u[i];
      const auto row = (direction == EdgeDirection::In) ? g.in_neighbors(i) : g.out_neighbors(i);
      for (const int j : row) sum += u[j];
      next[i] = sum;
    }
    if (teleport != 0.0) {
      const double uniform = teleport * u.sum() / n;
      next.array() += uniform;
    }

    // u enters with unit norm, so the shifted operator's dominant eigenvalue
    // is estimated by the norm and the adjacency's by norm - 1.
    const double norm = next.norm();
    next /= norm;

    result.eigenvalue = norm - 1.0;
    result.l1_change = (next - u).cwiseAbs().sum();
    result.iterations = iter;
    u.swap(next);
    if (result.l1_change < n * tol) {
      result.converged = true;
      break;
    }
  }

  result.vector = std::move(u);
  return result;
}

MeasureImage eigenvector_centrality(const DirectedPixelGraph& g, double tol, int max_iter,
                                    EdgeDirection direction) {
  if (g.edge_count() == 0) {
    return {MeasureKind::Eigenvector, PlaneF::Zero(g.height(), g.width())};
  }

  PowerIterationResult result = power_iteration(g, direction, tol, max_iter);
  if (!result.converged) {
    result = power_iteration(g, direction, tol, max_iter, 1e-9);
  }
  if (!result.converged) {
    throw std::runtime_error("eigenvector_centrality: power iteration did not converge after " +
                             std::to_string(max_iter) + " iterations (with teleport retry)");
  }
  return {MeasureKind::Eigenvector, plane_from_nodes(g, result.vector)};
}

std::vector<MeasureImage> measure_stack(std::span<const DirectedPixelGraph> graphs,
                                        MeasureKind kind, double ec_tol, int ec_max_iter) {
  std::vector<MeasureImage> out;
  out.reserve(graphs.size());
  for (const DirectedPixelGraph& g : graphs) {
    switch (kind) {
      case MeasureKind::Clustering:
        out.push_back(clustering_coefficient(g));
        break;
      case MeasureKind::InDegree:
        out.push_back(degree_centrality(g).first);
        break;
      case MeasureKind::OutDegree:
        out.push_back(degree_centrality(g).second);
        break;
      case MeasureKind::Eigenvector:
        out.push_back(eigenvector_centrality(g, ec_tol, ec_max_iter));
        break;
    }
  }
  return out;
}

} // namespace cnlbp
