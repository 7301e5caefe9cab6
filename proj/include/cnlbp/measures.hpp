#pragma once

#include "cnlbp/graph.hpp"
#include "cnlbp/plane.hpp"

#include <Eigen/Core>

#include <span>
#include <utility>
#include <vector>

namespace cnlbp {

enum class MeasureKind { Clustering, InDegree, OutDegree, Eigenvector };

// Short names used in file outputs: "cc", "idc", "odc", "ec".
const char* measure_name(MeasureKind kind);

// One real-valued per-pixel network measure for one band.
struct MeasureImage {
  MeasureKind kind;
  PlaneF values;
};

// Directed clustering coefficient. Per node, triangles are counted over the
// union of in- and out-neighbors with each link pair (l_ij + l_ji) entering
// through its cube root, normalized by k_tot*(k_tot-1) - 2*bilateral; nodes
// where that denominator is not positive get 0.
MeasureImage clustering_coefficient(const DirectedPixelGraph& g);

// k_in/(n-1) and k_out/(n-1). Throws for graphs with fewer than two nodes.
std::pair<MeasureImage, MeasureImage> degree_centrality(const DirectedPixelGraph& g);

enum class EdgeDirection { In, Out };

struct PowerIterationResult {
  Eigen::VectorXd vector;   // non-negative, unit Euclidean norm (zero for edgeless graphs)
  double eigenvalue = 0.0;  // dominant-eigenvalue estimate
  int iterations = 0;
  double l1_change = 0.0;   // total L1 change of the final step
  bool converged = false;
};

// Power iteration on the selected edge direction, from the uniform vector,
// renormalized to unit Euclidean norm each step. The iteration runs on the
// shifted operator A+I, which shares all eigenvectors with A but cannot be
// stalled by periodic components; eigenvalue reports the adjacency estimate.
// Converged when the total L1 change of one step drops below
// node_count * tol. `teleport` mixes in a uniform term of that weight.
PowerIterationResult power_iteration(const DirectedPixelGraph& g, EdgeDirection direction,
                                     double tol, int max_iter, double teleport = 0.0);

// Dominant eigenvector of the adjacency operator. The in-edge convention
// (u'(i) sums u over edges j->i) is the default, matching standard graph
// toolkits; pass EdgeDirection::Out for the transposed reading. Edgeless
// graphs yield all zeros. If plain iteration fails to converge, one retry
// with a 1e-9 uniform teleport is attempted before throwing.
MeasureImage eigenvector_centrality(const DirectedPixelGraph& g, double tol = 1e-6,
                                    int max_iter = 1000,
                                    EdgeDirection direction = EdgeDirection::In);

// Applies one measure to each band's graph independently.
std::vector<MeasureImage> measure_stack(std::span<const DirectedPixelGraph> graphs,
                                        MeasureKind kind, double ec_tol = 1e-6,
                                        int ec_max_iter = 1000);

} // namespace cnlbp
