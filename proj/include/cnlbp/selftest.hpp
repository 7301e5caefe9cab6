#pragma once

#include "cnlbp/graph.hpp"
#include "cnlbp/lbp.hpp"
#include "cnlbp/plane.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cnlbp::selftest {

// Reference implementations kept deliberately naive and separate from the
// library's optimized paths; the release gate compares the two.

// Literal all-pairs edge enumeration: for every ordered pixel pair, distance,
// weight and the signed gradient/angle gates evaluated from scratch. O(N^2).
std::vector<std::pair<int, int>> brute_force_edges(const PlaneI& band, const PlaneF& magnitude,
                                                   const PlaneF& angle_deg,
                                                   const GraphParams& params);

// Triple loop over all (j, k) node pairs per node, straight from the
// adjacency relation. O(N^3).
Eigen::VectorXd clustering_triple_loop(const DirectedPixelGraph& g);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

CheckResult check_graph_brute_force();
CheckResult check_clustering_triple_loop();
// Verifies each table's codes are uniform, sorted and complete against
// exhaustive enumeration.
CheckResult check_uniform_census(std::span<const UniformTable> tables);
CheckResult check_vector_length();

// The four checks above with freshly built tables.
std::vector<CheckResult> run_all();

} // namespace cnlbp::selftest
