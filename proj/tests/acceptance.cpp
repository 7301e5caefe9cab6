// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Expected values come from hand derivations and from the naive
// reference implementations, never from the code paths under test.

#include "cnlbp/commands.hpp"
#include "cnlbp/descriptor.hpp"
#include "cnlbp/eval.hpp"
#include "cnlbp/selftest.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace cnlbp;

namespace {

int g_failures = 0;

void report(int criterion, bool passed, const std::string& detail) {
  std::printf("%s criterion %2d: %s\n", passed ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!passed) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 1. Default config on a 128x128 3-band image yields exactly 15426 values,
//    with per-scale bin counts 59/243/555.
void criterion_vector_length() {
  const auto start = std::chrono::steady_clock::now();
  RasterImage img;
  for (int b = 0; b < 3; ++b) {
    PlaneI plane(128, 128);
    for (int y = 0; y < 128; ++y) {
      for (int x = 0; x < 128; ++x) plane(y, x) = (3 * x + 5 * y + 7 * b) % 256;
    }
    img.bands.push_back(std::move(plane));
  }
  const FeatureVector fv = extract(img, DescriptorConfig{});

  bool bins_ok = true;
  int seen_scales = 0;
  for (const FeatureSegment& seg : fv.layout) {
    const int expected = seg.samples == 8 ? 59 : seg.samples == 16 ? 243 : 555;
    bins_ok = bins_ok && seg.bin_count == expected;
    ++seen_scales;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "vector length " << fv.values.size() << " (want 15426), bins 59/243/555 "
         << (bins_ok ? "ok" : "WRONG") << ", " << seen_scales << " segments, " << elapsed
         << " s";
  report(1, fv.values.size() == 15426 && bins_ok && seen_scales == 54 && elapsed < 1.0,
         detail.str());
}

// 2. build_graph equals the literal O(N^2) evaluation on 20 seeded images.
void criterion_graph_oracle() {
  const GraphParams params;
  int matched = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const RasterImage img = testutil::random_image(12, 12, 1, 1000 + seed);
    const GradientField field = sobel_field(img);
    const DirectedPixelGraph g =
        build_graph(img.bands[0], field.magnitude[0], field.angle_deg[0], params);
    std::vector<std::pair<int, int>> got;
    for (int i = 0; i < g.node_count(); ++i) {
      for (const int j : g.out_neighbors(i)) got.emplace_back(i, j);
    }
    const auto expected =
        selftest::brute_force_edges(img.bands[0], field.magnitude[0], field.angle_deg[0], params);
    if (got == expected) ++matched;
  }
  std::ostringstream detail;
  detail << matched << "/20 random 12x12 edge sets identical to the all-pairs oracle";
  report(2, matched == 20, detail.str());
}

// 3. Constant 16x16 image: every interior pixel has k_in = k_out = 20.
void criterion_constant_structure() {
  const RasterImage img = testutil::gray_image(PlaneI::Constant(16, 16, 200));
  const GradientField field = sobel_field(img);
  const GraphParams params;
  const DirectedPixelGraph g =
      build_graph(img.bands[0], field.magnitude[0], field.angle_deg[0], params);
  const Degrees d = degrees(g);

  bool interior_ok = true;
  for (int y = 2; y < 14; ++y) {
    for (int x = 2; x < 14; ++x) {
      interior_ok = interior_ok && d.in[y * 16 + x] == 20 && d.out[y * 16 + x] == 20;
    }
  }
  std::vector<std::pair<int, int>> got;
  for (int i = 0; i < g.node_count(); ++i) {
    for (const int j : g.out_neighbors(i)) got.emplace_back(i, j);
  }
  const bool oracle_ok =
      got == selftest::brute_force_edges(img.bands[0], field.magnitude[0], field.angle_deg[0],
                                         params);
  std::ostringstream detail;
  detail << "interior degrees " << (interior_ok ? "all 20/20" : "WRONG") << ", oracle "
         << (oracle_ok ? "confirms" : "DISAGREES");
  report(3, interior_ok && oracle_ok, detail.str());
}

// 4. Clustering matches the triple loop within 1e-12 on 50 random graphs,
//    stays in [0,1], and reproduces the hand-derived 0.5 / 0.25 cases.
void criterion_clustering_oracle() {
  double worst = 0.0;
  bool in_range = true;
  for (int trial = 0; trial < 50; ++trial) {
    const int nodes = 20 + (trial * 180) / 49;  // 20 .. 200
    const double prob = 0.02 + 0.13 * (trial % 7) / 6.0;
    const auto g = testutil::random_graph(nodes, prob, 5000 + trial);
    const Eigen::VectorXd got = Eigen::Map<const Eigen::VectorXd>(
        clustering_coefficient(g).values.data(), g.node_count());
    const Eigen::VectorXd expected = selftest::clustering_triple_loop(g);
    worst = std::max(worst, (got - expected).cwiseAbs().maxCoeff());
    in_range = in_range && got.minCoeff() >= 0.0 && got.maxCoeff() <= 1.0;
  }

  const std::vector<std::pair<int, int>> cycle{{0, 1}, {1, 2}, {2, 0}};
  const Eigen::VectorXd cc_cycle = Eigen::Map<const Eigen::VectorXd>(
      clustering_coefficient(DirectedPixelGraph::from_edges(3, 1, cycle)).values.data(), 3);
  const std::vector<std::pair<int, int>> bidir{{0, 1}, {1, 0}, {1, 2}, {2, 1}, {0, 2}, {2, 0}};
  const Eigen::VectorXd cc_bidir = Eigen::Map<const Eigen::VectorXd>(
      clustering_coefficient(DirectedPixelGraph::from_edges(3, 1, bidir)).values.data(), 3);
  const bool hand_ok = (cc_cycle.array() - 0.5).abs().maxCoeff() < 1e-14 &&
                       (cc_bidir.array() - 0.25).abs().maxCoeff() < 1e-14;

  std::ostringstream detail;
  detail << "50 graphs, max |cc - oracle| = " << worst << ", range "
         << (in_range ? "ok" : "VIOLATED") << ", 3-cycle 0.5 / bidirectional 0.25 "
         << (hand_ok ? "ok" : "WRONG");
  report(4, worst <= 1e-12 && in_range && hand_ok, detail.str());
}

// 5. Eigenvector centrality: fixed-point residual <= 1e-5, dense-solver match
//    within 1e-6 up to sign, exact uniform vector on a bidirectional cycle.
void criterion_eigenvector_fixed_point() {
  double worst_residual = 0.0;
  double worst_match = 0.0;
  for (const int nodes : {50, 120, 250, 500}) {
    const auto g = testutil::strongly_connected_graph(nodes, 0.1, 9000 + nodes);
    const PowerIterationResult r = power_iteration(g, EdgeDirection::In, 1e-10, 100000);
    if (!r.converged) {
      report(5, false, "power iteration failed to converge on n=" + std::to_string(nodes));
      return;
    }
    const Eigen::MatrixXd op = testutil::dense_adjacency(g).transpose();
    const Eigen::VectorXd residual = op * r.vector / r.eigenvalue - r.vector;
    worst_residual = std::max(worst_residual, residual.cwiseAbs().maxCoeff());

    const Eigen::VectorXd expected = testutil::dense_dominant_eigenvector(g, EdgeDirection::In);
    worst_match = std::max(worst_match,
                           std::min((r.vector - expected).cwiseAbs().maxCoeff(),
                                    (r.vector + expected).cwiseAbs().maxCoeff()));
  }

  std::vector<std::pair<int, int>> edges;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    edges.emplace_back(i, (i + 1) % n);
    edges.emplace_back((i + 1) % n, i);
  }
  const MeasureImage ec =
      eigenvector_centrality(DirectedPixelGraph::from_edges(n, 1, edges));
  const double cycle_err =
      (Eigen::Map<const Eigen::VectorXd>(ec.values.data(), n).array() - 1.0 / std::sqrt(100.0))
          .abs()
          .maxCoeff();

  std::ostringstream detail;
  detail << "residual " << worst_residual << " (<= 1e-5), dense match " << worst_match
         << " (<= 1e-6), cycle deviation " << cycle_err << " (<= 1e-9)";
  report(5, worst_residual <= 1e-5 && worst_match <= 1e-6 && cycle_err <= 1e-9, detail.str());
}

// 6. Uniform-pattern census: 58 codes for P=8 exhaustively; 242 and 554 for
//    P=16 and 24 by both the closed form and enumeration; bins 59/243/555.
void criterion_uniform_census() {
  bool ok = true;
  std::ostringstream detail;
  for (const auto [p, expected_codes] : {std::pair{8, 58}, {16, 242}, {24, 554}}) {
    int enumerated = 0;
    for (std::uint32_t code = 0; code < (1u << p); ++code) {
      if (uniformity(code, p) <= 2) ++enumerated;
    }
    const int analytic = p * (p - 1) + 2;
    const UniformTable table(p);
    ok = ok && enumerated == expected_codes && analytic == expected_codes &&
         table.uniform_code_count() == expected_codes &&
         table.bin_count() == expected_codes + 1;
    detail << "P=" << p << ": " << enumerated << " codes/" << table.bin_count() << " bins  ";
  }
  report(6, ok, detail.str());
}

// 7. Synthetic smoke classification: 4 classes x 30 images at 128x128,
//    0.3 split, kNN k=5 on full vectors reaches micro accuracy >= 0.95.
void criterion_smoke_classification(const std::string& work_dir) {
  const auto start = std::chrono::steady_clock::now();
  const DatasetManifest manifest = synth_textures(
      {"hstripes", "vstripes", "checker", "noise"}, 30, 128, 128, 42, work_dir + "/smoke");
  const auto [train_manifest, test_manifest] = split(manifest, 0.3, 42);

  const DescriptorConfig cfg;  // full default descriptor
  const BatchResult train_batch = extract_batch(train_manifest.entries, cfg, 1);
  const BatchResult test_batch = extract_batch(test_manifest.entries, cfg, 1);
  if (!train_batch.errors.empty() || !test_batch.errors.empty()) {
    report(7, false, "feature extraction failed on synthetic images");
    return;
  }

  // Single-band images: 5142 values per row.
  Eigen::MatrixXd train(train_batch.features.size(), train_batch.features.front().values.size());
  std::vector<std::string> train_labels;
  for (std::size_t i = 0; i < train_batch.features.size(); ++i) {
    train.row(i) = train_batch.features[i].values.transpose();
    train_labels.push_back(train_manifest.entries[i].label);
  }
  Eigen::MatrixXd test(test_batch.features.size(), train.cols());
  std::vector<std::string> test_labels;
  for (std::size_t i = 0; i < test_batch.features.size(); ++i) {
    test.row(i) = test_batch.features[i].values.transpose();
    test_labels.push_back(test_manifest.entries[i].label);
  }

  const EvalReport result = knn_evaluate(train, train_labels, test, test_labels, 5, 42);
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "micro accuracy " << result.micro_accuracy << " on " << result.n_test
         << " test images (>= 0.95), " << elapsed << " s single-threaded (<= 300)";
  report(7, result.micro_accuracy >= 0.95 && elapsed <= 300.0, detail.str());
}

// 8. Worker counts 1 and max produce byte-identical feature files.
void criterion_determinism(const std::string& work_dir) {
  const DatasetManifest manifest = synth_textures(
      {"hstripes", "checker", "noise"}, 2, 64, 64, 7, work_dir + "/det");
  bool ok = true;
  std::ostringstream detail;
  for (const FeatureFormat format : {FeatureFormat::Jsonl, FeatureFormat::Csv}) {
    CliConfig cfg;
    cfg.format = format;
    cfg.workers = 1;
    const std::string ext = format == FeatureFormat::Jsonl ? "jsonl" : "csv";
    cmd_extract(manifest.entries, cfg, work_dir + "/one." + ext);
    cfg.workers = 0;  // all cores
    cmd_extract(manifest.entries, cfg, work_dir + "/max." + ext);
    const bool same = read_file(work_dir + "/one." + ext) == read_file(work_dir + "/max." + ext);
    ok = ok && same;
    detail << ext << " " << (same ? "identical" : "DIFFERS") << "  ";
  }
  report(8, ok, detail.str());
}

// 9. One 128x128 RGB extraction in <= 2 s single-threaded.
void criterion_performance() {
  RasterImage img;
  std::mt19937_64 rng(2718);
  for (int b = 0; b < 3; ++b) {
    PlaneI plane(128, 128);
    for (int y = 0; y < 128; ++y) {
      for (int x = 0; x < 128; ++x) {
        const int stripe = (((b == 0 ? y : x) + b) / 8) % 2 ? 190 : 60;
        plane(y, x) = std::clamp(stripe + static_cast<int>(rng() % 21) - 10, 0, 255);
      }
    }
    img.bands.push_back(std::move(plane));
  }
  const auto start = std::chrono::steady_clock::now();
  const FeatureVector fv = extract(img, DescriptorConfig{});
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "full RGB extraction in " << elapsed << " s (<= 2), " << fv.values.size()
         << " values";
  report(9, elapsed <= 2.0 && fv.values.size() == 15426, detail.str());
}

// 10. The published benchmark tables need the original multi-gigabyte
//     datasets and an out-of-scope SVM; what this suite guarantees instead is
//     criteria 1-9 plus working JSONL/CSV export for external reproduction.
void criterion_export_path(const std::string& work_dir) {
  const DatasetManifest manifest =
      synth_textures({"checker"}, 2, 64, 64, 13, work_dir + "/exp");
  CliConfig cfg;
  cmd_extract(manifest.entries, cfg, work_dir + "/exp.jsonl");
  cfg.format = FeatureFormat::Csv;
  cmd_extract(manifest.entries, cfg, work_dir + "/exp.csv");

  const std::string jsonl = read_file(work_dir + "/exp.jsonl");
  const std::string csv = read_file(work_dir + "/exp.csv");
  const bool ok = jsonl.find("\"vector\":") != std::string::npos &&
                  jsonl.find("\"config_digest\":") != std::string::npos &&
                  csv.rfind("# config_digest=", 0) == 0 &&
                  csv.find("ti_8_1_0_0") != std::string::npos;
  report(10, ok,
         std::string("published accuracy tables not reproducible at desk scale ") +
             "(benchmark datasets and SVM out of scope); JSONL/CSV export path " +
             (ok ? "verified" : "BROKEN"));
}

} // namespace

int main() {
  const std::string work_dir =
      (std::filesystem::temp_directory_path() / "cnlbp_acceptance").string();
  std::filesystem::remove_all(work_dir);
  std::filesystem::create_directories(work_dir);

  criterion_vector_length();
  criterion_graph_oracle();
  criterion_constant_structure();
  criterion_clustering_oracle();
  criterion_eigenvector_fixed_point();
  criterion_uniform_census();
  criterion_smoke_classification(work_dir);
  criterion_determinism(work_dir);
  criterion_performance();
  criterion_export_path(work_dir);

  std::filesystem::remove_all(work_dir);
  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
