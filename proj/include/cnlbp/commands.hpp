#pragma once

#include "cnlbp/descriptor.hpp"
#include "cnlbp/eval.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace cnlbp {

enum class FeatureFormat { Jsonl, Csv };

struct CliConfig {
  DescriptorConfig descriptor;
  FeatureFormat format = FeatureFormat::Jsonl;
  int workers = 0;  // 0 = available parallelism
  std::uint64_t seed = 0;
  double test_fraction = 0.3;
  int knn_k = 5;
  int repeats = 1;
};

// Flat key=value text, '#' comments and blank lines skipped.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Applies config-file values to cfg for every key whose flag twin was not
// given on the command line (flags always win). Unknown keys throw.
void apply_config_values(CliConfig& cfg, const std::map<std::string, std::string>& values,
                         const std::set<std::string>& flags_set);

std::vector<NeighborhoodSpec> parse_scales(const std::string& text);

// Batch extraction: features for every input in input order, computed with
// `workers` threads. Failed entries get no feature row; their index and error
// go to `errors`. Output is independent of the worker count.
struct BatchResult {
  std::vector<int> ok_indices;                // positions into the input list
  std::vector<FeatureVector> features;        // parallel to ok_indices
  std::vector<std::pair<int, std::string>> errors;
};
BatchResult extract_batch(const std::vector<ManifestEntry>& inputs, const DescriptorConfig& cfg,
                          int workers);

// Commands return a process exit code. Per-image failures inside a batch are
// logged to "<out>.errors.log" and do not abort extraction.
int cmd_extract(const std::vector<ManifestEntry>& inputs, const CliConfig& cfg,
                const std::string& out_path);
int cmd_graph_stats(const std::string& image_path, int band, const CliConfig& cfg,
                    bool dump_edges, std::ostream& os);
int cmd_maps(const std::string& image_path, const CliConfig& cfg, const std::string& out_dir,
             int band_filter = -1);
int cmd_classify(const std::string& train_manifest, const std::string& test_manifest,
                 const CliConfig& cfg, const std::string& out_path, std::ostream& log);
int cmd_selftest(std::ostream& os);

} // namespace cnlbp
