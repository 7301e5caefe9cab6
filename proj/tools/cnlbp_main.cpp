// Command-line front end: extract, graph-stats, maps, classify, selftest.

#include "cnlbp/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <set>
#include <string>
#include <vector>

namespace {

struct FlagState {
  std::string config_path;
  std::string scales;
  std::string resize;
  std::string format;
  bool no_normalize = false;
};

// Canonical config-file key for each flag that has a twin.
const std::vector<std::pair<std::string, std::string>> kFlagKeys = {
    {"--q", "q"},
    {"--r", "r"},
    {"--s", "s"},
    {"--t", "t"},
    {"--gray-levels", "gray_levels"},
    {"--scales", "scales"},
    {"--no-normalize", "normalize"},
    {"--resize", "resize"},
    {"--ec-tol", "ec_tol"},
    {"--ec-max-iter", "ec_max_iter"},
    {"--workers", "workers"},
    {"--seed", "seed"},
    {"--format", "format"},
    {"--test-fraction", "test_fraction"},
    {"--k", "k"},
    {"--repeats", "repeats"},
};

void add_common_options(CLI::App& app, cnlbp::CliConfig& cfg, FlagState& flags) {
  app.add_option("--config", flags.config_path,
                 "Flat key=value config file (default: $CNLBP_CONFIG)");
  app.add_option("--q", cfg.descriptor.graph.radius, "Search-radius threshold in pixels");
  app.add_option("--r", cfg.descriptor.graph.similarity, "Similarity threshold");
  app.add_option("--s", cfg.descriptor.graph.gradient_diff, "Gradient-difference threshold");
  app.add_option("--t", cfg.descriptor.graph.angle_diff, "Angle-difference threshold (degrees)");
  app.add_option("--gray-levels", cfg.descriptor.graph.gray_levels, "Maximum gray level");
  app.add_option("--scales", flags.scales, "Sampling scales, e.g. 8:1,16:2,24:3");
  app.add_flag("--no-normalize", flags.no_normalize, "Keep raw histogram counts");
  app.add_option("--resize", flags.resize, "Working size, e.g. 128x128");
  app.add_option("--ec-tol", cfg.descriptor.ec_tol, "Eigenvector-centrality tolerance");
  app.add_option("--ec-max-iter", cfg.descriptor.ec_max_iter,
                 "Eigenvector-centrality iteration cap");
  app.add_option("--workers", cfg.workers, "Worker threads (0 = all cores)");
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--format", flags.format, "Feature file format: jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  app.add_option("--test-fraction", cfg.test_fraction, "Test fraction for splits");
  app.add_option("--k", cfg.knn_k, "Neighbor count for kNN");
  app.add_option("--repeats", cfg.repeats, "Repeated split count for classify");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"CN-LBP texture descriptor pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  cnlbp::CliConfig cfg;
  FlagState flags;
  add_common_options(app, cfg, flags);

  // extract
  std::vector<std::string> extract_inputs;
  std::string extract_manifest, extract_out;
  CLI::App* sub_extract = app.add_subcommand("extract", "Compute feature vectors for images");
  sub_extract->add_option("inputs", extract_inputs, "Image files");
  sub_extract->add_option("--manifest", extract_manifest, "CSV manifest (path,label)");
  sub_extract->add_option("--out", extract_out, "Output feature file")->required();

  // graph-stats
  std::string stats_image;
  int stats_band = 0;
  bool stats_dump = false;
  CLI::App* sub_stats = app.add_subcommand("graph-stats", "Pixel-graph summary for one band");
  sub_stats->add_option("image", stats_image, "Image file")->required();
  sub_stats->add_option("--band", stats_band, "Band index (default 0)");
  sub_stats->add_flag("--dump-edges", stats_dump, "Emit the edge dump instead of the summary");

  // maps
  std::string maps_image, maps_out_dir;
  int maps_band = -1;
  CLI::App* sub_maps = app.add_subcommand("maps", "Export feature planes and code images");
  sub_maps->add_option("image", maps_image, "Image file")->required();
  sub_maps->add_option("--out-dir", maps_out_dir, "Output directory")->required();
  sub_maps->add_option("--band", maps_band, "Only this band (default: all)");

  // classify
  std::string classify_train, classify_test, classify_out;
  CLI::App* sub_classify = app.add_subcommand("classify", "kNN evaluation over a manifest");
  sub_classify->add_option("--train", classify_train, "Training manifest CSV")->required();
  sub_classify->add_option("--test", classify_test,
                           "Test manifest CSV (default: split --train by --test-fraction)");
  sub_classify->add_option("--out", classify_out, "Report JSON path (default: stdout)");

  CLI::App* sub_selftest = app.add_subcommand("selftest", "Run the embedded oracle suite");

  CLI11_PARSE(app, argc, argv);

  try {
    // Flags beat the config file; the config file beats built-in defaults.
    std::string config_path = flags.config_path;
    if (config_path.empty()) {
      if (const char* env = std::getenv("CNLBP_CONFIG")) config_path = env;
    }
    if (!config_path.empty()) {
      std::set<std::string> given;
      for (const auto& [flag, key] : kFlagKeys) {
        if (app.count(flag) > 0) given.insert(key);
      }
      cnlbp::apply_config_values(cfg, cnlbp::parse_config_file(config_path), given);
    }
    if (app.count("--scales") > 0) cfg.descriptor.scales = cnlbp::parse_scales(flags.scales);
    if (app.count("--no-normalize") > 0) cfg.descriptor.normalize = false;
    if (app.count("--resize") > 0) {
      const auto x = flags.resize.find('x');
      if (x == std::string::npos) throw std::invalid_argument("--resize must look like 128x128");
      cfg.descriptor.resize_width = std::stoi(flags.resize.substr(0, x));
      cfg.descriptor.resize_height = std::stoi(flags.resize.substr(x + 1));
    }
    if (app.count("--format") > 0) {
      cfg.format = (flags.format == "csv") ? cnlbp::FeatureFormat::Csv
                                           : cnlbp::FeatureFormat::Jsonl;
    }

    if (sub_extract->parsed()) {
      std::vector<cnlbp::ManifestEntry> inputs;
      for (const std::string& path : extract_inputs) inputs.push_back({path, ""});
      if (!extract_manifest.empty()) {
        const cnlbp::DatasetManifest manifest = cnlbp::read_manifest(extract_manifest);
        inputs.insert(inputs.end(), manifest.entries.begin(), manifest.entries.end());
      }
      return cnlbp::cmd_extract(inputs, cfg, extract_out);
    }
    if (sub_stats->parsed()) {
      return cnlbp::cmd_graph_stats(stats_image, stats_band, cfg, stats_dump, std::cout);
    }
    if (sub_maps->parsed()) {
      return cnlbp::cmd_maps(maps_image, cfg, maps_out_dir, maps_band);
    }
    if (sub_classify->parsed()) {
      return cnlbp::cmd_classify(classify_train, classify_test, cfg, classify_out, std::cout);
    }
    if (sub_selftest->parsed()) {
      return cnlbp::cmd_selftest(std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
