#include "cnlbp/commands.hpp"

#include "cnlbp/selftest.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace cnlbp {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config: bad boolean value for '" + key + "': " + value);
}

std::pair<int, int> parse_resize(const std::string& value) {
  const auto x = value.find('x');
  if (x == std::string::npos) {
    throw std::invalid_argument("config: resize must look like 128x128, got: " + value);
  }
  return {static_cast<int>(parse_int("resize", value.substr(0, x))),
          static_cast<int>(parse_int("resize", value.substr(x + 1)))};
}

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config " + path + ":" + std::to_string(lineno) +
                               ": expected key=value");
    }
    values[trim(text.substr(0, eq))] = trim(text.substr(eq + 1));
  }
  return values;
}

std::vector<NeighborhoodSpec> parse_scales(const std::string& text) {
  std::vector<NeighborhoodSpec> scales;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("scales: expected P:R pairs, got: " + text);
    }
    scales.push_back({static_cast<int>(parse_int("scales", trim(item.substr(0, colon)))),
                      static_cast<int>(parse_int("scales", trim(item.substr(colon + 1))))});
  }
  if (scales.empty()) throw std::invalid_argument("scales: empty list");
  return scales;
}

void apply_config_values(CliConfig& cfg, const std::map<std::string, std::string>& values,
                         const std::set<std::string>& flags_set) {
  for (const auto& [key, value] : values) {
    if (flags_set.contains(key)) continue;  // flags override config-file values
    if (key == "q") {
      cfg.descriptor.graph.radius = parse_double(key, value);
    } else if (key == "r") {
      cfg.descriptor.graph.similarity = parse_double(key, value);
    } else if (key == "s") {
      cfg.descriptor.graph.gradient_diff = parse_double(key, value);
    } else if (key == "t") {
      cfg.descriptor.graph.angle_diff = parse_double(key, value);
    } else if (key == "gray_levels") {
      cfg.descriptor.graph.gray_levels = static_cast<int>(parse_int(key, value));
    } else if (key == "scales") {
      cfg.descriptor.scales = parse_scales(value);
    } else if (key == "normalize") {
      cfg.descriptor.normalize = parse_bool(key, value);
    } else if (key == "resize") {
      std::tie(cfg.descriptor.resize_width, cfg.descriptor.resize_height) = parse_resize(value);
    } else if (key == "ec_tol") {
      cfg.descriptor.ec_tol = parse_double(key, value);
    } else if (key == "ec_max_iter") {
      cfg.descriptor.ec_max_iter = static_cast<int>(parse_int(key, value));
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "format") {
      if (value == "jsonl") {
        cfg.format = FeatureFormat::Jsonl;
      } else if (value == "csv") {
        cfg.format = FeatureFormat::Csv;
      } else {
        throw std::invalid_argument("config: format must be jsonl or csv, got: " + value);
      }
    } else if (key == "test_fraction") {
      cfg.test_fraction = parse_double(key, value);
    } else if (key == "k") {
      cfg.knn_k = static_cast<int>(parse_int(key, value));
    } else if (key == "repeats") {
      cfg.repeats = static_cast<int>(parse_int(key, value));
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
}

BatchResult extract_batch(const std::vector<ManifestEntry>& inputs, const DescriptorConfig& cfg,
                          int workers) {
  cfg.validate();
  const std::size_t n = inputs.size();
  std::vector<std::optional<FeatureVector>> features(n);
  std::vector<std::string> failures(n);

  int thread_count = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  thread_count = std::clamp<int>(thread_count, 1, std::max<int>(1, static_cast<int>(n)));

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        features[i] = extract(load_image(inputs[i].path), cfg);
      } catch (const std::exception& e) {
        failures[i] = e.what();
        if (failures[i].empty()) failures[i] = "unknown error";
      }
    }
  };

  if (thread_count == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  BatchResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (features[i].has_value()) {
      result.ok_indices.push_back(static_cast<int>(i));
      result.features.push_back(std::move(*features[i]));
    } else {
      result.errors.emplace_back(static_cast<int>(i), failures[i]);
    }
  }
  return result;
}

int cmd_extract(const std::vector<ManifestEntry>& inputs, const CliConfig& cfg,
                const std::string& out_path) {
  cfg.descriptor.validate();
  const std::string digest = config_digest(cfg.descriptor);

  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write output file: " + out_path);
  std::clog << "effective config (digest " << digest << "):\n" << config_to_string(cfg.descriptor);

  const BatchResult batch = extract_batch(inputs, cfg.descriptor, cfg.workers);

  for (std::size_t row = 0; row < batch.features.size(); ++row) {
    const ManifestEntry& entry = inputs[batch.ok_indices[row]];
    if (cfg.format == FeatureFormat::Jsonl) {
      write_jsonl_record(out, entry.path, entry.label, digest, batch.features[row]);
    } else {
      if (row == 0) write_csv_header(out, digest, batch.features[row]);
      write_csv_row(out, entry.path, entry.label, batch.features[row]);
    }
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + out_path);

  if (!batch.errors.empty()) {
    const std::string log_path = out_path + ".errors.log";
    std::ofstream log(log_path, std::ios::trunc);
    if (!log) throw std::runtime_error("cannot write error log: " + log_path);
    for (const auto& [index, message] : batch.errors) {
      log << inputs[index].path << "\t" << message << "\n";
    }
    std::clog << batch.errors.size() << " of " << inputs.size() << " inputs failed; see "
              << log_path << "\n";
  }
  return 0;
}

int cmd_graph_stats(const std::string& image_path, int band, const CliConfig& cfg,
                    bool dump_edges, std::ostream& os) {
  const RasterImage img = load_image(image_path);
  if (band < 0 || band >= img.band_count()) {
    throw std::invalid_argument("graph-stats: band index " + std::to_string(band) +
                                " out of range (image has " + std::to_string(img.band_count()) +
                                " bands)");
  }
  const GradientField field = sobel_field(img);
  const DirectedPixelGraph g =
      build_graph(img.bands[band], field.magnitude[band], field.angle_deg[band],
                  cfg.descriptor.graph);

  if (dump_edges) {
    write_edge_dump(g, os);
    return 0;
  }

  const Degrees d = degrees(g);
  const auto summarize = [&os](const char* name, const Eigen::VectorXi& v) {
    os << name << ": min=" << v.minCoeff() << " mean=" << v.cast<double>().mean()
       << " max=" << v.maxCoeff() << "\n";
  };
  os << "image: " << image_path << "\n";
  os << "band: " << band << " (" << img.width() << "x" << img.height() << ")\n";
  os << "nodes=" << g.node_count() << " edges=" << g.edge_count() << "\n";
  if (g.node_count() > 0) {
    summarize("k_out", d.out);
    summarize("k_in", d.in);
  }
  return 0;
}

namespace {

void write_pgm(const PlaneF& plane, const std::string& path) {
  const double lo = plane.minCoeff();
  const double hi = plane.maxCoeff();
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "P5\n" << plane.cols() << " " << plane.rows() << "\n255\n";
  for (Eigen::Index y = 0; y < plane.rows(); ++y) {
    for (Eigen::Index x = 0; x < plane.cols(); ++x) {
      const long v = std::lround((plane(y, x) - lo) * scale);
      out.put(static_cast<char>(std::clamp<long>(v, 0, 255)));
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_plane_csv(const PlaneF& plane, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (Eigen::Index y = 0; y < plane.rows(); ++y) {
    for (Eigen::Index x = 0; x < plane.cols(); ++x) {
      if (x) out << ",";
      out << fmt_g17(plane(y, x));
    }
    out << "\n";
  }
}

void write_codes_csv(const CodeImage& codes, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (int y = 0; y < codes.height(); ++y) {
    for (int x = 0; x < codes.width(); ++x) {
      if (x) out << ",";
      out << codes.codes(y, x);
    }
    out << "\n";
  }
}

} // namespace

int cmd_maps(const std::string& image_path, const CliConfig& cfg, const std::string& out_dir,
             int band_filter) {
  cfg.descriptor.validate();
  const RasterImage img = load_image(image_path);
  const RasterImage resized =
      resize_bilinear(img, cfg.descriptor.resize_width, cfg.descriptor.resize_height);
  if (band_filter >= resized.band_count()) {
    throw std::invalid_argument("maps: band index out of range");
  }
  const MapFamilySet families = compute_map_families(resized, cfg.descriptor);

  std::filesystem::create_directories(out_dir);
  const std::string stem = std::filesystem::path(image_path).stem().string();

  for (const MapFamily family : kMapFamilies) {
    const auto planes = families.of(family);
    for (int band = 0; band < static_cast<int>(planes.size()); ++band) {
      if (band_filter >= 0 && band != band_filter) continue;
      const std::string base = (std::filesystem::path(out_dir) /
                                (stem + "_" + family_name(family) + "_b" + std::to_string(band)))
                                   .string();
      write_pgm(planes[band], base + ".pgm");
      write_plane_csv(planes[band], base + ".csv");
      for (const NeighborhoodSpec& scale : cfg.descriptor.scales) {
        const CodeImage codes = encode_image(planes[band], scale);
        write_codes_csv(codes, base + "_codes_" + std::to_string(scale.samples) + "_" +
                                   std::to_string(scale.radius) + ".csv");
      }
    }
  }
  return 0;
}

namespace {

Eigen::MatrixXd feature_matrix(const std::vector<FeatureVector>& features) {
  if (features.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(features.size()), features.front().values.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].values.size() != m.cols()) {
      throw std::runtime_error("classify: inconsistent feature lengths across images");
    }
    m.row(static_cast<Eigen::Index>(i)) = features[i].values.transpose();
  }
  return m;
}

nlohmann::ordered_json report_to_json(const EvalReport& report, int k) {
  nlohmann::ordered_json j;
  j["micro_accuracy"] = report.micro_accuracy;
  j["classes"] = report.classes;
  auto confusion = nlohmann::ordered_json::array();
  for (int row = 0; row < report.confusion.rows(); ++row) {
    auto line = nlohmann::ordered_json::array();
    for (int col = 0; col < report.confusion.cols(); ++col) {
      line.push_back(report.confusion(row, col));
    }
    confusion.push_back(std::move(line));
  }
  j["confusion"] = std::move(confusion);
  j["n_train"] = report.n_train;
  j["n_test"] = report.n_test;
  j["seed"] = report.seed;
  j["k"] = k;
  return j;
}

struct LabeledFeatures {
  Eigen::MatrixXd matrix;
  std::vector<std::string> labels;
};

LabeledFeatures features_for(const DatasetManifest& manifest,
                             const std::vector<ManifestEntry>& all_entries,
                             const std::vector<FeatureVector>& all_features) {
  // all_entries/all_features are parallel; look rows up by path.
  std::map<std::string, int> row_of;
  for (std::size_t i = 0; i < all_entries.size(); ++i) {
    row_of[all_entries[i].path] = static_cast<int>(i);
  }
  LabeledFeatures out;
  std::vector<FeatureVector> selected;
  for (const ManifestEntry& e : manifest.entries) {
    selected.push_back(all_features[row_of.at(e.path)]);
    out.labels.push_back(e.label);
  }
  out.matrix = feature_matrix(selected);
  return out;
}

} // namespace

int cmd_classify(const std::string& train_manifest, const std::string& test_manifest,
                 const CliConfig& cfg, const std::string& out_path, std::ostream& log) {
  cfg.descriptor.validate();
  const DatasetManifest train_full = read_manifest(train_manifest);

  // Extract features once for every involved image.
  std::vector<ManifestEntry> entries = train_full.entries;
  DatasetManifest test_full;
  if (!test_manifest.empty()) {
    test_full = read_manifest(test_manifest);
    entries.insert(entries.end(), test_full.entries.begin(), test_full.entries.end());
  }
  const BatchResult batch = extract_batch(entries, cfg.descriptor, cfg.workers);
  if (!batch.errors.empty()) {
    const auto& [index, message] = batch.errors.front();
    throw std::runtime_error("classify: extraction failed for " + entries[index].path + ": " +
                             message + " (" + std::to_string(batch.errors.size()) +
                             " failures total)");
  }
  std::vector<ManifestEntry> ok_entries;
  for (const int idx : batch.ok_indices) ok_entries.push_back(entries[idx]);

  nlohmann::ordered_json output;
  if (!test_manifest.empty()) {
    const LabeledFeatures train = features_for(train_full, ok_entries, batch.features);
    const LabeledFeatures test = features_for(test_full, ok_entries, batch.features);
    const EvalReport report = knn_evaluate(train.matrix, train.labels, test.matrix, test.labels,
                                           cfg.knn_k, cfg.seed);
    output = report_to_json(report, cfg.knn_k);
  } else {
    const int repeats = std::max(1, cfg.repeats);
    std::vector<double> accuracies;
    for (int rep = 0; rep < repeats; ++rep) {
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(rep);
      const auto [train_split, test_split] = split(train_full, cfg.test_fraction, seed);
      const LabeledFeatures train = features_for(train_split, ok_entries, batch.features);
      const LabeledFeatures test = features_for(test_split, ok_entries, batch.features);
      const EvalReport report = knn_evaluate(train.matrix, train.labels, test.matrix, test.labels,
                                             cfg.knn_k, seed);
      accuracies.push_back(report.micro_accuracy);
      if (rep == 0) output = report_to_json(report, cfg.knn_k);
    }
    if (repeats > 1) {
      double mean = 0.0;
      for (const double a : accuracies) mean += a;
      mean /= repeats;
      double var = 0.0;
      for (const double a : accuracies) var += (a - mean) * (a - mean);
      output["repeats"] = repeats;
      output["accuracy_per_run"] = accuracies;
      output["accuracy_mean"] = mean;
      output["accuracy_std"] = std::sqrt(var / repeats);
    }
    output["test_fraction"] = cfg.test_fraction;
  }
  output["config_digest"] = config_digest(cfg.descriptor);
  output["config"] = config_to_string(cfg.descriptor);

  const std::string text = output.dump(2) + "\n";
  if (out_path.empty()) {
    log << text;
  } else {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report: " + out_path);
    out << text;
  }
  return 0;
}

int cmd_selftest(std::ostream& os) {
  bool all_passed = true;
  for (const selftest::CheckResult& check : selftest::run_all()) {
    os << (check.passed ? "PASS" : "FAIL") << " " << check.name << ": " << check.detail << "\n";
    all_passed = all_passed && check.passed;
  }
  os << (all_passed ? "selftest passed" : "selftest FAILED") << "\n";
  return all_passed ? 0 : 1;
}

} // namespace cnlbp
