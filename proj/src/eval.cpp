#include "cnlbp/eval.hpp"

#include "cnlbp/image.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

namespace cnlbp {

std::vector<std::string> DatasetManifest::class_labels() const {
  std::set<std::string> labels;
  for (const ManifestEntry& e : entries) labels.insert(e.label);
  return {labels.begin(), labels.end()};
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  DatasetManifest manifest;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == "path,label") continue;  // header optional but expected
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("manifest line without comma: " + line);
    }
    manifest.entries.push_back({line.substr(0, comma), line.substr(comma + 1)});
  }
  return manifest;
}

void write_manifest(const DatasetManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << "path,label\n";
  for (const ManifestEntry& e : manifest.entries) out << e.path << "," << e.label << "\n";
}

namespace {

// Fisher-Yates with explicit draws so the result does not depend on the
// standard library's std::shuffle implementation.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng() % i]);
  }
}

} // namespace

std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest,
                                                  double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("split: test_fraction must be in (0, 1)");
  }

  // Class -> entry indices in manifest order; classes processed in sorted
  // label order so the draw sequence is well defined.
  std::map<std::string, std::vector<int>> by_class;
  for (int i = 0; i < static_cast<int>(manifest.entries.size()); ++i) {
    by_class[manifest.entries[i].label].push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<char> is_test(manifest.entries.size(), 0);
  for (auto& [label, indices] : by_class) {
    if (indices.size() < 2) {
      throw std::invalid_argument("split: class '" + label + "' has fewer than 2 samples");
    }
    deterministic_shuffle(indices, rng);
    const long n_test = std::lround(static_cast<double>(indices.size()) * test_fraction);
    for (long i = 0; i < n_test; ++i) is_test[indices[i]] = 1;
  }

  DatasetManifest train, test;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    (is_test[i] ? test : train).entries.push_back(manifest.entries[i]);
  }
  return {train, test};
}

std::string knn_classify(const Eigen::MatrixXd& train, const std::vector<std::string>& labels,
                         const Eigen::VectorXd& query, int k) {
  const int n = static_cast<int>(train.rows());
  if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("knn: label count does not match training rows");
  }
  if (k < 1 || k > n) throw std::invalid_argument("knn: k must be in [1, train size]");
  if (train.cols() != query.size()) {
    throw std::invalid_argument("knn: query dimension does not match training vectors");
  }

  const Eigen::VectorXd dist_sq = (train.rowwise() - query.transpose()).rowwise().squaredNorm();

  // k nearest, ties on distance broken by training index.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
    return dist_sq[a] != dist_sq[b] ? dist_sq[a] < dist_sq[b] : a < b;
  });

  struct Tally {
    int votes = 0;
    double dist_sum = 0.0;
  };
  std::map<std::string, Tally> tallies;
  for (int i = 0; i < k; ++i) {
    Tally& t = tallies[labels[order[i]]];
    ++t.votes;
    t.dist_sum += std::sqrt(dist_sq[order[i]]);
  }

  const std::string* best = nullptr;
  int best_votes = -1;
  double best_mean = 0.0;
  for (const auto& [label, tally] : tallies) {  // ascending label order
    const double mean = tally.dist_sum / tally.votes;
    if (tally.votes > best_votes || (tally.votes == best_votes && mean < best_mean)) {
      best = &label;
      best_votes = tally.votes;
      best_mean = mean;
    }
  }
  return *best;
}

double micro_accuracy(const std::vector<std::string>& predictions,
                      const std::vector<std::string>& truth) {
  if (predictions.size() != truth.size() || truth.empty()) {
    throw std::invalid_argument("micro_accuracy: label lists must have equal nonzero length");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predictions[i] == truth[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

EvalReport knn_evaluate(const Eigen::MatrixXd& train, const std::vector<std::string>& train_labels,
                        const Eigen::MatrixXd& test, const std::vector<std::string>& test_labels,
                        int k, std::uint64_t seed) {
  std::set<std::string> class_set(train_labels.begin(), train_labels.end());
  class_set.insert(test_labels.begin(), test_labels.end());

  EvalReport report;
  report.classes.assign(class_set.begin(), class_set.end());
  report.n_train = static_cast<int>(train.rows());
  report.n_test = static_cast<int>(test.rows());
  report.seed = seed;
  const int c = static_cast<int>(report.classes.size());
  report.confusion = Eigen::MatrixXi::Zero(c, c);

  auto class_index = [&report](const std::string& label) {
    const auto it = std::lower_bound(report.classes.begin(), report.classes.end(), label);
    return static_cast<int>(it - report.classes.begin());
  };

  std::vector<std::string> predictions(test.rows());
  for (int i = 0; i < test.rows(); ++i) {
    predictions[i] = knn_classify(train, train_labels, test.row(i).transpose(), k);
    report.confusion(class_index(test_labels[i]), class_index(predictions[i])) += 1;
  }
  report.micro_accuracy = micro_accuracy(predictions, test_labels);
  return report;
}

namespace {

enum class TexturePattern { HStripes, VStripes, Checker, Noise };

TexturePattern pattern_for(const std::string& name) {
  if (name == "hstripes") return TexturePattern::HStripes;
  if (name == "vstripes") return TexturePattern::VStripes;
  if (name == "checker") return TexturePattern::Checker;
  if (name == "noise") return TexturePattern::Noise;
  throw std::invalid_argument("synth_textures: unknown class '" + name + "'");
}

} // namespace

DatasetManifest synth_textures(const std::vector<std::string>& classes, int n_per_class,
                               int width, int height, std::uint64_t seed,
                               const std::string& out_dir, int noise_amplitude) {
  if (n_per_class < 2) throw std::invalid_argument("synth_textures: n_per_class must be >= 2");
  if (width < 1 || height < 1) throw std::invalid_argument("synth_textures: bad size");
  if (noise_amplitude < 0 || noise_amplitude > 10) {
    throw std::invalid_argument("synth_textures: noise amplitude must be in [0, 10]");
  }
  std::filesystem::create_directories(out_dir);

  constexpr int kLow = 60, kHigh = 190, kStripe = 8;
  std::mt19937_64 rng(seed);
  auto draw = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  DatasetManifest manifest;
  for (const std::string& name : classes) {
    const TexturePattern pattern = pattern_for(name);
    for (int idx = 0; idx < n_per_class; ++idx) {
      const int phase_x = draw(0, 2 * kStripe - 1);
      const int phase_y = draw(0, 2 * kStripe - 1);

      PlaneI plane(height, width);
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          int value = 0;
          switch (pattern) {
            case TexturePattern::HStripes:
              value = (((y + phase_y) / kStripe) % 2) ? kHigh : kLow;
              break;
            case TexturePattern::VStripes:
              value = (((x + phase_x) / kStripe) % 2) ? kHigh : kLow;
              break;
            case TexturePattern::Checker:
              value = (((x + phase_x) / kStripe + (y + phase_y) / kStripe) % 2) ? kHigh : kLow;
              break;
            case TexturePattern::Noise:
              value = draw(0, 255);
              break;
          }
          if (pattern != TexturePattern::Noise && noise_amplitude > 0) {
            value += draw(-noise_amplitude, noise_amplitude);
          }
          plane(y, x) = std::clamp(value, 0, 255);
        }
      }

      RasterImage img;
      img.bands.push_back(std::move(plane));
      const std::string path =
          (std::filesystem::path(out_dir) / (name + "_" + std::to_string(idx) + ".bmp")).string();
      save_bmp(img, path);
      manifest.entries.push_back({path, name});
    }
  }
  return manifest;
}

} // namespace cnlbp
