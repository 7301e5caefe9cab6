#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cnlbp {

struct ManifestEntry {
  std::string path;
  std::string label;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  // Distinct labels, sorted ascending.
  std::vector<std::string> class_labels() const;
};

// CSV with a "path,label" header line.
DatasetManifest read_manifest(const std::string& path);
void write_manifest(const DatasetManifest& manifest, const std::string& path);

// Stratified split: per class, round(count * test_fraction) entries go to
// test, chosen by a seeded deterministic shuffle; the rest to train. Both
// halves keep the manifest's original order. Throws if any class has fewer
// than two samples.
std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest,
                                                  double test_fraction, std::uint64_t seed);

// Majority label among the k Euclidean-nearest training rows. Vote ties are
// broken by smaller mean distance, then by lexicographically smaller label.
std::string knn_classify(const Eigen::MatrixXd& train, const std::vector<std::string>& labels,
                         const Eigen::VectorXd& query, int k);

// Fraction of exact matches; for single-label multiclass problems the
// micro-averaged accuracy reduces to this.
double micro_accuracy(const std::vector<std::string>& predictions,
                      const std::vector<std::string>& truth);

struct EvalReport {
  double micro_accuracy = 0.0;
  std::vector<std::string> classes;  // confusion row/column order
  Eigen::MatrixXi confusion;         // confusion(truth, predicted)
  int n_train = 0;
  int n_test = 0;
  std::uint64_t seed = 0;
};

// Classifies every test row against the training set and tabulates the
// confusion matrix over the union of labels.
EvalReport knn_evaluate(const Eigen::MatrixXd& train, const std::vector<std::string>& train_labels,
                        const Eigen::MatrixXd& test, const std::vector<std::string>& test_labels,
                        int k, std::uint64_t seed);

// Deterministic synthetic texture images written as grayscale BMPs under
// out_dir, one subdirectory-free file per image, with a seeded random phase
// shift per image and additive noise of at most `noise_amplitude` gray
// levels. Built-in classes: "hstripes", "vstripes", "checker", "noise".
DatasetManifest synth_textures(const std::vector<std::string>& classes, int n_per_class,
                               int width, int height, std::uint64_t seed,
                               const std::string& out_dir, int noise_amplitude = 10);

} // namespace cnlbp
