#include "cnlbp/commands.hpp"

#include "cnlbp/selftest.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cnlbp;

namespace {

CliConfig fast_config() {
  CliConfig cfg;
  cfg.descriptor.scales = {{8, 1}};
  cfg.descriptor.resize_width = 32;
  cfg.descriptor.resize_height = 32;
  return cfg;
}

std::string make_image(const testutil::TempDir& dir, const std::string& name, std::uint64_t seed,
                       int bands = 1, int size = 32) {
  const std::string path = dir.file(name);
  save_bmp(testutil::random_image(size, size, bands, seed), path);
  return path;
}

} // namespace

TEST_CASE("extract_batch keeps input order and isolates failures") {
  testutil::TempDir dir;
  const std::vector<ManifestEntry> inputs = {
      {make_image(dir, "a.bmp", 1), "x"},
      {dir.file("missing.bmp"), "y"},
      {make_image(dir, "c.bmp", 2), "z"},
  };
  const BatchResult batch = extract_batch(inputs, fast_config().descriptor, 2);
  CHECK(batch.ok_indices == std::vector<int>{0, 2});
  CHECK(batch.features.size() == 2);
  REQUIRE(batch.errors.size() == 1);
  CHECK(batch.errors[0].first == 1);
}

TEST_CASE("cmd_extract writes one jsonl record per image with the full default length") {
  testutil::TempDir dir;
  const std::vector<ManifestEntry> inputs = {{make_image(dir, "rgb.bmp", 3, 3, 128), "tex"}};
  CliConfig cfg;  // full default config
  const std::string out = dir.file("features.jsonl");
  CHECK(cmd_extract(inputs, cfg, out) == 0);

  std::ifstream in(out);
  std::string line;
  REQUIRE(std::getline(in, line));
  const auto record = nlohmann::json::parse(line);
  CHECK(record["vector"].size() == 15426);
  CHECK(record["label"] == "tex");
  CHECK(record["config_digest"] == config_digest(cfg.descriptor));
  CHECK_FALSE(std::getline(in, line));
  CHECK_FALSE(std::filesystem::exists(out + ".errors.log"));
}

TEST_CASE("cmd_extract with no inputs writes an empty file and succeeds") {
  testutil::TempDir dir;
  const std::string out = dir.file("empty.jsonl");
  CHECK(cmd_extract({}, fast_config(), out) == 0);
  CHECK(std::filesystem::exists(out));
  CHECK(std::filesystem::file_size(out) == 0);
}

TEST_CASE("cmd_extract logs unreadable images and keeps going") {
  testutil::TempDir dir;
  const std::vector<ManifestEntry> inputs = {
      {make_image(dir, "ok1.bmp", 4), "a"},
      {dir.file("gone.bmp"), "b"},
      {make_image(dir, "ok2.bmp", 5), "c"},
  };
  const std::string out = dir.file("batch.jsonl");
  CHECK(cmd_extract(inputs, fast_config(), out) == 0);

  std::ifstream in(out);
  std::string line;
  int records = 0;
  while (std::getline(in, line)) ++records;
  CHECK(records == 2);

  const std::string log = testutil::read_file(out + ".errors.log");
  CHECK(log.find("gone.bmp") != std::string::npos);
}

TEST_CASE("cmd_extract csv output carries the digest comment and header") {
  testutil::TempDir dir;
  const std::vector<ManifestEntry> inputs = {{make_image(dir, "g.bmp", 6), "lbl"}};
  CliConfig cfg = fast_config();
  cfg.format = FeatureFormat::Csv;
  const std::string out = dir.file("features.csv");
  CHECK(cmd_extract(inputs, cfg, out) == 0);

  std::ifstream in(out);
  std::string comment, header, row;
  REQUIRE(std::getline(in, comment));
  REQUIRE(std::getline(in, header));
  REQUIRE(std::getline(in, row));
  CHECK(comment == "# config_digest=" + config_digest(cfg.descriptor));
  CHECK(header.rfind("path,label,ti_8_1_0_0,", 0) == 0);
  CHECK(row.rfind(inputs[0].path + ",lbl,", 0) == 0);
}

TEST_CASE("cmd_graph_stats reports the constant-image structure") {
  testutil::TempDir dir;
  const std::string path = dir.file("const.bmp");
  save_bmp(testutil::gray_image(PlaneI::Constant(16, 16, 99)), path);

  std::ostringstream os;
  CHECK(cmd_graph_stats(path, 0, CliConfig{}, false, os) == 0);
  const std::string text = os.str();
  CHECK(text.find("nodes=256 edges=") != std::string::npos);
  CHECK(text.find("max=20") != std::string::npos);

  std::ostringstream dump;
  CHECK(cmd_graph_stats(path, 0, CliConfig{}, true, dump) == 0);
  std::istringstream lines(dump.str());
  std::string header;
  REQUIRE(std::getline(lines, header));
  CHECK(header.rfind("nodes=256 edges=", 0) == 0);
  int last_i = -1, last_j = -1, count = 0;
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    int i = 0, j = 0;
    REQUIRE((fields >> i >> j));
    CHECK((i > last_i || (i == last_i && j > last_j)));  // sorted by (i, j)
    last_i = i;
    last_j = j;
    ++count;
  }
  CHECK(header == "nodes=256 edges=" + std::to_string(count));
}

TEST_CASE("cmd_graph_stats handles a 1x1 image and rejects bad bands") {
  testutil::TempDir dir;
  const std::string path = dir.file("dot.bmp");
  save_bmp(testutil::gray_image(PlaneI::Constant(1, 1, 8)), path);

  std::ostringstream os;
  CHECK(cmd_graph_stats(path, 0, CliConfig{}, false, os) == 0);
  CHECK(os.str().find("nodes=1 edges=0") != std::string::npos);

  CHECK_THROWS_AS(cmd_graph_stats(path, 3, CliConfig{}, false, os), std::invalid_argument);
  CHECK_THROWS_AS(cmd_graph_stats(path, -1, CliConfig{}, false, os), std::invalid_argument);
}

TEST_CASE("cmd_maps exports planes, csv and code images") {
  testutil::TempDir dir;
  const std::string path = make_image(dir, "tex.bmp", 7);
  const std::string out_dir = dir.file("maps");
  CHECK(cmd_maps(path, fast_config(), out_dir) == 0);

  for (const char* family : {"ti", "gi", "cc", "idc", "odc", "ec"}) {
    const std::string base = out_dir + "/tex_" + family + "_b0";
    CHECK(std::filesystem::exists(base + ".pgm"));
    CHECK(std::filesystem::exists(base + ".csv"));
    CHECK(std::filesystem::exists(base + "_codes_8_1.csv"));
  }

  const std::string pgm = testutil::read_file(out_dir + "/tex_ti_b0.pgm");
  CHECK(pgm.rfind("P5\n32 32\n255\n", 0) == 0);
  CHECK(pgm.size() == std::string("P5\n32 32\n255\n").size() + 32 * 32);

  // Code CSV: border cells are -1, interior cells are valid codes.
  std::ifstream codes(out_dir + "/tex_ti_b0_codes_8_1.csv");
  std::string first_row;
  REQUIRE(std::getline(codes, first_row));
  CHECK(first_row.rfind("-1,-1", 0) == 0);
}

TEST_CASE("cmd_classify produces a deterministic report with the expected schema") {
  testutil::TempDir dir;
  const DatasetManifest manifest =
      synth_textures({"hstripes", "vstripes", "checker", "noise"}, 6, 32, 32, 3,
                     dir.file("imgs"));
  write_manifest(manifest, dir.file("train.csv"));

  CliConfig cfg = fast_config();
  cfg.seed = 17;
  cfg.knn_k = 3;
  cfg.test_fraction = 0.3;

  std::ostringstream ignored;
  CHECK(cmd_classify(dir.file("train.csv"), "", cfg, dir.file("r1.json"), ignored) == 0);
  CHECK(cmd_classify(dir.file("train.csv"), "", cfg, dir.file("r2.json"), ignored) == 0);
  CHECK(testutil::read_file(dir.file("r1.json")) == testutil::read_file(dir.file("r2.json")));

  const auto report = nlohmann::json::parse(testutil::read_file(dir.file("r1.json")));
  CHECK(report.contains("micro_accuracy"));
  CHECK(report["seed"] == 17);
  CHECK(report["k"] == 3);
  CHECK(report["n_train"].get<int>() + report["n_test"].get<int>() == 24);
  CHECK(report["classes"].size() == 4);
  CHECK(report["confusion"].size() == 4);
  CHECK(report["config_digest"] == config_digest(cfg.descriptor));

  // Separate test manifest path.
  const auto [train_half, test_half] = split(manifest, 0.5, 4);
  write_manifest(train_half, dir.file("tr.csv"));
  write_manifest(test_half, dir.file("te.csv"));
  CHECK(cmd_classify(dir.file("tr.csv"), dir.file("te.csv"), cfg, dir.file("r3.json"), ignored) ==
        0);
  const auto held_out = nlohmann::json::parse(testutil::read_file(dir.file("r3.json")));
  CHECK(held_out["n_test"] == static_cast<int>(test_half.entries.size()));

  // k larger than the training set is a command-level error.
  cfg.knn_k = 1000;
  CHECK_THROWS(cmd_classify(dir.file("train.csv"), "", cfg, dir.file("r4.json"), ignored));
}

TEST_CASE("cmd_classify repeats report mean and deviation") {
  testutil::TempDir dir;
  const DatasetManifest manifest =
      synth_textures({"hstripes", "noise"}, 8, 32, 32, 21, dir.file("imgs"));
  write_manifest(manifest, dir.file("m.csv"));

  CliConfig cfg = fast_config();
  cfg.repeats = 3;
  cfg.knn_k = 3;
  std::ostringstream ignored;
  CHECK(cmd_classify(dir.file("m.csv"), "", cfg, dir.file("rep.json"), ignored) == 0);
  const auto report = nlohmann::json::parse(testutil::read_file(dir.file("rep.json")));
  CHECK(report["repeats"] == 3);
  CHECK(report["accuracy_per_run"].size() == 3);
  CHECK(report.contains("accuracy_mean"));
  CHECK(report.contains("accuracy_std"));
}

TEST_CASE("cmd_selftest passes and its census check is sensitive to corruption") {
  std::ostringstream os;
  CHECK(cmd_selftest(os) == 0);
  const std::string text = os.str();
  CHECK(text.find("PASS graph-brute-force") != std::string::npos);
  CHECK(text.find("PASS clustering-triple-loop") != std::string::npos);
  CHECK(text.find("PASS uniform-census") != std::string::npos);
  CHECK(text.find("PASS vector-length") != std::string::npos);
  CHECK(text.find("FAIL") == std::string::npos);

  std::ostringstream again;
  cmd_selftest(again);
  CHECK(os.str() == again.str());

  // A deliberately corrupted table must trip the census check.
  std::vector<std::uint32_t> codes = UniformTable(8).uniform_codes();
  codes[5] = 0b01010101;
  const UniformTable corrupted(8, std::move(codes));
  const UniformTable tables[] = {UniformTable(8), corrupted};
  const selftest::CheckResult result = selftest::check_uniform_census(tables);
  CHECK_FALSE(result.passed);
}

TEST_CASE("config files parse, apply, and lose to flags") {
  testutil::TempDir dir;
  {
    std::ofstream cfg_file(dir.file("cnlbp.cfg"));
    cfg_file << "# comment line\n"
             << "q = 2\n"
             << "r=0.4\n"
             << "scales=8:1,16:2\n"
             << "normalize=false\n"
             << "resize=64x48\n"
             << "workers=3\n"
             << "k=7\n";
  }
  const auto values = parse_config_file(dir.file("cnlbp.cfg"));
  CHECK(values.at("q") == "2");
  CHECK(values.at("scales") == "8:1,16:2");

  CliConfig cfg;
  apply_config_values(cfg, values, {});
  CHECK(cfg.descriptor.graph.radius == 2.0);
  CHECK(cfg.descriptor.graph.similarity == 0.4);
  CHECK(cfg.descriptor.scales.size() == 2);
  CHECK(cfg.descriptor.scales[1].samples == 16);
  CHECK_FALSE(cfg.descriptor.normalize);
  CHECK(cfg.descriptor.resize_width == 64);
  CHECK(cfg.descriptor.resize_height == 48);
  CHECK(cfg.workers == 3);
  CHECK(cfg.knn_k == 7);

  // A flag twin already given on the command line wins over the file.
  CliConfig flagged;
  flagged.descriptor.graph.radius = 5.0;
  apply_config_values(flagged, values, {"q"});
  CHECK(flagged.descriptor.graph.radius == 5.0);
  CHECK(flagged.descriptor.graph.similarity == 0.4);

  CliConfig bad;
  CHECK_THROWS_AS(apply_config_values(bad, {{"mystery", "1"}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_values(bad, {{"q", "abc"}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_values(bad, {{"format", "xml"}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_file(dir.file("missing.cfg")), std::runtime_error);
}

TEST_CASE("parse_scales") {
  const auto scales = parse_scales("8:1,16:2,24:3");
  REQUIRE(scales.size() == 3);
  CHECK(scales[0].samples == 8);
  CHECK(scales[2].radius == 3);
  CHECK_THROWS_AS(parse_scales("8-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scales(""), std::invalid_argument);
}
