#include "cnlbp/descriptor.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace cnlbp {

const char* family_name(MapFamily family) {
  switch (family) {
    case MapFamily::Intensity: return "ti";
    case MapFamily::GradientMagnitude: return "gi";
    case MapFamily::Clustering: return "cc";
    case MapFamily::InDegree: return "idc";
    case MapFamily::OutDegree: return "odc";
    case MapFamily::Eigenvector: return "ec";
  }
  return "?";
}

void DescriptorConfig::validate() const {
  graph.validate();
  if (scales.empty()) throw std::invalid_argument("descriptor: scales must be non-empty");
  for (const NeighborhoodSpec& s : scales) {
    const bool known = (s.samples == 8 && s.radius == 1) || (s.samples == 16 && s.radius == 2) ||
                       (s.samples == 24 && s.radius == 3);
    if (!known) {
      throw std::invalid_argument("descriptor: scale must be one of 8:1, 16:2, 24:3");
    }
  }
  if (resize_width < 1 || resize_height < 1) {
    throw std::invalid_argument("descriptor: resize dimensions must be >= 1");
  }
  if (!(ec_tol > 0.0)) throw std::invalid_argument("descriptor: ec_tol must be > 0");
  if (ec_max_iter < 1) throw std::invalid_argument("descriptor: ec_max_iter must be >= 1");
}

int MapFamilySet::plane_count() const {
  int n = 0;
  for (const auto& family : planes) n += static_cast<int>(family.size());
  return n;
}

int feature_length(int bands, std::span<const NeighborhoodSpec> scales) {
  int per_band = 0;
  for (const NeighborhoodSpec& s : scales) per_band += s.samples * (s.samples - 1) + 3;
  return 6 * bands * per_band;
}

MapFamilySet compute_map_families(const RasterImage& img, const DescriptorConfig& cfg) {
  cfg.validate();
  if (img.band_count() == 0) throw std::invalid_argument("compute_map_families: empty image");

  const GradientField field = sobel_field(img);
  const std::vector<DirectedPixelGraph> graphs = build_graphs(img, field, cfg.graph);

  MapFamilySet set;
  auto& planes = set.planes;
  for (const PlaneI& band : img.bands) {
    planes[static_cast<std::size_t>(MapFamily::Intensity)].push_back(band.cast<double>());
  }
  planes[static_cast<std::size_t>(MapFamily::GradientMagnitude)] = field.magnitude;
  for (const DirectedPixelGraph& g : graphs) {
    planes[static_cast<std::size_t>(MapFamily::Clustering)].push_back(
        clustering_coefficient(g).values);
    auto [idc, odc] = degree_centrality(g);
    planes[static_cast<std::size_t>(MapFamily::InDegree)].push_back(std::move(idc.values));
    planes[static_cast<std::size_t>(MapFamily::OutDegree)].push_back(std::move(odc.values));
    planes[static_cast<std::size_t>(MapFamily::Eigenvector)].push_back(
        eigenvector_centrality(g, cfg.ec_tol, cfg.ec_max_iter).values);
  }
  return set;
}

FeatureVector extract(const RasterImage& img, const DescriptorConfig& cfg) {
  cfg.validate();
  const RasterImage resized = resize_bilinear(img, cfg.resize_width, cfg.resize_height);
  const MapFamilySet families = compute_map_families(resized, cfg);
  const int bands = resized.band_count();

  std::vector<UniformTable> tables;
  tables.reserve(cfg.scales.size());
  for (const NeighborhoodSpec& s : cfg.scales) tables.emplace_back(s.samples);

  FeatureVector fv;
  fv.values.resize(feature_length(bands, cfg.scales));
  int offset = 0;
  for (const MapFamily family : kMapFamilies) {
    const auto planes = families.of(family);
    for (std::size_t si = 0; si < cfg.scales.size(); ++si) {
      const NeighborhoodSpec& scale = cfg.scales[si];
      for (int band = 0; band < bands; ++band) {
        const CodeImage codes = encode_image(planes[band], scale);
        const Eigen::VectorXd h = histogram(codes, tables[si], cfg.normalize);
        fv.values.segment(offset, h.size()) = h;
        fv.layout.push_back({family, scale.samples, scale.radius, band, offset,
                             static_cast<int>(h.size())});
        offset += static_cast<int>(h.size());
      }
    }
  }
  return fv;
}

namespace {

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

std::string config_to_string(const DescriptorConfig& cfg) {
  std::string s;
  s += "q=" + fmt_g17(cfg.graph.radius) + "\n";
  s += "r=" + fmt_g17(cfg.graph.similarity) + "\n";
  s += "s=" + fmt_g17(cfg.graph.gradient_diff) + "\n";
  s += "t=" + fmt_g17(cfg.graph.angle_diff) + "\n";
  s += "gray_levels=" + std::to_string(cfg.graph.gray_levels) + "\n";
  s += "scales=";
  for (std::size_t i = 0; i < cfg.scales.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(cfg.scales[i].samples) + ":" + std::to_string(cfg.scales[i].radius);
  }
  s += "\n";
  s += std::string("normalize=") + (cfg.normalize ? "true" : "false") + "\n";
  s += "resize=" + std::to_string(cfg.resize_width) + "x" + std::to_string(cfg.resize_height) + "\n";
  s += "ec_tol=" + fmt_g17(cfg.ec_tol) + "\n";
  s += "ec_max_iter=" + std::to_string(cfg.ec_max_iter) + "\n";
  return s;
}

std::string config_digest(const DescriptorConfig& cfg) {
  // FNV-1a, 64 bit.
  const std::string canonical = config_to_string(cfg);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const unsigned char c : canonical) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void write_jsonl_record(std::ostream& os, const std::string& path, const std::string& label,
                        const std::string& digest, const FeatureVector& fv) {
  nlohmann::ordered_json record;
  record["path"] = path;
  if (!label.empty()) record["label"] = label;
  record["config_digest"] = digest;
  auto values = nlohmann::ordered_json::array();
  for (int i = 0; i < fv.values.size(); ++i) values.push_back(fv.values[i]);
  record["vector"] = std::move(values);
  os << record.dump() << "\n";
}

void write_csv_header(std::ostream& os, const std::string& digest, const FeatureVector& fv) {
  os << "# config_digest=" << digest << "\n";
  os << "path,label";
  for (const FeatureSegment& seg : fv.layout) {
    for (int bin = 0; bin < seg.bin_count; ++bin) {
      os << "," << family_name(seg.family) << "_" << seg.samples << "_" << seg.radius << "_"
         << seg.band << "_" << bin;
    }
  }
  os << "\n";
}

void write_csv_row(std::ostream& os, const std::string& path, const std::string& label,
                   const FeatureVector& fv) {
  os << path << "," << label;
  for (int i = 0; i < fv.values.size(); ++i) {
    os << "," << fmt_g17(fv.values[i]);
  }
  os << "\n";
}

} // namespace cnlbp
