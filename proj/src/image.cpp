#include "cnlbp/image.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace cnlbp {

namespace {

struct FileHandle {
  std::FILE* fp = nullptr;
  explicit FileHandle(const std::string& path, const char* mode) : fp(std::fopen(path.c_str(), mode)) {}
  ~FileHandle() {
    if (fp) std::fclose(fp);
  }
  FileHandle(const FileHandle&) = delete;
  FileHandle& operator=(const FileHandle&) = delete;
};

RasterImage from_interleaved(const std::vector<std::uint8_t>& data, int width, int height,
                             int channels) {
  RasterImage img;
  img.bands.assign(channels, PlaneI(height, width));
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* row = data.data() + static_cast<std::size_t>(y) * width * channels;
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        img.bands[c](y, x) = row[x * channels + c];
      }
    }
  }
  return img;
}

RasterImage load_png(const std::string& path) {
  FileHandle file(path, "rb");
  if (!file.fp) throw std::runtime_error("cannot open file: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("libpng init failed");
  }

  // All C++ objects live above the setjmp point.
  std::vector<std::uint8_t> data;
  std::vector<png_bytep> rows;
  int width = 0, height = 0, channels = 0;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("PNG decode error: " + path);
  }

  png_init_io(png, file.fp);
  png_read_info(png, info);

  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if ((color_type & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(png);
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  channels = png_get_channels(png, info);
  if (width <= 0 || height <= 0) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("zero-sized image: " + path);
  }
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("unsupported PNG channel layout: " + path);
  }

  data.resize(static_cast<std::size_t>(width) * height * channels);
  rows.resize(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = data.data() + static_cast<std::size_t>(y) * width * channels;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  return from_interleaved(data, width, height, channels);
}

struct JpegErrorState {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* state = reinterpret_cast<JpegErrorState*>(cinfo->err);
  std::longjmp(state->jump, 1);
}

RasterImage load_jpeg(const std::string& path) {
  FileHandle file(path, "rb");
  if (!file.fp) throw std::runtime_error("cannot open file: " + path);

  jpeg_decompress_struct cinfo;
  JpegErrorState err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;

  std::vector<std::uint8_t> data;
  int width = 0, height = 0, channels = 0;

  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw std::runtime_error("JPEG decode error: " + path);
  }

  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file.fp);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = (cinfo.num_components == 1) ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);

  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  channels = cinfo.output_components;
  if (width <= 0 || height <= 0) {
    jpeg_destroy_decompress(&cinfo);
    throw std::runtime_error("zero-sized image: " + path);
  }
  if (channels != 1 && channels != 3) {
    jpeg_destroy_decompress(&cinfo);
    throw std::runtime_error("unsupported JPEG channel layout: " + path);
  }

  data.resize(static_cast<std::size_t>(width) * height * channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = data.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * channels;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);

  return from_interleaved(data, width, height, channels);
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

RasterImage load_bmp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (buf.size() < 54 || buf[0] != 'B' || buf[1] != 'M') {
    throw std::runtime_error("BMP decode error: " + path);
  }

  const std::uint32_t data_offset = read_u32(&buf[10]);
  const std::uint32_t header_size = read_u32(&buf[14]);
  if (header_size < 40) throw std::runtime_error("unsupported BMP header: " + path);

  const auto width = static_cast<std::int32_t>(read_u32(&buf[18]));
  auto height = static_cast<std::int32_t>(read_u32(&buf[22]));
  const bool top_down = height < 0;
  if (top_down) height = -height;
  const int bpp = read_u16(&buf[28]);
  const std::uint32_t compression = read_u32(&buf[30]);

  if (width <= 0 || height <= 0) throw std::runtime_error("zero-sized image: " + path);
  if (compression != 0) throw std::runtime_error("unsupported BMP compression: " + path);
  if (bpp != 8 && bpp != 24 && bpp != 32) {
    throw std::runtime_error("unsupported BMP bit depth: " + path);
  }

  std::uint32_t palette_entries = read_u32(&buf[46]);
  if (bpp == 8 && palette_entries == 0) palette_entries = 256;
  const std::size_t palette_offset = 14 + header_size;
  std::vector<std::uint8_t> palette_r, palette_g, palette_b;
  bool gray_palette = true;
  if (bpp == 8) {
    if (palette_offset + palette_entries * 4 > buf.size()) {
      throw std::runtime_error("BMP decode error: " + path);
    }
    palette_b.resize(palette_entries);
    palette_g.resize(palette_entries);
    palette_r.resize(palette_entries);
    for (std::uint32_t i = 0; i < palette_entries; ++i) {
      const std::uint8_t* e = &buf[palette_offset + i * 4];
      palette_b[i] = e[0];
      palette_g[i] = e[1];
      palette_r[i] = e[2];
      gray_palette = gray_palette && e[0] == e[1] && e[1] == e[2];
    }
  }

  const std::size_t stride = ((static_cast<std::size_t>(bpp) * width + 31) / 32) * 4;
  if (data_offset + stride * height > buf.size()) {
    throw std::runtime_error("BMP decode error: truncated pixel data: " + path);
  }

  const int bands = (bpp == 8 && gray_palette) ? 1 : 3;
  RasterImage img;
  img.bands.assign(bands, PlaneI(height, width));
  for (int y = 0; y < height; ++y) {
    const int src_y = top_down ? y : height - 1 - y;
    const std::uint8_t* row = &buf[data_offset + stride * static_cast<std::size_t>(src_y)];
    for (int x = 0; x < width; ++x) {
      if (bpp == 8) {
        const std::uint8_t idx = row[x];
        if (idx >= palette_entries) throw std::runtime_error("BMP decode error: " + path);
        if (bands == 1) {
          img.bands[0](y, x) = palette_r[idx];
        } else {
          img.bands[0](y, x) = palette_r[idx];
          img.bands[1](y, x) = palette_g[idx];
          img.bands[2](y, x) = palette_b[idx];
        }
      } else {
        const std::uint8_t* px = row + static_cast<std::size_t>(x) * (bpp / 8);
        img.bands[0](y, x) = px[2];  // stored BGR(A)
        img.bands[1](y, x) = px[1];
        img.bands[2](y, x) = px[0];
      }
    }
  }
  return img;
}

} // namespace

RasterImage load_image(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw std::runtime_error("cannot open file: " + path);
  std::uint8_t magic[4] = {0, 0, 0, 0};
  probe.read(reinterpret_cast<char*>(magic), sizeof(magic));
  if (probe.gcount() < 3) throw std::runtime_error("unsupported or truncated file: " + path);
  probe.close();

  if (magic[0] == 0x89 && magic[1] == 'P' && magic[2] == 'N' && magic[3] == 'G') {
    return load_png(path);
  }
  if (magic[0] == 0xFF && magic[1] == 0xD8 && magic[2] == 0xFF) {
    return load_jpeg(path);
  }
  if (magic[0] == 'B' && magic[1] == 'M') {
    return load_bmp(path);
  }
  throw std::runtime_error("unsupported image format: " + path);
}

RasterImage resize_bilinear(const RasterImage& img, int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("resize dimensions must be >= 1");
  if (img.bands.empty()) throw std::invalid_argument("resize of empty image");

  const int src_w = img.width();
  const int src_h = img.height();
  const double sx = static_cast<double>(src_w) / width;
  const double sy = static_cast<double>(src_h) / height;

  RasterImage out;
  out.gray_levels = img.gray_levels;
  out.bands.reserve(img.bands.size());
  for (const PlaneI& band : img.bands) {
    PlaneI dst(height, width);
    for (int y = 0; y < height; ++y) {
      const double src_y = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(src_h - 1));
      for (int x = 0; x < width; ++x) {
        const double src_x = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(src_w - 1));
        const long v = std::lround(bilinear_sample(band, src_x, src_y));
        dst(y, x) = static_cast<int>(std::clamp<long>(v, 0, img.gray_levels));
      }
    }
    out.bands.push_back(std::move(dst));
  }
  return out;
}

void save_bmp(const RasterImage& img, const std::string& path) {
  const int bands = img.band_count();
  if (bands != 1 && bands != 3) throw std::invalid_argument("save_bmp expects 1 or 3 bands");
  const int w = img.width();
  const int h = img.height();
  const int bpp = (bands == 1) ? 8 : 24;
  const std::size_t stride = ((static_cast<std::size_t>(bpp) * w + 31) / 32) * 4;
  const std::size_t palette_size = (bands == 1) ? 256 * 4 : 0;
  const std::size_t data_offset = 14 + 40 + palette_size;
  const std::size_t file_size = data_offset + stride * h;

  std::vector<std::uint8_t> buf(file_size, 0);
  auto put_u32 = [&buf](std::size_t at, std::uint32_t v) {
    buf[at] = v & 0xFF;
    buf[at + 1] = (v >> 8) & 0xFF;
    buf[at + 2] = (v >> 16) & 0xFF;
    buf[at + 3] = (v >> 24) & 0xFF;
  };
  auto put_u16 = [&buf](std::size_t at, std::uint16_t v) {
    buf[at] = v & 0xFF;
    buf[at + 1] = (v >> 8) & 0xFF;
  };

  buf[0] = 'B';
  buf[1] = 'M';
  put_u32(2, static_cast<std::uint32_t>(file_size));
  put_u32(10, static_cast<std::uint32_t>(data_offset));
  put_u32(14, 40);
  put_u32(18, static_cast<std::uint32_t>(w));
  put_u32(22, static_cast<std::uint32_t>(h));
  put_u16(26, 1);
  put_u16(28, static_cast<std::uint16_t>(bpp));
  put_u32(30, 0);
  put_u32(34, static_cast<std::uint32_t>(stride * h));
  put_u32(38, 2835);
  put_u32(42, 2835);
  put_u32(46, (bands == 1) ? 256 : 0);

  if (bands == 1) {
    for (int i = 0; i < 256; ++i) {
      const std::size_t at = 54 + static_cast<std::size_t>(i) * 4;
      buf[at] = buf[at + 1] = buf[at + 2] = static_cast<std::uint8_t>(i);
    }
  }

  auto clamp255 = [&img](int v) {
    return static_cast<std::uint8_t>(std::clamp(v * 255 / std::max(img.gray_levels, 1), 0, 255));
  };
  for (int y = 0; y < h; ++y) {
    std::uint8_t* row = &buf[data_offset + stride * static_cast<std::size_t>(h - 1 - y)];
    for (int x = 0; x < w; ++x) {
      if (bands == 1) {
        row[x] = clamp255(img.bands[0](y, x));
      } else {
        row[x * 3 + 0] = clamp255(img.bands[2](y, x));
        row[x * 3 + 1] = clamp255(img.bands[1](y, x));
        row[x * 3 + 2] = clamp255(img.bands[0](y, x));
      }
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace cnlbp
