#pragma once

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgpaint/image.hpp"

namespace sgpaint {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// 8-bit interleaved pixels as stored in a PNG.
struct RawImage {
  int height = 0;
  int width = 0;
  int channels = 0;  // 1 (gray) or 3 (RGB)
  std::vector<std::uint8_t> bytes;
};

inline std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::lround(255.0 * clamp01(v)));
}

namespace detail {

struct PngReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadGuard() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct PngWriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteGuard() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

struct FileCloser {
  void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline void append_bytes(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

inline void no_flush(png_structp) {}

// Encodes with fixed settings so identical pixels give identical files.
inline void encode_png(const RawImage& img, png_structp png, png_infop info) {
  if (setjmp(png_jmpbuf(png))) throw IoError("PNG encoding failed");
  png_set_IHDR(png, info, img.width, img.height, 8,
               img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  for (int r = 0; r < img.height; ++r) {
    auto* row = const_cast<png_bytep>(img.bytes.data() + static_cast<std::size_t>(r) * img.width * img.channels);
    png_write_row(png, row);
  }
  png_write_end(png, nullptr);
}

}  // namespace detail

/// Reads any PNG and converts it to 8-bit gray (want_channels = 1) or RGB (3).
inline RawImage read_png(const std::string& path, int want_channels) {
  detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path);
  std::uint8_t sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw IoError(path + " is not a PNG file");
  }
  detail::PngReadGuard g;
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!g.png) throw IoError("png_create_read_struct failed");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw IoError("png_create_info_struct failed");

  RawImage img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(g.png))) throw IoError("corrupt PNG: " + path);
  png_init_io(g.png, fp.get());
  png_set_sig_bytes(g.png, 8);
  png_read_info(g.png, g.info);

  const int color = png_get_color_type(g.png, g.info);
  const int depth = png_get_bit_depth(g.png, g.info);
  if (depth == 16) png_set_strip_16(g.png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(g.png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(g.png);
  if (png_get_valid(g.png, g.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(g.png);
  if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(g.png, g.info, PNG_INFO_tRNS)) png_set_strip_alpha(g.png);
  const bool is_gray = color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA;
  if (want_channels == 3 && is_gray) png_set_gray_to_rgb(g.png);
  if (want_channels == 1 && !is_gray) png_set_rgb_to_gray_fixed(g.png, 1, -1, -1);
  png_read_update_info(g.png, g.info);

  img.width = static_cast<int>(png_get_image_width(g.png, g.info));
  img.height = static_cast<int>(png_get_image_height(g.png, g.info));
  img.channels = png_get_channels(g.png, g.info);
  if (img.channels != want_channels) throw IoError("unsupported PNG layout: " + path);
  img.bytes.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
  rows.resize(img.height);
  for (int r = 0; r < img.height; ++r) {
    rows[r] = img.bytes.data() + static_cast<std::size_t>(r) * img.width * img.channels;
  }
  png_read_image(g.png, rows.data());
  png_read_end(g.png, nullptr);
  return img;
}

inline std::vector<std::uint8_t> encode_png(const RawImage& img) {
  detail::PngWriteGuard g;
  g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!g.png) throw IoError("png_create_write_struct failed");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw IoError("png_create_info_struct failed");
  std::vector<std::uint8_t> out;
  png_set_write_fn(g.png, &out, detail::append_bytes, detail::no_flush);
  detail::encode_png(img, g.png, g.info);
  return out;
}

inline void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path);
  if (std::fwrite(bytes.data(), 1, bytes.size(), fp.get()) != bytes.size()) {
    throw IoError("short write to " + path);
  }
}

template <int C>
RawImage to_raw(const Image<C>& img) {
  RawImage raw{img.height(), img.width(), C, {}};
  raw.bytes.reserve(img.values().size());
  for (double v : img.values()) raw.bytes.push_back(quantize(v));
  return raw;
}

template <int C>
Image<C> from_raw(const RawImage& raw) {
  if (raw.channels != C) throw IoError("channel count mismatch");
  Image<C> img(CanvasDims(raw.height, raw.width));
  auto dst = img.values();
  for (std::size_t i = 0; i < raw.bytes.size(); ++i) dst[i] = raw.bytes[i] / 255.0;
  return img;
}

inline Canvas load_rgb(const std::string& path) { return from_raw<3>(read_png(path, 3)); }
inline ScalarMap load_gray(const std::string& path) { return from_raw<1>(read_png(path, 1)); }

template <int C>
void save_png(const Image<C>& img, const std::string& path) {
  write_file(path, encode_png(to_raw(img)));
}

inline std::string base64_encode(const std::vector<std::uint8_t>& data) {
  static constexpr char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < data.size(); i += 3) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += table[(v >> 18) & 63];
    out += table[(v >> 12) & 63];
    out += table[(v >> 6) & 63];
    out += table[v & 63];
  }
  if (i + 1 == data.size()) {
    const std::uint32_t v = data[i] << 16;
    out += table[(v >> 18) & 63];
    out += table[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == data.size()) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
    out += table[(v >> 18) & 63];
    out += table[(v >> 12) & 63];
    out += table[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

}  // namespace sgpaint
