#pragma once

// PNG and JPEG decoding into 8- or 16-bit RGB. Link against libpng and libjpeg.

#include <png.h>

#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

// jpeglib.h needs FILE and size_t declared first.
#include <jpeglib.h>

#include "pcolor/error.hpp"

namespace pcolor {

/// Interleaved RGB samples, row-major. `max_value` is 255 or 65535.
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint32_t max_value = 255;
  std::vector<std::uint16_t> samples;

  std::size_t pixel_count() const { return width * height; }

  static RgbImage filled(std::size_t w, std::size_t h, std::uint16_t r, std::uint16_t g,
                         std::uint16_t b, std::uint32_t max_value = 255) {
    RgbImage img{w, h, max_value, {}};
    img.samples.reserve(w * h * 3);
    for (std::size_t i = 0; i < w * h; ++i) img.samples.insert(img.samples.end(), {r, g, b});
    return img;
  }

  std::uint16_t& at(std::size_t row, std::size_t col, int channel) {
    return samples[(row * width + col) * 3 + static_cast<std::size_t>(channel)];
  }
  std::uint16_t at(std::size_t row, std::size_t col, int channel) const {
    return samples[(row * width + col) * 3 + static_cast<std::size_t>(channel)];
  }
};

namespace detail {

struct PngReadState {
  std::span<const unsigned char> data;
  std::size_t offset = 0;
};

inline void png_read_from_memory(png_structp png, png_bytep out, png_size_t len) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->offset + len > st->data.size()) png_error(png, "truncated PNG stream");
  std::memcpy(out, st->data.data() + st->offset, len);
  st->offset += len;
}

inline void png_error_to_buffer(png_structp png, png_const_charp msg) {
  auto* err = static_cast<char*>(png_get_error_ptr(png));
  std::snprintf(err, 256, "%s", msg);
  png_longjmp(png, 1);
}

inline void png_silence_warning(png_structp, png_const_charp) {}

// All automatic objects live above the setjmp point, so a longjmp out of
// libpng never skips a destructor.
inline bool decode_png_into(std::span<const unsigned char> data, RgbImage& out, char* err) {
  PngReadState state{data, 0};
  std::vector<png_bytep> rows;
  std::vector<unsigned char> buffer;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, err, png_error_to_buffer,
                                           png_silence_warning);
  if (png == nullptr) {
    std::snprintf(err, 256, "out of memory");
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &state, png_read_from_memory);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  out.max_value = depth == 16 ? 65535u : 255u;

  buffer.resize(rowbytes * out.height);
  rows.resize(out.height);
  for (std::size_t y = 0; y < out.height; ++y) rows[y] = buffer.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  out.samples.resize(out.width * out.height * 3);
  for (std::size_t y = 0; y < out.height; ++y) {
    const unsigned char* row = rows[y];
    for (std::size_t i = 0; i < out.width * 3; ++i) {
      out.samples[y * out.width * 3 + i] =
          depth == 16 ? static_cast<std::uint16_t>((row[2 * i] << 8) | row[2 * i + 1]) : row[i];
    }
  }
  return true;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* mgr = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, mgr->message);
  std::longjmp(mgr->jump, 1);
}

inline void jpeg_silence(j_common_ptr, int) {}

inline bool decode_jpeg_into(std::span<const unsigned char> data, RgbImage& out, char* err) {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager jerr{};
  std::vector<unsigned char> row;
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = jpeg_error_exit;
  jerr.base.emit_message = jpeg_silence;
  if (setjmp(jerr.jump)) {
    std::snprintf(err, 256, "%s", jerr.message);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data.data(), static_cast<unsigned long>(data.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  if (cinfo.output_components != 3) {
    std::snprintf(err, 256, "unsupported JPEG color layout (%d components)", cinfo.output_components);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  out.width = cinfo.output_width;
  out.height = cinfo.output_height;
  out.max_value = 255;
  out.samples.resize(out.width * out.height * 3);
  row.resize(out.width * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    const std::size_t y = cinfo.output_scanline;
    JSAMPROW ptr = row.data();
    jpeg_read_scanlines(&cinfo, &ptr, 1);
    std::copy(row.begin(), row.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(y * out.width * 3));
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

/// Decodes a PNG or JPEG held in memory; the format is sniffed from its
/// signature. Alpha is dropped and grayscale expanded to RGB.
inline RgbImage decode_image(std::span<const unsigned char> data) {
  static constexpr unsigned char kPng[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  char err[256] = "unknown error";
  RgbImage img;
  bool ok = false;
  if (data.size() >= 8 && std::memcmp(data.data(), kPng, 8) == 0) {
    ok = detail::decode_png_into(data, img, err);
  } else if (data.size() >= 3 && data[0] == 0xFF && data[1] == 0xD8 && data[2] == 0xFF) {
    ok = detail::decode_jpeg_into(data, img, err);
  } else {
    throw DecodeError("not a PNG or JPEG image");
  }
  if (!ok) throw DecodeError(err);
  if (img.pixel_count() == 0) throw DecodeError("image has no pixels");
  return img;
}

inline RgbImage load_image(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  try {
    return decode_image(bytes);
  } catch (const DecodeError& e) {
    throw DecodeError(path + ": " + e.what());
  }
}

namespace detail {

inline bool encode_png(const std::string& path, const RgbImage& img, char* err) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) {
    std::snprintf(err, 256, "cannot open for writing");
    return false;
  }
  const bool wide = img.max_value > 255;
  const std::size_t rowbytes = img.width * 3 * (wide ? 2 : 1);
  std::vector<unsigned char> buffer(rowbytes * img.height);
  std::vector<png_bytep> rows(img.height);
  for (std::size_t y = 0; y < img.height; ++y) {
    rows[y] = buffer.data() + y * rowbytes;
    for (std::size_t i = 0; i < img.width * 3; ++i) {
      const std::uint16_t v = img.samples[y * img.width * 3 + i];
      if (wide) {
        rows[y][2 * i] = static_cast<unsigned char>(v >> 8);
        rows[y][2 * i + 1] = static_cast<unsigned char>(v & 0xFF);
      } else {
        rows[y][i] = static_cast<unsigned char>(v);
      }
    }
  }
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, err, png_error_to_buffer, png_silence_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height),
               wide ? 16 : 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return std::fclose(fp) == 0;
}

inline bool encode_jpeg(const std::string& path, const RgbImage& img, int quality, char* err) {
  jpeg_compress_struct cinfo{};
  JpegErrorManager jerr{};
  std::vector<unsigned char> row(img.width * 3);
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) {
    std::snprintf(err, 256, "cannot open for writing");
    return false;
  }
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = jpeg_error_exit;
  if (setjmp(jerr.jump)) {
    std::snprintf(err, 256, "%s", jerr.message);
    jpeg_destroy_compress(&cinfo);
    std::fclose(fp);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, fp);
  cinfo.image_width = static_cast<JDIMENSION>(img.width);
  cinfo.image_height = static_cast<JDIMENSION>(img.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    const std::size_t y = cinfo.next_scanline;
    for (std::size_t i = 0; i < img.width * 3; ++i) {
      row[i] = static_cast<unsigned char>(img.samples[y * img.width * 3 + i]);
    }
    JSAMPROW ptr = row.data();
    jpeg_write_scanlines(&cinfo, &ptr, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return std::fclose(fp) == 0;
}

}  // namespace detail

/// Writes an 8-bit (max_value 255) or 16-bit RGB PNG.
inline void write_png(const std::string& path, const RgbImage& img) {
  char err[256] = "unknown error";
  if (!detail::encode_png(path, img, err)) throw DecodeError(path + ": " + err);
}

/// Writes a baseline 8-bit RGB JPEG.
inline void write_jpeg(const std::string& path, const RgbImage& img, int quality = 95) {
  if (img.max_value != 255) throw DomainError("JPEG output supports 8-bit images only");
  char err[256] = "unknown error";
  if (!detail::encode_jpeg(path, img, quality, err)) throw DecodeError(path + ": " + err);
}

}  // namespace pcolor
