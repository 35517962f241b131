#include "restorebench/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "restorebench/error.hpp"

namespace restorebench {

namespace {

struct MemoryReader {
  const unsigned char* data;
  std::size_t size;
  std::size_t offset;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (reader->offset + length > reader->size) {
    png_error(png, "truncated file");
  }
  std::memcpy(out, reader->data + reader->offset, length);
  reader->offset += length;
}

// libpng reports fatal errors through longjmp; every function that calls into
// it below keeps only trivially destructible locals after setjmp.
struct PngReadHandles {
  png_structp png = nullptr;
  png_infop info = nullptr;
  char message[256] = "decode failure";
  ~PngReadHandles() { png_destroy_read_struct(&png, &info, nullptr); }
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* handles = static_cast<PngReadHandles*>(png_get_error_ptr(png));
  std::snprintf(handles->message, sizeof(handles->message), "%s", msg);
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// Returns false on decode failure, leaving the reason in handles.message.
bool decode_header(PngReadHandles& h, MemoryReader& reader, ImageInfo& info) {
  if (setjmp(png_jmpbuf(h.png))) return false;
  png_set_read_fn(h.png, &reader, read_from_memory);
  png_read_info(h.png, h.info);

  const png_byte color = png_get_color_type(h.png, h.info);
  const png_byte depth = png_get_bit_depth(h.png, h.info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(h.png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(h.png);
  if (png_get_valid(h.png, h.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(h.png);
  if (depth == 16) png_set_swap(h.png);  // host little-endian samples
  png_set_strip_alpha(h.png);
  png_read_update_info(h.png, h.info);

  info.width = static_cast<int>(png_get_image_width(h.png, h.info));
  info.height = static_cast<int>(png_get_image_height(h.png, h.info));
  info.channels = png_get_channels(h.png, h.info);
  info.depth = png_get_bit_depth(h.png, h.info) == 16 ? BitDepth::k16 : BitDepth::k8;
  return true;
}

bool decode_rows(PngReadHandles& h, png_bytepp rows) {
  if (setjmp(png_jmpbuf(h.png))) return false;
  png_read_image(h.png, rows);
  png_read_end(h.png, nullptr);
  return true;
}

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Decoded {
  ImageInfo info;
  std::vector<unsigned char> pixels;
};

Decoded decode(const std::filesystem::path& path, bool header_only) {
  const std::vector<unsigned char> bytes = slurp(path);
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw IoError("unsupported image format (expected PNG): " + path.string());
  }
  PngReadHandles h;
  h.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &h, on_png_error, on_png_warning);
  if (h.png == nullptr) throw IoError("libpng initialisation failed");
  h.info = png_create_info_struct(h.png);
  if (h.info == nullptr) throw IoError("libpng initialisation failed");

  MemoryReader reader{bytes.data(), bytes.size(), 0};
  Decoded out;
  if (!decode_header(h, reader, out.info)) {
    throw IoError(path.string() + ": " + h.message);
  }
  if (out.info.channels != 1 && out.info.channels != 3) {
    throw IoError(path.string() + ": unsupported channel layout");
  }
  if (header_only) return out;

  const std::size_t bytes_per_sample = out.info.depth == BitDepth::k16 ? 2 : 1;
  const std::size_t stride =
      static_cast<std::size_t>(out.info.width) * out.info.channels * bytes_per_sample;
  out.pixels.resize(stride * out.info.height);
  std::vector<png_bytep> rows(out.info.height);
  for (int y = 0; y < out.info.height; ++y) rows[y] = out.pixels.data() + y * stride;
  if (!decode_rows(h, rows.data())) {
    throw IoError(path.string() + ": " + h.message);
  }
  return out;
}

struct PngWriteHandles {
  png_structp png = nullptr;
  png_infop info = nullptr;
  char message[256] = "encode failure";
  ~PngWriteHandles() { png_destroy_write_struct(&png, &info); }
};

void on_png_write_error(png_structp png, png_const_charp msg) {
  auto* handles = static_cast<PngWriteHandles*>(png_get_error_ptr(png));
  std::snprintf(handles->message, sizeof(handles->message), "%s", msg);
  png_longjmp(png, 1);
}

bool encode(PngWriteHandles& h, std::FILE* file, const ImageInfo& info, png_bytepp rows) {
  if (setjmp(png_jmpbuf(h.png))) return false;
  png_init_io(h.png, file);
  png_set_IHDR(h.png, h.info, info.width, info.height,
               info.depth == BitDepth::k16 ? 16 : 8,
               info.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(h.png, h.info);
  if (info.depth == BitDepth::k16) png_set_swap(h.png);
  png_write_image(h.png, rows);
  png_write_end(h.png, nullptr);
  return true;
}

}  // namespace

ImageInfo read_image_info(const std::filesystem::path& path) {
  return decode(path, true).info;
}

Image read_image(const std::filesystem::path& path) {
  Decoded d = decode(path, false);
  Image image(d.info.width, d.info.height, d.info.channels);
  auto dst = image.data();
  if (d.info.depth == BitDepth::k16) {
    for (std::size_t i = 0; i < dst.size(); ++i) {
      std::uint16_t v;
      std::memcpy(&v, d.pixels.data() + 2 * i, 2);
      dst[i] = v / 65535.0;
    }
  } else {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = d.pixels[i] / 255.0;
  }
  return image;
}

void write_image(const Image& image, const std::filesystem::path& path, BitDepth depth) {
  if (image.empty()) throw ContractError("cannot write an empty image");
  const ImageInfo info{image.width(), image.height(), image.channels(), depth};
  const std::size_t bytes_per_sample = depth == BitDepth::k16 ? 2 : 1;
  const double max_code = depth == BitDepth::k16 ? 65535.0 : 255.0;
  const std::size_t stride =
      static_cast<std::size_t>(info.width) * info.channels * bytes_per_sample;

  std::vector<unsigned char> pixels(stride * info.height);
  auto src = image.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double v = std::isfinite(src[i]) ? std::clamp(src[i], 0.0, 1.0) : 0.0;
    const auto code = static_cast<std::uint16_t>(std::lround(v * max_code));
    if (depth == BitDepth::k16) {
      std::memcpy(pixels.data() + 2 * i, &code, 2);
    } else {
      pixels[i] = static_cast<unsigned char>(code);
    }
  }
  std::vector<png_bytep> rows(info.height);
  for (int y = 0; y < info.height; ++y) rows[y] = pixels.data() + y * stride;

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  std::FILE* file = std::fopen(tmp.c_str(), "wb");
  if (file == nullptr) throw IoError("cannot create " + tmp.string());

  bool ok = false;
  std::string message;
  {
    PngWriteHandles h;
    h.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &h, on_png_write_error, on_png_warning);
    h.info = h.png ? png_create_info_struct(h.png) : nullptr;
    if (h.png != nullptr && h.info != nullptr) {
      ok = encode(h, file, info, rows.data());
    }
    message = h.message;
  }
  ok = (std::fclose(file) == 0) && ok;
  if (!ok) {
    std::filesystem::remove(tmp);
    throw IoError("writing " + path.string() + ": " + message);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace restorebench
