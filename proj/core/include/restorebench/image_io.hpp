#pragma once

#include <filesystem>

#include "restorebench/image.hpp"

namespace restorebench {

enum class BitDepth { k8 = 8, k16 = 16 };

struct ImageInfo {
  int width = 0;
  int height = 0;
  int channels = 0;
  BitDepth depth = BitDepth::k8;
};

// PNG raster I/O. Grayscale and RGB at 8 or 16 bits are read losslessly;
// palette images are expanded to RGB and alpha is dropped. Samples are scaled
// to [0,1] by the maximum code value of the file's bit depth.
Image read_image(const std::filesystem::path& path);
ImageInfo read_image_info(const std::filesystem::path& path);

// Values are clamped to [0,1] and rounded to the nearest code value. The file
// is written to a sibling temporary and renamed into place.
void write_image(const Image& image, const std::filesystem::path& path,
                 BitDepth depth = BitDepth::k8);

}  // namespace restorebench
