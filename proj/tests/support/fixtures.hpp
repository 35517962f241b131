#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "restorebench/image.hpp"

namespace restorebench::testing {

// Seeded stand-in for a photograph: a 1/f amplitude spectrum with random
// phase and a Gaussian optics roll-off, overlaid with a few soft-edged discs and bars, rescaled to
// [0.1, 0.9]. Colour fixtures tint each channel differently.
Image natural_image(std::uint64_t seed, int width, int height, int channels = 1);

// Seeds used by the fixed five-image fixture set.
inline constexpr std::uint64_t kNaturalSeeds[5] = {11, 23, 37, 41, 59};

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "rb");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

}  // namespace restorebench::testing
