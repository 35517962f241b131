#pragma once

#include <cstdint>
#include <string>

#include "restorebench/image.hpp"

namespace restorebench {

// 64-bit FNV-1a over width, height, channels (uint32, little-endian) followed
// by the IEEE-754 bit pattern of every sample (uint64, little-endian).
std::uint64_t image_hash(const Image& image);

std::string to_hex(std::uint64_t value);

}  // namespace restorebench
