#include "restorebench/hash.hpp"

#include <bit>
#include <cstdio>

namespace restorebench {

namespace {

constexpr std::uint64_t kOffset = 14695981039346656037ull;
constexpr std::uint64_t kPrime = 1099511628211ull;

void mix(std::uint64_t& h, std::uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) {
    h ^= (value >> (8 * i)) & 0xffu;
    h *= kPrime;
  }
}

}  // namespace

std::uint64_t image_hash(const Image& image) {
  std::uint64_t h = kOffset;
  mix(h, static_cast<std::uint32_t>(image.width()), 4);
  mix(h, static_cast<std::uint32_t>(image.height()), 4);
  mix(h, static_cast<std::uint32_t>(image.channels()), 4);
  for (double v : image.data()) mix(h, std::bit_cast<std::uint64_t>(v), 8);
  return h;
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace restorebench
