#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace restorebench {

// H x W x C image with interleaved channels, row-major. Library operations
// produce values in [0,1]; intermediate buffers (e.g. inside deconvolution)
// may temporarily leave that range.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, double fill = 0.0);
  Image(int width, int height, int channels, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& at(int x, int y, int c = 0) {
    return data_[index(x, y, c)];
  }
  double at(int x, int y, int c = 0) const {
    return data_[index(x, y, c)];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  // Single-channel copy of channel `c`.
  Image channel(int c) const;
  void set_channel(int c, const Image& plane);

  // True iff every value is finite and inside [0,1].
  bool is_normalized() const noexcept;
  void clamp01() noexcept;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// Symmetric (half-sample) reflection: -1 -> 0, n -> n-1. Valid for any i.
inline int mirror_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

// Rec. 601 luma of an RGB pixel, or the value itself for grayscale.
Image luminance(const Image& image);

double mean_value(const Image& image);
double mean_squared_error(const Image& a, const Image& b);
// Peak signal-to-noise ratio for unit peak; +inf for identical images.
double psnr(const Image& reference, const Image& test);

}  // namespace restorebench
