#include "restorebench/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "restorebench/error.hpp"

namespace restorebench {

namespace {

void check_shape(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw ContractError("image dimensions must be positive, got " +
                        std::to_string(width) + "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw ContractError("images carry 1 or 3 channels, got " +
                        std::to_string(channels));
  }
}

}  // namespace

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels);
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels),
      data_(std::move(data)) {
  check_shape(width, height, channels);
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw ContractError("image buffer size does not match its dimensions");
  }
}

Image Image::channel(int c) const {
  Image plane(width_, height_, 1);
  for (std::size_t i = 0, n = plane.size(); i < n; ++i) {
    plane.data_[i] = data_[i * channels_ + c];
  }
  return plane;
}

void Image::set_channel(int c, const Image& plane) {
  if (plane.width_ != width_ || plane.height_ != height_ || plane.channels_ != 1) {
    throw ContractError("channel plane shape mismatch");
  }
  for (std::size_t i = 0, n = plane.size(); i < n; ++i) {
    data_[i * channels_ + c] = plane.data_[i];
  }
}

bool Image::is_normalized() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) {
    return std::isfinite(v) && v >= 0.0 && v <= 1.0;
  });
}

void Image::clamp01() noexcept {
  for (double& v : data_) v = std::clamp(v, 0.0, 1.0);
}

Image luminance(const Image& image) {
  if (image.channels() == 1) return image;
  Image y(image.width(), image.height(), 1);
  auto src = image.data();
  auto dst = y.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
  }
  return y;
}

double mean_value(const Image& image) {
  double sum = 0.0;
  for (double v : image.data()) sum += v;
  return sum / static_cast<double>(image.size());
}

double mean_squared_error(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ContractError("MSE of differently shaped images");
  double sum = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = da[i] - db[i];
    sum += d * d;
  }
  return sum / static_cast<double>(da.size());
}

double psnr(const Image& reference, const Image& test) {
  const double mse = mean_squared_error(reference, test);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

}  // namespace restorebench
