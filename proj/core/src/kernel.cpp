#include "restorebench/kernel.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "restorebench/error.hpp"

namespace restorebench {

namespace {

void check_layout(int side, const std::vector<double>& weights) {
  if (side < 1 || side % 2 == 0) {
    throw ContractError("kernel side must be odd and positive, got " + std::to_string(side));
  }
  if (weights.size() != static_cast<std::size_t>(side) * side) {
    throw ContractError("kernel weight count does not match side^2");
  }
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ContractError("kernel weights must be finite and >= 0");
  }
}

}  // namespace

Kernel::Kernel(int side, std::vector<double> weights) {
  check_layout(side, weights);
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ContractError("kernel weights must sum to 1, got " + std::to_string(sum));
  }
  side_ = side;
  weights_ = std::move(weights);
}

Kernel Kernel::uniform(int side) {
  if (side < 1 || side % 2 == 0) throw ContractError("kernel side must be odd");
  const std::size_t n = static_cast<std::size_t>(side) * side;
  return from_unnormalized(side, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Kernel Kernel::from_unnormalized(int side, std::vector<double> weights) {
  check_layout(side, weights);
  Kernel k;
  k.side_ = side;
  k.weights_ = std::move(weights);
  return k;
}

Image convolve_unclamped(const Image& image, const Kernel& kernel) {
  const int w = image.width(), h = image.height(), ch = image.channels();
  const int r = kernel.radius();
  Image out(w, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int v = -r; v <= r; ++v) {
          const int sy = mirror_index(y - v, h);
          for (int u = -r; u <= r; ++u) {
            const double k = kernel.at(u, v);
            if (k != 0.0) acc += k * image.at(mirror_index(x - u, w), sy, c);
          }
        }
        out.at(x, y, c) = acc;
      }
    }
  }
  return out;
}

Image convolve(const Image& image, const Kernel& kernel) {
  Image out = convolve_unclamped(image, kernel);
  out.clamp01();
  return out;
}

Image convolve_adjoint(const Image& image, const Kernel& kernel) {
  const int w = image.width(), h = image.height(), ch = image.channels();
  const int r = kernel.radius();
  Image out(w, h, ch, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int v = -r; v <= r; ++v) {
        const int sy = mirror_index(y - v, h);
        for (int u = -r; u <= r; ++u) {
          const double k = kernel.at(u, v);
          if (k == 0.0) continue;
          const int sx = mirror_index(x - u, w);
          for (int c = 0; c < ch; ++c) out.at(sx, sy, c) += k * image.at(x, y, c);
        }
      }
    }
  }
  return out;
}

}  // namespace restorebench
