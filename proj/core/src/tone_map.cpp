#include <algorithm>
#include <cmath>

#include "restorebench/enhance.hpp"
#include "restorebench/error.hpp"

namespace restorebench {

Image smooth_prior(const Image& image, int radius, double range_sigma) {
  if (radius < 1) throw ContractError("smoothing radius must be >= 1");
  if (!(range_sigma > 0.0)) throw ContractError("range sigma must be > 0");
  const int w = image.width(), h = image.height(), ch = image.channels();
  const double spatial_sigma = radius / 2.0;

  const int side = 2 * radius + 1;
  std::vector<double> spatial(static_cast<std::size_t>(side) * side);
  for (int v = -radius; v <= radius; ++v) {
    for (int u = -radius; u <= radius; ++u) {
      spatial[(v + radius) * side + (u + radius)] =
          std::exp(-(u * u + v * v) / (2.0 * spatial_sigma * spatial_sigma));
    }
  }
  const double range_scale = -1.0 / (2.0 * range_sigma * range_sigma);

  Image out(w, h, ch);
  std::vector<double> acc(ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::fill(acc.begin(), acc.end(), 0.0);
      double norm = 0.0;
      for (int v = -radius; v <= radius; ++v) {
        const int sy = mirror_index(y + v, h);
        for (int u = -radius; u <= radius; ++u) {
          const int sx = mirror_index(x + u, w);
          // Range distance on the joint colour vector so channels stay aligned.
          double d2 = 0.0;
          for (int c = 0; c < ch; ++c) {
            const double d = image.at(sx, sy, c) - image.at(x, y, c);
            d2 += d * d;
          }
          const double weight = spatial[(v + radius) * side + (u + radius)] *
                                std::exp(d2 * range_scale);
          for (int c = 0; c < ch; ++c) acc[c] += weight * image.at(sx, sy, c);
          norm += weight;
        }
      }
      for (int c = 0; c < ch; ++c) out.at(x, y, c) = std::clamp(acc[c] / norm, 0.0, 1.0);
    }
  }
  return out;
}

Image tone_map_enhance(const Image& input, const Image& prior, double gamma) {
  if (!input.same_shape(prior)) throw ContractError("tone mapping: input and prior differ in shape");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ContractError("tone mapping: gamma must be > 0");
  Image out(input.width(), input.height(), input.channels());
  auto in = input.data();
  auto pv = prior.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double base = std::max(pv[i], 0.0) + kToneMapEpsilon;
    const double detail = (std::max(in[i], 0.0) + kToneMapEpsilon) / base;
    dst[i] = std::clamp(base * std::pow(detail, gamma) - kToneMapEpsilon, 0.0, 1.0);
  }
  return out;
}

}  // namespace restorebench
