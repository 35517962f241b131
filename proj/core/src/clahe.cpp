#include <algorithm>
#include <array>
#include <cmath>

#include "restorebench/enhance.hpp"
#include "restorebench/error.hpp"

namespace restorebench {

namespace {

constexpr int kBins = 256;

using Mapping = std::array<double, kBins>;

int bin_of(double v) {
  return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * (kBins - 1)));
}

// Clipped-histogram equalisation mapping for one tile. Each bin maps to the
// midpoint of its cumulative range so a flat histogram maps (nearly) to itself.
Mapping tile_mapping(const Image& luma, int x0, int x1, int y0, int y1, double clip_limit) {
  std::array<double, kBins> hist{};
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) hist[bin_of(luma.at(x, y))] += 1.0;
  }
  const double count = static_cast<double>(x1 - x0) * (y1 - y0);

  if (clip_limit > 0.0) {
    const double limit = std::max(1.0, clip_limit * count / kBins);
    // Redistributing the excess can push bins back over the limit; a few
    // passes converge because each pass strictly shrinks the excess.
    for (int pass = 0; pass < 16; ++pass) {
      double excess = 0.0;
      for (double& b : hist) {
        if (b > limit) {
          excess += b - limit;
          b = limit;
        }
      }
      if (excess <= 1e-12 * count) break;
      const double share = excess / kBins;
      for (double& b : hist) b += share;
    }
  }

  Mapping map{};
  double below = 0.0;
  for (int i = 0; i < kBins; ++i) {
    map[i] = (below + 0.5 * hist[i]) / count;
    below += hist[i];
  }
  return map;
}

}  // namespace

Image clahe(const Image& image, int grid, double clip_limit) {
  if (grid < 1) throw ContractError("CLAHE grid must be >= 1");
  if (clip_limit < 0.0) throw ContractError("CLAHE clip limit must be >= 0");
  const Image luma = luminance(image);
  const int w = luma.width(), h = luma.height();
  const int gx = std::min(grid, w), gy = std::min(grid, h);

  auto edge = [](int i, int tiles, int n) { return static_cast<int>(static_cast<long>(i) * n / tiles); };
  std::vector<Mapping> maps(static_cast<std::size_t>(gx) * gy);
  std::vector<double> centre_x(gx), centre_y(gy);
  for (int ty = 0; ty < gy; ++ty) {
    centre_y[ty] = 0.5 * (edge(ty, gy, h) + edge(ty + 1, gy, h)) - 0.5;
    for (int tx = 0; tx < gx; ++tx) {
      maps[ty * gx + tx] = tile_mapping(luma, edge(tx, gx, w), edge(tx + 1, gx, w),
                                        edge(ty, gy, h), edge(ty + 1, gy, h), clip_limit);
    }
  }
  for (int tx = 0; tx < gx; ++tx) centre_x[tx] = 0.5 * (edge(tx, gx, w) + edge(tx + 1, gx, w)) - 0.5;

  // Neighbouring tile pair and blend weight along one axis.
  auto locate = [](const std::vector<double>& centres, double p, int& a, int& b, double& t) {
    const int n = static_cast<int>(centres.size());
    if (p <= centres.front()) {
      a = b = 0;
      t = 0.0;
      return;
    }
    if (p >= centres.back()) {
      a = b = n - 1;
      t = 0.0;
      return;
    }
    a = static_cast<int>(std::upper_bound(centres.begin(), centres.end(), p) - centres.begin()) - 1;
    b = a + 1;
    t = (p - centres[a]) / (centres[b] - centres[a]);
  };

  Image equalized(w, h, 1);
  for (int y = 0; y < h; ++y) {
    int ya, yb;
    double ty;
    locate(centre_y, y, ya, yb, ty);
    for (int x = 0; x < w; ++x) {
      int xa, xb;
      double tx;
      locate(centre_x, x, xa, xb, tx);
      const int bin = bin_of(luma.at(x, y));
      const double top = (1 - tx) * maps[ya * gx + xa][bin] + tx * maps[ya * gx + xb][bin];
      const double bottom = (1 - tx) * maps[yb * gx + xa][bin] + tx * maps[yb * gx + xb][bin];
      equalized.at(x, y) = (1 - ty) * top + ty * bottom;
    }
  }

  if (image.channels() == 1) {
    equalized.clamp01();
    return equalized;
  }
  Image out(w, h, image.channels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double before = luma.at(x, y);
      const double after = equalized.at(x, y);
      for (int c = 0; c < image.channels(); ++c) {
        const double v = before > 1e-6 ? image.at(x, y, c) * after / before : after;
        out.at(x, y, c) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return out;
}

}  // namespace restorebench
