#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <vector>

#include "restorebench/enhance.hpp"
#include "restorebench/error.hpp"
#include "restorebench/fft.hpp"

namespace restorebench {

namespace {

using cd = std::complex<double>;

// Smooth component of the periodic-plus-smooth decomposition: the image
// whose Laplacian equals the jumps across the periodic wrap-around. Removing
// it before the transform eliminates the cross-shaped leakage that image
// borders otherwise put on the frequency axes.
std::vector<cd> smooth_component(const Image& plane) {
  const int w = plane.width(), h = plane.height();
  std::vector<cd> v(static_cast<std::size_t>(w) * h, 0.0);
  auto at = [&](int x, int y) -> cd& { return v[static_cast<std::size_t>(y) * w + x]; };
  for (int x = 0; x < w; ++x) {
    const double jump = plane.at(x, h - 1) - plane.at(x, 0);
    at(x, 0) += jump;
    at(x, h - 1) -= jump;
  }
  for (int y = 0; y < h; ++y) {
    const double jump = plane.at(w - 1, y) - plane.at(0, y);
    at(0, y) += jump;
    at(w - 1, y) -= jump;
  }
  fft2d(v, w, h, false);
  for (int q = 0; q < h; ++q) {
    for (int p = 0; p < w; ++p) {
      const double denom = 2.0 * std::cos(2.0 * std::numbers::pi * p / w) +
                           2.0 * std::cos(2.0 * std::numbers::pi * q / h) - 4.0;
      at(p, q) = (p == 0 && q == 0) ? cd(0.0) : at(p, q) / denom;
    }
  }
  fft2d(v, w, h, true);
  const double scale = 1.0 / (static_cast<double>(w) * h);
  for (auto& s : v) s *= scale;
  return v;
}

// Signed frequency index in [-n/2, n/2).
int centred(int k, int n) { return k < (n + 1) / 2 ? k : k - n; }

Image suppress_plane(const Image& plane, const PeriodicSuppressionOptions& opt) {
  const int w = plane.width(), h = plane.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const std::vector<cd> smooth = smooth_component(plane);

  std::vector<cd> spectrum(n);
  for (std::size_t i = 0; i < n; ++i) spectrum[i] = plane.data()[i] - smooth[i].real();
  fft2d(spectrum, w, h, false);

  std::vector<double> magnitude(n);
  for (std::size_t i = 0; i < n; ++i) magnitude[i] = std::abs(spectrum[i]);

  const int m = std::max(1, opt.median_radius);
  std::vector<double> window;
  window.reserve(static_cast<std::size_t>(2 * m + 1) * (2 * m + 1));
  std::vector<std::pair<int, int>> peaks;
  for (int y = 0; y < h; ++y) {
    const int fy = centred(y, h);
    for (int x = 0; x < w; ++x) {
      const int fx = centred(x, w);
      if (std::hypot(fx, fy) <= opt.dc_exclusion_radius) continue;
      const double mag = magnitude[static_cast<std::size_t>(y) * w + x];
      if (mag == 0.0) continue;
      window.clear();
      for (int dy = -m; dy <= m; ++dy) {
        const int yy = ((y + dy) % h + h) % h;
        for (int dx = -m; dx <= m; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int xx = ((x + dx) % w + w) % w;
          window.push_back(magnitude[static_cast<std::size_t>(yy) * w + xx]);
        }
      }
      auto mid = window.begin() + window.size() / 2;
      std::nth_element(window.begin(), mid, window.end());
      if (mag > opt.peak_factor * *mid) peaks.emplace_back(fx, fy);
    }
  }

  if (!peaks.empty()) {
    // Conjugate partners are notched together even if only one was flagged.
    std::set<std::pair<int, int>> notches;
    for (auto [fx, fy] : peaks) {
      notches.emplace((fx % w + w) % w, (fy % h + h) % h);
      notches.emplace((-fx % w + w) % w, (-fy % h + h) % h);
    }
    const int reach = static_cast<int>(std::ceil(4.0 * opt.notch_sigma));
    std::vector<double> gain(n, 1.0);
    for (auto [fx, fy] : notches) {
      for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
          const int xx = ((fx + dx) % w + w) % w;
          const int yy = ((fy + dy) % h + h) % h;
          const double d2 = dx * dx + dy * dy;
          gain[static_cast<std::size_t>(yy) * w + xx] *=
              1.0 - std::exp(-d2 / (2.0 * opt.notch_sigma * opt.notch_sigma));
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) spectrum[i] *= gain[i];
  }

  fft2d(spectrum, w, h, true);
  Image out(w, h, 1);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.data()[i] = std::clamp(spectrum[i].real() * scale + smooth[i].real(), 0.0, 1.0);
  }
  return out;
}

}  // namespace

Image suppress_periodic(const Image& image, const PeriodicSuppressionOptions& options) {
  if (!(options.peak_factor > 0.0) || options.dc_exclusion_radius < 0.0 ||
      !(options.notch_sigma > 0.0)) {
    throw ContractError("invalid periodic suppression options");
  }
  Image out(image.width(), image.height(), image.channels());
  for (int c = 0; c < image.channels(); ++c) out.set_channel(c, suppress_plane(image.channel(c), options));
  return out;
}

}  // namespace restorebench
