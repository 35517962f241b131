#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "restorebench/fft.hpp"

namespace restorebench::testing {

namespace fs = std::filesystem;

namespace {

// Gaussian optics blur (pixels) applied as a transfer function, so the field
// has the weak near-Nyquist energy of a camera image.
constexpr double kOpticsSigma = 0.8;
constexpr double kEdgeWidth = 0.8;

std::vector<double> pink_field(std::mt19937_64& rng, int w, int h) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> gain(1.0, 0.25);
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(w) * h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double fu = std::min(u, w - u) / static_cast<double>(w);
      const double fv = std::min(v, h - v) / static_cast<double>(h);
      const double f = std::hypot(fu, fv);
      const double mtf = std::exp(-2.0 * std::numbers::pi * std::numbers::pi * kOpticsSigma *
                                  kOpticsSigma * f * f);
      const double amp = f == 0.0 ? 0.0 : gain(rng) * mtf / f;
      spectrum[static_cast<std::size_t>(v) * w + u] = std::polar(amp, phase(rng));
    }
  }
  fft2d(spectrum, w, h, true);
  std::vector<double> field(spectrum.size());
  for (std::size_t i = 0; i < field.size(); ++i) field[i] = spectrum[i].real();
  return field;
}

void normalise(std::vector<double>& v, double lo, double hi) {
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  const double a = *mn, b = *mx;
  for (auto& x : v) x = b > a ? lo + (hi - lo) * (x - a) / (b - a) : 0.5 * (lo + hi);
}

}  // namespace

Image natural_image(std::uint64_t seed, int width, int height, int channels) {
  std::mt19937_64 rng(seed);
  std::vector<double> base = pink_field(rng, width, height);
  normalise(base, 0.0, 1.0);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int shapes = 6;
  for (int s = 0; s < shapes; ++s) {
    const double cx = unit(rng) * width, cy = unit(rng) * height;
    const double r = (0.05 + 0.2 * unit(rng)) * std::min(width, height);
    const double level = unit(rng);
    const bool disc = s % 2 == 0;
    const double angle = unit(rng) * std::numbers::pi;
    const double ca = std::cos(angle), sa = std::sin(angle);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double dx = x - cx, dy = y - cy;
        double edge;
        if (disc) {
          edge = r - std::hypot(dx, dy);
        } else {
          const double along = std::abs(dx * ca + dy * sa), across = std::abs(-dx * sa + dy * ca);
          edge = std::min(2.0 * r - along, 0.3 * r - across);
        }
        const double alpha = 0.8 / (1.0 + std::exp(-edge / kEdgeWidth));
        double& p = base[static_cast<std::size_t>(y) * width + x];
        p = (1.0 - alpha) * p + alpha * level;
      }
    }
  }
  normalise(base, 0.1, 0.9);

  Image out(width, height, channels);
  for (int c = 0; c < channels; ++c) {
    const double tint = channels == 1 ? 1.0 : 0.8 + 0.2 * unit(rng);
    const double offset = channels == 1 ? 0.0 : 0.05 * (unit(rng) - 0.5);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double v = base[static_cast<std::size_t>(y) * width + x] * tint + offset;
        out.at(x, y, c) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return out;
}

TempDir::TempDir(const std::string& tag) {
  std::random_device rd;
  std::mt19937_64 rng(rd());
  for (;;) {
    std::ostringstream name;
    name << tag << "-" << std::hex << rng();
    path_ = fs::temp_directory_path() / name.str();
    if (fs::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ignored;
  fs::remove_all(path_, ignored);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace restorebench::testing
