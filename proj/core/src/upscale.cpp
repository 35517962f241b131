#include <array>
#include <cmath>

#include "restorebench/enhance.hpp"
#include "restorebench/error.hpp"

namespace restorebench {

namespace {

std::array<double, 4> catmull_rom_weights(double t) {
  constexpr double a = -0.5;
  auto w = [&](double d) {
    d = std::abs(d);
    if (d <= 1.0) return ((a + 2.0) * d - (a + 3.0)) * d * d + 1.0;
    if (d < 2.0) return ((a * d - 5.0 * a) * d + 8.0 * a) * d - 4.0 * a;
    return 0.0;
  };
  return {w(1.0 + t), w(t), w(1.0 - t), w(2.0 - t)};
}

}  // namespace

Image upscale(const Image& image, int factor, Interpolation method) {
  if (factor < 2) throw ContractError("upscale factor must be >= 2");
  const int w = image.width(), h = image.height(), ch = image.channels();
  Image out(w * factor, h * factor, ch);

  for (int Y = 0; Y < out.height(); ++Y) {
    const double sy = (Y + 0.5) / factor - 0.5;
    const int y0 = static_cast<int>(std::floor(sy));
    const double ty = sy - y0;
    for (int X = 0; X < out.width(); ++X) {
      const double sx = (X + 0.5) / factor - 0.5;
      const int x0 = static_cast<int>(std::floor(sx));
      const double tx = sx - x0;
      for (int c = 0; c < ch; ++c) {
        double v = 0.0;
        switch (method) {
          case Interpolation::kNearest:
            v = image.at(X / factor, Y / factor, c);
            break;
          case Interpolation::kBilinear: {
            const int xa = mirror_index(x0, w), xb = mirror_index(x0 + 1, w);
            const int ya = mirror_index(y0, h), yb = mirror_index(y0 + 1, h);
            v = (1 - ty) * ((1 - tx) * image.at(xa, ya, c) + tx * image.at(xb, ya, c)) +
                ty * ((1 - tx) * image.at(xa, yb, c) + tx * image.at(xb, yb, c));
            break;
          }
          case Interpolation::kBicubic: {
            const auto wx = catmull_rom_weights(tx);
            const auto wy = catmull_rom_weights(ty);
            for (int j = 0; j < 4; ++j) {
              const int yy = mirror_index(y0 - 1 + j, h);
              double row = 0.0;
              for (int i = 0; i < 4; ++i) {
                row += wx[i] * image.at(mirror_index(x0 - 1 + i, w), yy, c);
              }
              v += wy[j] * row;
            }
            break;
          }
        }
        out.at(X, Y, c) = v;
      }
    }
  }
  out.clamp01();
  return out;
}

}  // namespace restorebench
