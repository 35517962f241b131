#pragma once

#include <vector>

#include "restorebench/image.hpp"

namespace restorebench {

// Odd-sided square blur kernel, non-negative, unit sum. Weights are row-major
// with the centre at (side/2, side/2).
class Kernel {
 public:
  // Validates shape, non-negativity and unit sum (within 1e-9).
  Kernel(int side, std::vector<double> weights);

  static Kernel identity() { return Kernel(1, {1.0}); }
  // side*side entries of 1/side^2.
  static Kernel uniform(int side);

  int side() const noexcept { return side_; }
  int radius() const noexcept { return side_ / 2; }
  double at(int dx, int dy) const noexcept {
    return weights_[(dy + radius()) * side_ + (dx + radius())];
  }
  const std::vector<double>& weights() const noexcept { return weights_; }

  // Bypasses the unit-sum check; used by iterative estimators that renormalise.
  static Kernel from_unnormalized(int side, std::vector<double> weights);

 private:
  Kernel() = default;
  int side_ = 1;
  std::vector<double> weights_{1.0};
};

// out(x,y) = sum_{u,v} k(u,v) * in(x-u, y-v) with mirrored borders, per channel.
// Output is clamped to [0,1].
Image convolve(const Image& image, const Kernel& kernel);

// Same as convolve but without the final clamp.
Image convolve_unclamped(const Image& image, const Kernel& kernel);

// Exact adjoint of convolve_unclamped, including the mirrored border:
// <convolve(a), b> == <convolve_adjoint(b), a>.
Image convolve_adjoint(const Image& image, const Kernel& kernel);

}  // namespace restorebench
