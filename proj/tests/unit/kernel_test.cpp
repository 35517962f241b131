#include <random>

#include <gtest/gtest.h>

#include "restorebench/error.hpp"
#include "restorebench/kernel.hpp"
#include "support/fixtures.hpp"

namespace rb = restorebench;

namespace {

rb::Kernel random_kernel(std::mt19937_64& rng, int side) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(side * side);
  double s = 0.0;
  for (double& v : w) s += (v = u(rng));
  for (double& v : w) v /= s;
  return rb::Kernel(side, w);
}

rb::Image random_image(std::mt19937_64& rng, int w, int h, int c) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  rb::Image img(w, h, c);
  for (double& v : img.data()) v = u(rng);
  return img;
}

// Direct evaluation of sum_u k(u) in(mirror(x - u)) written independently of
// the library loops.
rb::Image reference_convolution(const rb::Image& in, const rb::Kernel& k) {
  const int r = k.side() / 2;
  rb::Image out(in.width(), in.height(), in.channels());
  for (int c = 0; c < in.channels(); ++c)
    for (int y = 0; y < in.height(); ++y)
      for (int x = 0; x < in.width(); ++x) {
        double acc = 0.0;
        for (int j = 0; j < k.side(); ++j)
          for (int i = 0; i < k.side(); ++i) {
            int sx = x - (i - r), sy = y - (j - r);
            if (sx < 0) sx = -sx - 1;
            if (sx >= in.width()) sx = 2 * in.width() - sx - 1;
            if (sy < 0) sy = -sy - 1;
            if (sy >= in.height()) sy = 2 * in.height() - sy - 1;
            acc += k.weights()[j * k.side() + i] * in.at(sx, sy, c);
          }
        out.at(x, y, c) = acc;
      }
  return out;
}

}  // namespace

TEST(Kernel, ValidatesShapeAndSum) {
  EXPECT_THROW(rb::Kernel(2, {0.25, 0.25, 0.25, 0.25}), rb::ContractError);
  EXPECT_THROW(rb::Kernel(1, {0.5}), rb::ContractError);
  EXPECT_THROW(rb::Kernel(3, std::vector<double>(8, 0.125)), rb::ContractError);
  EXPECT_THROW(rb::Kernel(1, {-1.0}), rb::ContractError);
  EXPECT_NO_THROW(rb::Kernel::uniform(5));
  EXPECT_EQ(rb::Kernel::uniform(3).at(1, 1), 1.0 / 9.0);
}

TEST(Convolve, IdentityKernel) {
  std::mt19937_64 rng(1);
  const auto img = random_image(rng, 9, 7, 3);
  EXPECT_EQ(rb::convolve(img, rb::Kernel::identity()), img);
}

TEST(Convolve, ConstantImageIsPreserved) {
  std::mt19937_64 rng(2);
  rb::Image flat(12, 10, 1, 0.37);
  const auto out = rb::convolve(flat, random_kernel(rng, 5));
  for (double v : out.data()) EXPECT_NEAR(v, 0.37, 1e-12);
}

TEST(Convolve, MatchesBruteForceReference) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto img = random_image(rng, 16, 16, 1 + 2 * (trial % 2));
    const auto k = random_kernel(rng, 3 + 2 * (trial % 3));
    const auto out = rb::convolve_unclamped(img, k);
    const auto ref = reference_convolution(img, k);
    for (std::size_t i = 0; i < out.size(); ++i) ASSERT_NEAR(out.data()[i], ref.data()[i], 1e-6);
  }
}

TEST(Convolve, ClampsOnlyTheFinalWrite) {
  rb::Image img(3, 1, 1, std::vector<double>{1.0, 1.0, 1.0});
  const auto out = rb::convolve(img, rb::Kernel(3, {0, 0, 0, 0.5, 0, 0.5, 0, 0, 0}));
  for (double v : out.data()) EXPECT_LE(v, 1.0);
}

TEST(Convolve, AdjointIdentity) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 4; ++trial) {
    const auto x = random_image(rng, 13, 11, 1);
    const auto y = random_image(rng, 13, 11, 1);
    const auto k = random_kernel(rng, 5);
    const auto kx = rb::convolve_unclamped(x, k);
    const auto kty = rb::convolve_adjoint(y, k);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      lhs += kx.data()[i] * y.data()[i];
      rhs += x.data()[i] * kty.data()[i];
    }
    EXPECT_NEAR(lhs, rhs, 1e-9);
  }
}
