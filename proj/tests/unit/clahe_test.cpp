#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "restorebench/enhance.hpp"
#include "restorebench/error.hpp"
#include "support/fixtures.hpp"

namespace rb = restorebench;

TEST(Clahe, UniformHistogramIsNearlyUnchanged) {
  // Every 8-bit level appears equally often inside each tile, so the
  // equalising map is already the identity up to bin quantisation.
  rb::Image img(256, 256, 1);
  std::mt19937_64 rng(3);
  for (int ty = 0; ty < 256; ty += 32)
    for (int tx = 0; tx < 256; tx += 32) {
      std::vector<int> levels(32 * 32);
      for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = static_cast<int>(i % 256);
      std::shuffle(levels.begin(), levels.end(), rng);
      for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) img.at(tx + x, ty + y) = (levels[y * 32 + x] + 0.5) / 256.0;
    }
  const auto out = rb::clahe(img, 8, 2.0);
  for (std::size_t i = 0; i < img.size(); ++i) ASSERT_NEAR(out.data()[i], img.data()[i], 2.0 / 256.0);
}

TEST(Clahe, ConstantImageStaysConstant) {
  const rb::Image flat(64, 48, 1, 0.37);
  const auto out = rb::clahe(flat, 4, 2.0);
  const double first = out.data()[0];
  for (double v : out.data()) EXPECT_DOUBLE_EQ(v, first);
}

TEST(Clahe, LowContrastRampWidens) {
  rb::Image ramp(128, 128, 1);
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x) ramp.at(x, y) = 0.45 + 0.1 * x / 127.0;
  const auto out = rb::clahe(ramp, 4, 4.0);
  const auto [lo, hi] = std::minmax_element(out.data().begin(), out.data().end());
  EXPECT_GT(*hi - *lo, 0.1);
  EXPECT_TRUE(out.is_normalized());
}

TEST(Clahe, ColourKeepsChromaRatios) {
  const auto img = rb::testing::natural_image(11, 64, 64, 3);
  const auto out = rb::clahe(img, 8, 2.0);
  ASSERT_TRUE(out.same_shape(img));
  int checked = 0;
  for (int y = 0; y < 64; y += 7)
    for (int x = 0; x < 64; x += 7) {
      if (out.at(x, y, 0) >= 0.999 || out.at(x, y, 1) >= 0.999 || out.at(x, y, 2) >= 0.999) continue;
      EXPECT_NEAR(out.at(x, y, 0) * img.at(x, y, 1), out.at(x, y, 1) * img.at(x, y, 0), 1e-9);
      ++checked;
    }
  EXPECT_GT(checked, 50);
}

TEST(Clahe, RejectsBadParameters) {
  EXPECT_THROW(rb::clahe(rb::Image(8, 8, 1), 0, 2.0), rb::ContractError);
  EXPECT_THROW(rb::clahe(rb::Image(8, 8, 1), 2, -1.0), rb::ContractError);
}

TEST(SmoothPrior, PreservesStepEdge) {
  rb::Image step(32, 8, 1, 0.2);
  for (int y = 0; y < 8; ++y)
    for (int x = 16; x < 32; ++x) step.at(x, y) = 0.8;
  const auto out = rb::smooth_prior(step, 3, 0.1);
  for (int y = 0; y < 8; ++y) {
    EXPECT_NEAR(out.at(15, y), 0.2, 1e-3);
    EXPECT_NEAR(out.at(16, y), 0.8, 1e-3);
  }
}

TEST(SmoothPrior, SmoothsSmallNoise) {
  rb::Image noisy(32, 32, 1);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.5, 0.02);
  for (double& v : noisy.data()) v = n(rng);
  const auto out = rb::smooth_prior(noisy, 2, 0.2);
  auto variance = [](const rb::Image& img) {
    double m = rb::mean_value(img), s = 0.0;
    for (double v : img.data()) s += (v - m) * (v - m);
    return s / img.size();
  };
  EXPECT_LT(variance(out), 0.5 * variance(noisy));
}
