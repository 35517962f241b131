#include "restorebench/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "restorebench/error.hpp"

namespace restorebench {

Kernel motion_blur_kernel(double length, double theta) {
  if (!(length >= 1.0) || !std::isfinite(length)) {
    throw ContractError("motion blur length must be >= 1");
  }
  int side = static_cast<int>(std::ceil(length - 1e-12));
  if (side % 2 == 0) ++side;
  const int r = side / 2;

  const int samples = static_cast<int>(std::ceil(8.0 * length));
  const double dx = std::cos(theta);
  const double dy = std::sin(theta);
  std::vector<double> weights(static_cast<std::size_t>(side) * side, 0.0);
  for (int i = 0; i < samples; ++i) {
    const double t = -0.5 * length + (i + 0.5) * length / samples;
    // lround rounds halves away from zero, which keeps the deposit symmetric.
    const long px = std::clamp(std::lround(t * dx), -static_cast<long>(r), static_cast<long>(r));
    const long py = std::clamp(std::lround(t * dy), -static_cast<long>(r), static_cast<long>(r));
    weights[(py + r) * side + (px + r)] += 1.0 / samples;
  }
  double sum = 0.0;
  for (double w : weights) sum += w;
  for (double& w : weights) w /= sum;
  return Kernel(side, std::move(weights));
}

Kernel gaussian_defocus_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ContractError("defocus sigma must be > 0");
  }
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  const int side = 2 * r + 1;
  std::vector<double> weights(static_cast<std::size_t>(side) * side);
  double sum = 0.0;
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      const double w = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
      weights[(y + r) * side + (x + r)] = w;
      sum += w;
    }
  }
  for (double& w : weights) w /= sum;
  return Kernel(side, std::move(weights));
}

Image simulate_interlacing(const Image& image, double shift) {
  if (!std::isfinite(shift) || std::abs(shift) > image.width() / 4.0) {
    throw ContractError("interlacing shift must satisfy |shift| <= width/4");
  }
  Image out = image;
  const int w = image.width();
  const double whole = std::floor(shift);
  const double frac = shift - whole;
  const int offset = static_cast<int>(whole);
  for (int y = 1; y < image.height(); y += 2) {
    for (int x = 0; x < w; ++x) {
      // Sample at x - shift = (x - offset - 1) + (1 - frac).
      const int left = mirror_index(x - offset - 1, w);
      const int right = mirror_index(x - offset, w);
      for (int c = 0; c < image.channels(); ++c) {
        out.at(x, y, c) = frac * image.at(left, y, c) + (1.0 - frac) * image.at(right, y, c);
      }
    }
  }
  return out;
}

Image inject_periodic(const Image& image, double period, double amplitude) {
  if (!(period >= 2.0)) throw ContractError("checkerboard period must be >= 2");
  if (!(amplitude > 0.0 && amplitude <= 0.5)) {
    throw ContractError("checkerboard amplitude must lie in (0, 0.5]");
  }
  const double cell = period / 2.0;
  Image out = image;
  for (int y = 0; y < image.height(); ++y) {
    const auto cy = static_cast<long>(std::floor(y / cell));
    for (int x = 0; x < image.width(); ++x) {
      const auto cx = static_cast<long>(std::floor(x / cell));
      const double sign = ((cx + cy) % 2 == 0) ? 1.0 : -1.0;
      for (int c = 0; c < image.channels(); ++c) {
        out.at(x, y, c) = std::clamp(image.at(x, y, c) + sign * amplitude, 0.0, 1.0);
      }
    }
  }
  return out;
}

DegradationRecipe parse_degradation_recipe(const nlohmann::json& config) {
  DegradationRecipe recipe;
  if (!config.is_object() || !config.contains("steps") || !config["steps"].is_array()) {
    throw ValidationError("degradation recipe needs a \"steps\" array");
  }
  if (config.contains("seed")) recipe.seed = config["seed"].get<std::uint64_t>();
  try {
    for (const auto& step : config["steps"]) {
      const std::string op = step.at("op").get<std::string>();
      if (op == "motion_blur") {
        MotionBlurStep s;
        s.length = step.at("length").get<double>();
        const auto& theta = step.value("theta", nlohmann::json("random"));
        if (!theta.is_string()) {
          s.theta = theta.get<double>();
        } else if (theta.get<std::string>() != "random") {
          throw ValidationError("motion_blur theta must be a number or \"random\"");
        }
        recipe.steps.emplace_back(s);
      } else if (op == "defocus") {
        recipe.steps.emplace_back(DefocusStep{step.at("sigma").get<double>()});
      } else if (op == "interlace") {
        recipe.steps.emplace_back(InterlaceStep{step.at("shift").get<double>()});
      } else if (op == "periodic") {
        recipe.steps.emplace_back(PeriodicStep{step.value("period", 2.0),
                                               step.at("amplitude").get<double>()});
      } else {
        throw ValidationError("unknown degradation op '" + op + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("degradation recipe: ") + e.what());
  }
  return recipe;
}

Image apply_degradation(const Image& image, const DegradationRecipe& recipe,
                        std::uint64_t seed) {
  std::mt19937_64 rng(recipe.seed.value_or(seed));
  std::uniform_real_distribution<double> direction(0.0, std::numbers::pi);
  Image current = image;
  for (const auto& step : recipe.steps) {
    if (const auto* m = std::get_if<MotionBlurStep>(&step)) {
      const double theta = m->theta ? *m->theta : direction(rng);
      current = convolve(current, motion_blur_kernel(m->length, theta));
    } else if (const auto* d = std::get_if<DefocusStep>(&step)) {
      current = convolve(current, gaussian_defocus_kernel(d->sigma));
    } else if (const auto* i = std::get_if<InterlaceStep>(&step)) {
      current = simulate_interlacing(current, i->shift);
    } else if (const auto* p = std::get_if<PeriodicStep>(&step)) {
      current = inject_periodic(current, p->period, p->amplitude);
    }
  }
  return current;
}

}  // namespace restorebench
