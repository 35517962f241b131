#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "restorebench/image.hpp"
#include "restorebench/kernel.hpp"

namespace restorebench {

// Line-segment kernel of length `length` pixels oriented at `theta` radians
// (counter-clockwise from +x, y pointing down the rows). The segment is
// integrated with 8 samples per pixel of length; side is the smallest odd
// integer >= length.
Kernel motion_blur_kernel(double length, double theta);

// Sampled isotropic Gaussian truncated at 3 sigma (side 2*ceil(3 sigma)+1),
// renormalised to unit sum.
Kernel gaussian_defocus_kernel(double sigma);

// Translates odd rows horizontally by `shift` pixels (out(x) = in(x - shift))
// using linear interpolation and mirrored borders. Requires |shift| <= width/4.
Image simulate_interlacing(const Image& image, double shift);

// Adds amplitude * checkerboard(period) to every channel and clamps. Cells
// are period/2 pixels wide; the cell containing the origin is positive.
Image inject_periodic(const Image& image, double period, double amplitude);

// Degradation recipe: an ordered list of steps. Motion blur may ask for a
// random direction, drawn uniformly from [0, pi) with the caller's seed.
struct MotionBlurStep {
  double length = 1.0;
  std::optional<double> theta;  // nullopt = random
};
struct DefocusStep {
  double sigma = 1.0;
};
struct InterlaceStep {
  double shift = 0.0;
};
struct PeriodicStep {
  double period = 2.0;
  double amplitude = 0.1;
};
using DegradationStep = std::variant<MotionBlurStep, DefocusStep, InterlaceStep, PeriodicStep>;

struct DegradationRecipe {
  std::vector<DegradationStep> steps;
  std::optional<std::uint64_t> seed;  // overrides the run seed when present
};

// {"seed": 7, "steps": [{"op": "motion_blur", "length": 7, "theta": "random"}, ...]}
DegradationRecipe parse_degradation_recipe(const nlohmann::json& config);

Image apply_degradation(const Image& image, const DegradationRecipe& recipe,
                        std::uint64_t seed);

}  // namespace restorebench
