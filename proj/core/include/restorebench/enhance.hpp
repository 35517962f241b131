#pragma once

#include <functional>

#include "restorebench/image.hpp"
#include "restorebench/kernel.hpp"

namespace restorebench {

// ---- Interpolation -------------------------------------------------------

enum class Interpolation { kNearest, kBilinear, kBicubic };

// Integer-factor upscaling. Output pixel X samples source coordinate
// (X + 0.5) / factor - 0.5; bicubic uses Catmull-Rom weights (a = -0.5).
// Borders are mirrored and the result clamped to [0,1].
Image upscale(const Image& image, int factor, Interpolation method);

// ---- Deconvolution -------------------------------------------------------

struct DeconvolutionResult {
  Image image;    // clamped to [0,1]
  Kernel psf;
  double observed_flux = 0.0;  // sum of the input samples
  double restored_flux = 0.0;  // sum of the estimate before the final clamp
};

// Richardson-Lucy with a known PSF, starting from the observation. The
// latent image is estimated on a canvas padded by the PSF radius (seeded by
// mirroring), each update is normalised by the adjoint of the all-ones
// image, and the result is the central crop.
DeconvolutionResult richardson_lucy(const Image& observed, const Kernel& psf, int iterations);

// Blind maximum-likelihood deconvolution: each iteration performs one
// multiplicative PSF update (renormalised to unit sum) followed by one image
// update. The default initial PSF is psf_side^2 entries of 1/psf_side^2.
// Throws NumericError carrying the iteration index on a non-finite estimate.
// Without a prior the joint estimate drifts toward the trivial delta-PSF
// solution, so gains peak after a few iterations; the chain stage defaults
// to kDefaultBlindIterations.
inline constexpr int kDefaultBlindIterations = 3;
DeconvolutionResult blind_deconvolve(const Image& observed, int iterations, int psf_side = 3);
DeconvolutionResult blind_deconvolve(const Image& observed, int iterations,
                                     const Kernel& initial_psf);

// ---- Interlacing ---------------------------------------------------------

inline constexpr double kInterlaceThreshold = 0.16;

struct InterlaceReport {
  double shift = 0.0;  // odd field relative to even field, pixels (+ = right)
  bool interlaced = false;
};

// Registers the odd-row field against the even-row field with row-wise
// phase correlation and parabolic peak refinement.
InterlaceReport detect_interlacing(const Image& image, double threshold = kInterlaceThreshold);

// Keeps even rows; each odd row becomes the mean of its vertical neighbours
// (the last row replicates its upper neighbour when it has no lower one).
Image deinterlace(const Image& image);

// ---- Contrast ------------------------------------------------------------

// Contrast-limited adaptive histogram equalisation on luminance with
// `grid` x `grid` tiles and 256 bins. `clip_limit` is a multiple of the
// uniform bin height; 0 disables clipping. Colour images are rescaled by
// the luminance gain so chroma ratios are kept.
Image clahe(const Image& image, int grid = 8, double clip_limit = 2.0);

// ---- Detail enhancement --------------------------------------------------

// Bilateral smoothing over a (2 radius + 1)^2 window with spatial sigma
// radius / 2 and range sigma `range_sigma`.
Image smooth_prior(const Image& image, int radius, double range_sigma = 0.1);

inline constexpr double kToneMapEpsilon = 1e-4;

// Detail amplification against a prior image V:
//   out = (V + eps) * ((I + eps) / (V + eps))^gamma - eps, clamped to [0,1].
Image tone_map_enhance(const Image& input, const Image& prior, double gamma);

// ---- Periodic artifacts --------------------------------------------------

struct PeriodicSuppressionOptions {
  double dc_exclusion_radius = 4.0;  // frequency bins
  double peak_factor = 8.0;          // peak / local median magnitude
  int median_radius = 3;             // half-width of the median window
  double notch_sigma = 1.0;          // Gaussian notch width, bins
};

// Finds spectral peaks that stand out from their local median and removes
// them with Gaussian notches placed on each peak and its conjugate.
Image suppress_periodic(const Image& image, const PeriodicSuppressionOptions& options = {});

// ---- Tiling --------------------------------------------------------------

using PatchEnhancer = std::function<Image(const Image&)>;

struct TileOptions {
  int tile = 32;
  int apron = 2;
  int scale = 1;  // 1 or 2
  int jobs = 1;   // patches evaluated concurrently; stitching is deterministic
};

// Mirror-pads the image, hands each tile and its apron to `enhancer`, and
// stitches the outputs after dropping each patch's outer scale*apron border.
// Throws ContractError if the enhancer returns a wrongly sized patch.
Image tile_process(const Image& image, const PatchEnhancer& enhancer,
                   const TileOptions& options = {});

}  // namespace restorebench
