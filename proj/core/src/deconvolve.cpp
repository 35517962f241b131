#include <cmath>
#include <numeric>

#include "restorebench/enhance.hpp"
#include "restorebench/error.hpp"

namespace restorebench {

namespace {

constexpr double kTiny = 1e-12;

double total(const Image& image) {
  double s = 0.0;
  for (double v : image.data()) s += v;
  return s;
}

// observed / predicted, elementwise, with 0/0 taken as 0.
Image likelihood_ratio(const Image& observed, const Image& predicted) {
  Image ratio(observed.width(), observed.height(), observed.channels());
  auto o = observed.data();
  auto p = predicted.data();
  auto r = ratio.data();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = o[i] / std::max(p[i], kTiny);
  return ratio;
}

void check_finite(const Image& image, int iteration, const char* what) {
  for (double v : image.data()) {
    if (!std::isfinite(v)) throw NumericError(iteration, std::string("non-finite ") + what);
  }
}

// The latent image lives on a canvas padded by `pad` pixels on every side,
// so border pixels are explained by unknowns instead of by a reflection of
// their own neighbourhood. Observed pixel (x, y) sits at canvas (x+pad, y+pad)
// and sees sum_u k(u) canvas(x + pad - u).
struct Canvas {
  Image latent;
  int pad = 0;
};

Canvas make_canvas(const Image& observed, int pad) {
  const int w = observed.width(), h = observed.height(), ch = observed.channels();
  Canvas canvas{Image(w + 2 * pad, h + 2 * pad, ch), pad};
  for (int y = 0; y < h + 2 * pad; ++y) {
    const int sy = mirror_index(y - pad, h);
    for (int x = 0; x < w + 2 * pad; ++x) {
      const int sx = mirror_index(x - pad, w);
      for (int c = 0; c < ch; ++c) canvas.latent.at(x, y, c) = observed.at(sx, sy, c);
    }
  }
  return canvas;
}

Image predict(const Canvas& canvas, const Kernel& psf, int w, int h) {
  const int r = psf.radius(), ch = canvas.latent.channels(), pad = canvas.pad;
  Image out(w, h, ch, 0.0);
  for (int v = -r; v <= r; ++v) {
    for (int u = -r; u <= r; ++u) {
      const double k = psf.at(u, v);
      if (k == 0.0) continue;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          for (int c = 0; c < ch; ++c) {
            out.at(x, y, c) += k * canvas.latent.at(x + pad - u, y + pad - v, c);
          }
        }
      }
    }
  }
  return out;
}

// Adjoint of predict(): scatters an observation-sized image onto the canvas.
Image scatter(const Image& image, const Kernel& psf, int pad) {
  const int w = image.width(), h = image.height(), ch = image.channels();
  const int r = psf.radius();
  Image out(w + 2 * pad, h + 2 * pad, ch, 0.0);
  for (int v = -r; v <= r; ++v) {
    for (int u = -r; u <= r; ++u) {
      const double k = psf.at(u, v);
      if (k == 0.0) continue;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          for (int c = 0; c < ch; ++c) out.at(x + pad - u, y + pad - v, c) += k * image.at(x, y, c);
        }
      }
    }
  }
  return out;
}

void update_image(Canvas& canvas, const Image& observed, const Kernel& psf, int iteration) {
  const int w = observed.width(), h = observed.height();
  const Image ratio = likelihood_ratio(observed, predict(canvas, psf, w, h));
  const Image correction = scatter(ratio, psf, canvas.pad);
  const Image sensitivity = scatter(Image(w, h, observed.channels(), 1.0), psf, canvas.pad);
  auto e = canvas.latent.data();
  auto c = correction.data();
  auto s = sensitivity.data();
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = s[i] > 0.0 ? e[i] * c[i] / s[i] : e[i];
  check_finite(canvas.latent, iteration, "image estimate");
}

Kernel update_psf(const Kernel& psf, const Canvas& canvas, const Image& observed,
                  int iteration) {
  const int w = observed.width(), h = observed.height(), ch = observed.channels();
  const Image ratio = likelihood_ratio(observed, predict(canvas, psf, w, h));
  const int r = psf.radius();
  const int side = psf.side();
  const int pad = canvas.pad;
  std::vector<double> weights(psf.weights());
  for (int v = -r; v <= r; ++v) {
    for (int u = -r; u <= r; ++u) {
      double& k = weights[(v + r) * side + (u + r)];
      if (k == 0.0) continue;
      double acc = 0.0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          for (int c = 0; c < ch; ++c) {
            acc += ratio.at(x, y, c) * canvas.latent.at(x + pad - u, y + pad - v, c);
          }
        }
      }
      k *= acc;
    }
  }
  double sum = 0.0;
  for (double k : weights) {
    if (!std::isfinite(k)) throw NumericError(iteration, "non-finite PSF estimate");
    sum += k;
  }
  if (!(sum > 0.0)) throw NumericError(iteration, "PSF estimate collapsed to zero");
  for (double& k : weights) k /= sum;
  return Kernel::from_unnormalized(side, std::move(weights));
}

Image crop_canvas(const Canvas& canvas, int w, int h) {
  Image out(w, h, canvas.latent.channels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < out.channels(); ++c) {
        out.at(x, y, c) = canvas.latent.at(x + canvas.pad, y + canvas.pad, c);
      }
    }
  }
  return out;
}

DeconvolutionResult finish(Image estimate, Kernel psf, const Image& observed) {
  DeconvolutionResult result{std::move(estimate), std::move(psf), total(observed), 0.0};
  result.restored_flux = total(result.image);
  result.image.clamp01();
  return result;
}

void check_observation(const Image& observed, int iterations) {
  if (iterations < 1) throw ContractError("deconvolution needs at least one iteration");
  for (double v : observed.data()) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ContractError("deconvolution input must be finite and non-negative");
    }
  }
}

}  // namespace

DeconvolutionResult richardson_lucy(const Image& observed, const Kernel& psf, int iterations) {
  check_observation(observed, iterations);
  Canvas canvas = make_canvas(observed, psf.radius());
  for (int it = 1; it <= iterations; ++it) update_image(canvas, observed, psf, it);
  return finish(crop_canvas(canvas, observed.width(), observed.height()), psf, observed);
}

DeconvolutionResult blind_deconvolve(const Image& observed, int iterations, int psf_side) {
  if (psf_side < 1 || psf_side % 2 == 0) throw ContractError("psf_side must be odd");
  return blind_deconvolve(observed, iterations, Kernel::uniform(psf_side));
}

DeconvolutionResult blind_deconvolve(const Image& observed, int iterations,
                                     const Kernel& initial_psf) {
  check_observation(observed, iterations);
  Canvas canvas = make_canvas(observed, initial_psf.radius());
  Kernel psf = initial_psf;
  for (int it = 1; it <= iterations; ++it) {
    update_image(canvas, observed, psf, it);
    psf = update_psf(psf, canvas, observed, it);
  }
  return finish(crop_canvas(canvas, observed.width(), observed.height()), std::move(psf), observed);
}

}  // namespace restorebench
