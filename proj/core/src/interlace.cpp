#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "restorebench/enhance.hpp"
#include "restorebench/error.hpp"
#include "restorebench/fft.hpp"

namespace restorebench {

namespace {

using cd = std::complex<double>;

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Spectral weighting exponent for the coarse search: 1 is classic (fully
// whitened) phase correlation, 0 plain cross-correlation.
constexpr double kWhitening = 0.5;
constexpr int kUpsample = 16;
constexpr double kSlopeBand = std::numbers::pi / 4.0;  // rad/pixel
constexpr int kSlopePasses = 3;
constexpr double kMaxCoherence = 0.999;

double hann(double x, int w) {
  if (w == 1) return 1.0;
  if (x < 0.0 || x > w - 1) return 0.0;
  return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * x / (w - 1));
}

// Horizontal offset of the rows of one parity relative to the mean of their
// vertical neighbours (the other field).
class FieldRegistration {
 public:
  FieldRegistration(const Image& luma, int parity)
      : luma_(luma), w_(luma.width()), len_(next_pow2(2 * luma.width())) {
    for (int y = parity; y + 1 < luma.height(); y += 2) {
      if (y >= 1) rows_.push_back(y);
    }
    reference_ = transform([&](int y, int x) {
      return 0.5 * (luma_.at(x, y - 1) + luma_.at(x, y + 1));
    }, 0.0);
  }

  bool empty() const { return rows_.empty(); }

  double estimate() const {
    Spectra spectra = cross_power(0.0);
    double shift = coarse(spectra.cross);
    for (int pass = 0; pass < kSlopePasses; ++pass) {
      spectra = cross_power(shift);
      const auto& cross = spectra.cross;
      double num = 0.0, den = 0.0;
      for (int f = 1; f < len_ / 2; ++f) {
        const double omega = 2.0 * std::numbers::pi * f / len_;
        if (omega > kSlopeBand) break;
        // Phase variance of a bin grows as (1 - coherence) / coherence.
        const double power = spectra.reference_power[f] * spectra.target_power[f];
        if (power <= 0.0) continue;
        const double coherence = std::min(std::norm(cross[f]) / power, kMaxCoherence);
        const double weight = coherence / (1.0 - coherence);
        const double residual = std::arg(cross[f] * std::polar(1.0, omega * shift));
        num += weight * omega * residual;
        den += weight * omega * omega;
      }
      if (den <= 0.0) break;
      shift -= num / den;
    }
    return shift;
  }

 private:
  template <typename Sample>
  std::vector<cd> transform(Sample&& sample, double window_offset) const {
    const int count = static_cast<int>(rows_.size());
    std::vector<cd> out(static_cast<std::size_t>(len_) * count, 0.0);
    for (int k = 0; k < count; ++k) {
      const int y = rows_[k];
      double mean = 0.0;
      for (int x = 0; x < w_; ++x) mean += sample(y, x);
      mean /= w_;
      for (int x = 0; x < w_; ++x) {
        out[static_cast<std::size_t>(k) * len_ + x] =
            (sample(y, x) - mean) * hann(x - window_offset, w_);
      }
    }
    if (count > 0) fft_rows(out, len_, count, false);
    return out;
  }

  // Target rows are windowed at the estimated offset so the window follows
  // the content it multiplies.
  struct Spectra {
    std::vector<cd> cross;
    std::vector<double> reference_power;
    std::vector<double> target_power;
  };

  Spectra cross_power(double shift) const {
    const auto target = transform([&](int y, int x) { return luma_.at(x, y); }, shift);
    Spectra out{std::vector<cd>(len_, 0.0), std::vector<double>(len_, 0.0),
                std::vector<double>(len_, 0.0)};
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      for (int f = 0; f < len_; ++f) {
        const std::size_t i = k * len_ + f;
        out.cross[f] += std::conj(reference_[i]) * target[i];
        out.reference_power[f] += std::norm(reference_[i]);
        out.target_power[f] += std::norm(target[i]);
      }
    }
    return out;
  }

  // Peak of the partially whitened correlation, sampled every 1/kUpsample
  // pixel by zero-padding the spectrum, with parabolic refinement.
  double coarse(const std::vector<cd>& cross) const {
    const int fine = len_ * kUpsample;
    std::vector<cd> spectrum(fine, 0.0);
    for (int f = 0; f < len_; ++f) {
      const double mag = std::abs(cross[f]);
      const cd value = mag > 0.0 ? cross[f] / std::pow(mag, kWhitening) : cd(0.0);
      if (f < len_ / 2) {
        spectrum[f] = value;
      } else if (f > len_ / 2) {
        spectrum[fine - (len_ - f)] = value;
      } else {
        spectrum[f] = 0.5 * value;
        spectrum[fine - len_ / 2] = 0.5 * value;
      }
    }
    fft_rows(spectrum, fine, 1, true);

    const int max_lag = std::max(1, w_ / 4) * kUpsample;
    auto corr = [&](int lag) {
      return spectrum[static_cast<std::size_t>((lag % fine + fine) % fine)].real();
    };
    int best = 0;
    double best_value = corr(0);
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
      const double v = corr(lag);
      if (v > best_value) {
        best_value = v;
        best = lag;
      }
    }
    const double left = corr(best - 1), centre = corr(best), right = corr(best + 1);
    const double denom = left - 2.0 * centre + right;
    double offset = 0.0;
    if (denom < 0.0) offset = 0.5 * (left - right) / denom;
    return (best + std::clamp(offset, -0.5, 0.5)) / kUpsample;
  }

  const Image& luma_;
  int w_;
  int len_;
  std::vector<int> rows_;
  std::vector<cd> reference_;
};

}  // namespace

InterlaceReport detect_interlacing(const Image& image, double threshold) {
  if (image.height() < 4) throw ContractError("interlace detection needs height >= 4");
  const Image luma = luminance(image);

  // Odd rows against their even neighbours see +shift plus a content term
  // from vertical curvature; even rows against their odd neighbours see
  // -shift plus the same content term. Half the difference cancels it.
  const FieldRegistration odd(luma, 1);
  const FieldRegistration even(luma, 0);
  InterlaceReport report;
  report.shift = 0.5 * (odd.estimate() - even.estimate());
  report.interlaced = std::abs(report.shift) > threshold;
  return report;
}

Image deinterlace(const Image& image) {
  Image out = image;
  const int h = image.height();
  for (int y = 1; y < h; y += 2) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < image.channels(); ++c) {
        out.at(x, y, c) = y + 1 < h ? 0.5 * (image.at(x, y - 1, c) + image.at(x, y + 1, c))
                                    : image.at(x, y - 1, c);
      }
    }
  }
  return out;
}

}  // namespace restorebench
