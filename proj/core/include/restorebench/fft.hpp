#pragma once

#include <complex>
#include <vector>

namespace restorebench {

// Thin wrapper over FFTW's double-precision complex transforms. Data is
// row-major height x width. The inverse is unnormalised (divide by w*h).
void fft2d(std::vector<std::complex<double>>& data, int width, int height, bool inverse);

// `rows` independent 1D transforms of length `length` over contiguous rows.
void fft_rows(std::vector<std::complex<double>>& data, int length, int rows, bool inverse);

}  // namespace restorebench
