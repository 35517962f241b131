#include "restorebench/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "restorebench/error.hpp"

namespace restorebench {

namespace {

// FFTW's planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plan {
  fftw_plan handle = nullptr;
  ~Plan() {
    if (handle != nullptr) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(handle);
    }
  }
};

fftw_complex* as_fftw(std::vector<std::complex<double>>& data) {
  return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

void fft2d(std::vector<std::complex<double>>& data, int width, int height, bool inverse) {
  if (data.size() != static_cast<std::size_t>(width) * height) {
    throw ContractError("fft2d buffer size mismatch");
  }
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.handle = fftw_plan_dft_2d(height, width, as_fftw(data), as_fftw(data),
                                   inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (plan.handle == nullptr) throw Error("FFTW planning failed");
  fftw_execute(plan.handle);
}

void fft_rows(std::vector<std::complex<double>>& data, int length, int rows, bool inverse) {
  if (data.size() != static_cast<std::size_t>(length) * rows) {
    throw ContractError("fft_rows buffer size mismatch");
  }
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    int n[] = {length};
    plan.handle = fftw_plan_many_dft(1, n, rows, as_fftw(data), nullptr, 1, length,
                                     as_fftw(data), nullptr, 1, length,
                                     inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (plan.handle == nullptr) throw Error("FFTW planning failed");
  fftw_execute(plan.handle);
}

}  // namespace restorebench
