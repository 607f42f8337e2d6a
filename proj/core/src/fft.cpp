#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <new>

namespace gwshm::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  out_ = fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1));
  if (in_ == nullptr || out_ == nullptr) {
    fftw_free(in_);
    fftw_free(out_);
    throw std::bad_alloc();
  }
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, static_cast<fftw_complex*>(out_),
                               FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
  fftw_free(in_);
  fftw_free(out_);
}

std::span<const std::complex<double>> RealFft::execute() {
  fftw_execute(static_cast<fftw_plan>(plan_));
  // fftw_complex is layout-compatible with std::complex<double>.
  return {reinterpret_cast<const std::complex<double>*>(out_), n_ / 2 + 1};
}

RealFft& RealFft::cached(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<RealFft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealFft>(n);
  return *slot;
}

}  // namespace gwshm::detail
