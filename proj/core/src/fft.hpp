#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace gwshm::detail {

/// Real-to-complex forward DFT of length n backed by FFTW.
///
/// Plans are cached per length and per thread; plan creation is serialised
/// because the FFTW planner is not reentrant. Execution is thread-safe.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  /// Input buffer of n reals, owned by this object.
  std::span<double> input() { return {in_, n_}; }
  /// Runs the transform and returns the n/2 + 1 non-negative frequency bins.
  std::span<const std::complex<double>> execute();

  /// Per-thread cached instance for length n.
  static RealFft& cached(std::size_t n);

 private:
  std::size_t n_;
  double* in_ = nullptr;
  void* out_ = nullptr;   // fftw_complex*
  void* plan_ = nullptr;  // fftw_plan
};

}  // namespace gwshm::detail
