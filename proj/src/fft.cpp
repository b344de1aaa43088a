#include "conewave/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <stdexcept>

namespace conewave {

namespace {
std::mutex& planner_mutex() {
  static std::mutex mutex;
  return mutex;
}
}  // namespace

FftPlan::FftPlan(std::vector<int> shape, bool forward) : shape_(std::move(shape)) {
  if (shape_.empty()) shape_.push_back(1);
  size_ = 1;
  for (int s : shape_) {
    if (s < 1) throw std::invalid_argument("FFT shape entries must be positive");
    size_ *= static_cast<std::size_t>(s);
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  data_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * size_));
  if (!data_) throw std::bad_alloc();
  auto* buf = reinterpret_cast<fftw_complex*>(data_);
  plan_ = fftw_plan_dft(static_cast<int>(shape_.size()), shape_.data(), buf, buf,
                        forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plan_) {
    fftw_free(data_);
    throw std::runtime_error("FFTW plan creation failed");
  }
}

FftPlan::~FftPlan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  if (data_) fftw_free(data_);
}

void FftPlan::execute() { fftw_execute(static_cast<fftw_plan>(plan_)); }

}  // namespace conewave
