#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace conewave {

// Multi-dimensional complex DFT over an owned, SIMD-aligned buffer.
// forward: X_k = sum_j x_j e^{-2 pi i jk/N}; backward uses e^{+2 pi i jk/N}, unnormalized.
// Plan creation is serialized internally; execution on distinct plans is thread-safe.
class FftPlan {
 public:
  FftPlan(std::vector<int> shape, bool forward);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::complex<double>* data() { return data_; }
  std::size_t size() const { return size_; }
  const std::vector<int>& shape() const { return shape_; }
  void execute();

 private:
  std::vector<int> shape_;
  std::size_t size_ = 0;
  std::complex<double>* data_ = nullptr;
  void* plan_ = nullptr;
};

}  // namespace conewave
