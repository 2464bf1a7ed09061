#pragma once

#include <cmath>
#include <stdexcept>

namespace fbmq {

// Hurst index of fractional Brownian motion, restricted to the open interval (0,1).
class HurstParam {
 public:
  explicit HurstParam(double value) : h_(value) {
    if (!std::isfinite(value) || value <= 0.0 || value >= 1.0) {
      throw std::invalid_argument("HurstParam: H must lie in (0,1)");
    }
  }
  double value() const noexcept { return h_; }
  bool is_brownian() const noexcept { return h_ == 0.5; }

  friend bool operator==(HurstParam a, HurstParam b) noexcept { return a.h_ == b.h_; }

 private:
  double h_;
};

}  // namespace fbmq
