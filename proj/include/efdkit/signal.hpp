#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "efdkit/errors.hpp"

namespace efdkit {

// Uniformly sampled, finite, non-empty real time series.
class Signal {
 public:
  Signal(std::vector<double> samples, double sample_rate_hz)
      : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
    if (samples_.empty()) throw InvalidInput("signal is empty");
    if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
      throw InvalidInput("sample rate must be positive and finite");
    for (double v : samples_)
      if (!std::isfinite(v)) throw InvalidInput("signal contains a non-finite sample");
  }

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& values() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  double dt() const noexcept { return 1.0 / sample_rate_hz_; }
  double time(std::size_t r) const noexcept { return static_cast<double>(r) / sample_rate_hz_; }
  double operator[](std::size_t r) const noexcept { return samples_[r]; }

 private:
  std::vector<double> samples_;
  double sample_rate_hz_;
};

}  // namespace efdkit
