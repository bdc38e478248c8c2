#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "efdkit/errors.hpp"
#include "efdkit/segmentation.hpp"
#include "efdkit/signal.hpp"
#include "efdkit/spectral.hpp"

namespace efdkit {

enum class Method { Efd, EwtMaxima, EwtMinima, FdmLth, FdmHtl };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Efd: return "efd";
    case Method::EwtMaxima: return "ewt-maxima";
    case Method::EwtMinima: return "ewt-minima";
    case Method::FdmLth: return "fdm-lth";
    case Method::FdmHtl: return "fdm-htl";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::Efd, Method::EwtMaxima, Method::EwtMinima, Method::FdmLth, Method::FdmHtl})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

// How the spectral filters see the signal ends.
//   Periodic: filter the plain length-R DFT (the signal is treated as one period).
//   Mirror:   filter a half-sample symmetric extension and crop back, which keeps
//             trends and non-periodic ends from wrapping into a sawtooth.
// Segmentation is always computed on the plain spectrum.
enum class BoundaryMode { Periodic, Mirror };

inline std::string_view to_string(BoundaryMode b) {
  return b == BoundaryMode::Periodic ? "periodic" : "mirror";
}

struct ModeSet {
  std::vector<Signal> modes;  // ascending frequency bands
  Method method = Method::Efd;
  std::optional<Segmentation> segmentation;
  // Content of the input not carried by any mode: input - sum(modes).
  std::vector<double> residual;

  std::size_t size() const noexcept { return modes.size(); }
  std::size_t length() const noexcept { return residual.size(); }

  std::vector<double> mode_sum() const {
    std::vector<double> s(residual.size(), 0.0);
    for (const Signal& m : modes)
      for (std::size_t r = 0; r < s.size(); ++r) s[r] += m[r];
    return s;
  }

  std::vector<double> reconstruction() const {
    auto s = mode_sum();
    for (std::size_t r = 0; r < s.size(); ++r) s[r] += residual[r];
    return s;
  }

  // sqrt(sum residual^2 / sum input^2), with input = sum(modes) + residual.
  double relative_residual() const {
    double num = 0.0, den = 0.0;
    const auto full = reconstruction();
    for (std::size_t r = 0; r < full.size(); ++r) {
      num += residual[r] * residual[r];
      den += full[r] * full[r];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  }
};

namespace detail {

inline std::vector<double> subtract_sum(std::span<const double> input, const std::vector<Signal>& modes) {
  std::vector<double> res(input.begin(), input.end());
  for (const Signal& m : modes)
    for (std::size_t r = 0; r < res.size(); ++r) res[r] -= m[r];
  return res;
}

}  // namespace detail

// Spectrum of the signal as seen by the filters, plus the crop that maps a
// filtered transform-length signal back onto the input samples.
class FilterPlane {
 public:
  FilterPlane(std::span<const double> samples, BoundaryMode mode) : length_(samples.size()) {
    if (mode == BoundaryMode::Mirror) {
      auto ext = mirror_extend(samples);
      offset_ = ext.offset;
      spectrum_ = forward_spectrum(ext.samples);
    } else {
      spectrum_ = forward_spectrum(samples);
    }
  }

  const Spectrum& spectrum() const noexcept { return spectrum_; }
  std::size_t transform_length() const noexcept { return spectrum_.source_length; }
  std::size_t bins() const noexcept { return spectrum_.size(); }

  // Multiply the half spectrum by a real per-bin response, invert, crop.
  std::vector<double> apply(std::span<const double> response) const {
    if (response.size() != spectrum_.size()) throw InvalidInput("response length does not match the spectrum");
    Spectrum s = spectrum_;
    for (std::size_t k = 0; k < s.bins.size(); ++k) s.bins[k] *= response[k];
    return crop(inverse_spectrum(std::move(s)));
  }

  // Keep bins [lo, hi) only.
  std::vector<double> apply_mask(std::size_t lo, std::size_t hi) const {
    Spectrum s;
    s.source_length = spectrum_.source_length;
    s.bins.assign(spectrum_.size(), cplx{});
    for (std::size_t k = lo; k < hi && k < s.bins.size(); ++k) s.bins[k] = spectrum_.bins[k];
    return crop(inverse_spectrum(std::move(s)));
  }

 private:
  std::vector<double> crop(std::vector<double> x) const {
    if (x.size() == length_) return x;
    x.erase(x.begin() + static_cast<std::ptrdiff_t>(offset_ + length_), x.end());
    x.erase(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(offset_));
    return x;
  }

  std::size_t length_;
  std::size_t offset_ = 0;
  Spectrum spectrum_;
};

}  // namespace efdkit
