#pragma once

// Empirical wavelet transform: Meyer-type filter bank over a segmentation,
// applied once per band in the frequency domain.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "efdkit/errors.hpp"
#include "efdkit/modes.hpp"
#include "efdkit/segmentation.hpp"
#include "efdkit/signal.hpp"
#include "efdkit/spectral.hpp"

namespace efdkit {

inline double beta(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double x2 = x * x;
  return x2 * x2 * (35.0 - 84.0 * x + 70.0 * x2 - 20.0 * x2 * x);
}

// gamma = ((R-1)/R) * min_n (w_{n+1} - w_n) / (w_{n+1} + w_n)
inline double compute_gamma(const Segmentation& seg, std::size_t signal_length) {
  if (seg.boundaries.size() < 2) throw InvalidSegmentation("a segmentation needs at least two boundaries");
  if (signal_length < 2) throw InvalidInput("signal length must be at least 2");
  double ratio = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 1 < seg.boundaries.size(); ++n) {
    const double lo = seg.boundaries[n], hi = seg.boundaries[n + 1];
    if (!(hi > lo)) throw InvalidSegmentation("adjacent boundaries coincide");
    ratio = std::min(ratio, (hi - lo) / (hi + lo));
  }
  const double r = static_cast<double>(signal_length);
  return (r - 1.0) / r * ratio;
}

struct EwtFilterBank {
  std::vector<double> scaling_response;                 // phi_1 per bin
  std::vector<std::vector<double>> wavelet_responses;   // psi_1..psi_{N-1} per bin
  double gamma = 0.0;
  std::vector<double> taus;                             // tau_n = gamma * w_n
  std::size_t transform_length = 0;

  std::size_t filter_count() const noexcept { return 1 + wavelet_responses.size(); }

  const std::vector<double>& response(std::size_t i) const {
    return i == 0 ? scaling_response : wavelet_responses.at(i - 1);
  }

  // |phi_1|^2 + sum |psi_n|^2 at each bin.
  std::vector<double> squared_sum() const {
    std::vector<double> s(scaling_response.size(), 0.0);
    for (std::size_t i = 0; i < filter_count(); ++i) {
      const auto& h = response(i);
      for (std::size_t k = 0; k < s.size(); ++k) s[k] += h[k] * h[k];
    }
    return s;
  }
};

namespace detail {

// Response of filter i (0 = scaling) at frequency w. Filter i covers
// [w_i, w_{i+1}] with Meyer transitions of half-width tau at each internal
// boundary; the filter that owns the top segment has no upper transition.
inline double ewt_response(const std::vector<double>& w, const std::vector<double>& tau,
                           std::size_t i, std::size_t n_filters, double omega) {
  const double half_pi = kPi / 2.0;
  if (i > 0) {
    const double wl = w[i], tl = tau[i];
    if (omega >= wl - tl && omega <= wl + tl) return std::sin(half_pi * beta((tl + omega - wl) / (2.0 * tl)));
    if (omega < wl - tl) return 0.0;
  }
  if (i + 1 < n_filters) {
    const double wu = w[i + 1], tu = tau[i + 1];
    if (omega >= wu - tu && omega <= wu + tu) return std::cos(half_pi * beta((tu + omega - wu) / (2.0 * tu)));
    if (omega > wu + tu) return 0.0;
  }
  return 1.0;
}

}  // namespace detail

// Filter responses sampled on the half-spectrum bins of a length
// `transform_length` DFT (defaults to the signal length). gamma always uses
// the signal length.
inline EwtFilterBank build_filter_bank(const Segmentation& seg, std::size_t signal_length,
                                       std::size_t transform_length = 0) {
  seg.validate();
  if (transform_length == 0) transform_length = signal_length;
  const double gamma = compute_gamma(seg, signal_length);
  const std::size_t n_filters = seg.segment_count();

  EwtFilterBank bank;
  bank.gamma = gamma;
  bank.transform_length = transform_length;
  for (double w : seg.boundaries) bank.taus.push_back(gamma * w);

  const std::size_t bins = half_spectrum_size(transform_length);
  std::vector<std::vector<double>> responses(n_filters, std::vector<double>(bins));
  for (std::size_t k = 0; k < bins; ++k) {
    const double omega = bin_omega(k, transform_length);
    for (std::size_t i = 0; i < n_filters; ++i)
      responses[i][k] = detail::ewt_response(seg.boundaries, bank.taus, i, n_filters, omega);
  }
  bank.scaling_response = std::move(responses.front());
  bank.wavelet_responses.assign(std::make_move_iterator(responses.begin() + 1),
                                std::make_move_iterator(responses.end()));
  return bank;
}

inline ModeSet ewt_decompose(const Signal& signal, const Segmentation& seg,
                             BoundaryMode boundary = BoundaryMode::Periodic) {
  const FilterPlane plane(signal.samples(), boundary);
  const EwtFilterBank bank = build_filter_bank(seg, signal.size(), plane.transform_length());

  ModeSet out;
  out.method = seg.technique == SegmentationTechnique::LocalMaxima ? Method::EwtMaxima : Method::EwtMinima;
  out.segmentation = seg;
  for (std::size_t i = 0; i < bank.filter_count(); ++i)
    out.modes.emplace_back(plane.apply(bank.response(i)), signal.sample_rate_hz());
  out.residual = detail::subtract_sum(signal.samples(), out.modes);
  return out;
}

// Segment the plain spectrum with `technique` and decompose into n_modes modes.
inline ModeSet ewt_decompose(const Signal& signal, std::size_t n_modes, SegmentationTechnique technique,
                             BoundaryMode boundary = BoundaryMode::Periodic) {
  if (technique == SegmentationTechnique::ImprovedAdaptive)
    throw InvalidInput("EWT uses local-maxima or lowest-minima segmentation");
  const auto profile = MagnitudeProfile::from_spectrum(forward_spectrum(signal));
  return ewt_decompose(signal, segment(profile, n_modes, technique), boundary);
}

}  // namespace efdkit
