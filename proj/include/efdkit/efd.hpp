#pragma once

// Empirical Fourier decomposition: improved segmentation + ideal (0/1) filter bank.

#include <cmath>
#include <cstddef>
#include <vector>

#include "efdkit/errors.hpp"
#include "efdkit/modes.hpp"
#include "efdkit/segmentation.hpp"
#include "efdkit/signal.hpp"
#include "efdkit/spectral.hpp"

namespace efdkit {

struct BinRange {
  std::size_t lo = 0;  // first bin
  std::size_t hi = 0;  // one past the last bin

  std::size_t size() const noexcept { return hi - lo; }
  bool contains(std::size_t k) const noexcept { return k >= lo && k < hi; }
  bool operator==(const BinRange&) const = default;
};

struct IdealFilterBank {
  std::vector<BinRange> bands;
  std::size_t spectrum_bins = 0;
  std::size_t transform_length = 0;

  // Bins claimed by no band (outside [w_0, w_N]).
  std::vector<std::size_t> uncovered_bins() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < spectrum_bins; ++k) {
      bool hit = false;
      for (const auto& b : bands) hit = hit || b.contains(k);
      if (!hit) out.push_back(k);
    }
    return out;
  }
};

namespace detail {

// First bin whose frequency is >= w (with a little slack for boundaries that
// were themselves computed from bin frequencies of another length).
inline std::size_t first_bin_at_or_above(double w, std::size_t transform_length) {
  const double pos = w * static_cast<double>(transform_length) / (2.0 * kPi);
  const double c = std::ceil(pos - 1e-9);
  return c <= 0.0 ? 0 : static_cast<std::size_t>(c);
}

}  // namespace detail

// Band n holds the bins with w_{n-1} <= w_k < w_n; the last band also takes w_N.
// `transform_length` is the DFT length whose bins are being masked.
inline IdealFilterBank build_ideal_bank(const Segmentation& seg, std::size_t spectrum_bins,
                                        std::size_t transform_length = 0) {
  seg.validate();
  if (spectrum_bins == 0) throw InvalidInput("spectrum must have at least one bin");
  if (transform_length == 0) transform_length = 2 * (spectrum_bins - 1);
  if (transform_length == 0) transform_length = 1;
  if (half_spectrum_size(transform_length) != spectrum_bins)
    throw InvalidInput("spectrum bin count does not match the transform length");

  IdealFilterBank bank;
  bank.spectrum_bins = spectrum_bins;
  bank.transform_length = transform_length;
  const auto& w = seg.boundaries;
  const std::size_t n = seg.segment_count();
  for (std::size_t i = 0; i < n; ++i) {
    BinRange r;
    r.lo = std::min(detail::first_bin_at_or_above(w[i], transform_length), spectrum_bins);
    if (i + 1 < n) {
      r.hi = std::min(detail::first_bin_at_or_above(w[i + 1], transform_length), spectrum_bins);
    } else {
      // Right-closed: everything up to and including w_N.
      const double pos = w[i + 1] * static_cast<double>(transform_length) / (2.0 * kPi);
      const double f = std::floor(pos + 1e-9);
      r.hi = std::min(static_cast<std::size_t>(std::max(f, -1.0) + 1.0), spectrum_bins);
    }
    if (r.hi <= r.lo) throw EmptyBand(i);
    bank.bands.push_back(r);
  }
  return bank;
}

inline ModeSet efd_decompose(const Signal& signal, const Segmentation& seg,
                             BoundaryMode boundary = BoundaryMode::Periodic) {
  const FilterPlane plane(signal.samples(), boundary);
  const IdealFilterBank bank = build_ideal_bank(seg, plane.bins(), plane.transform_length());
  ModeSet out;
  out.method = Method::Efd;
  out.segmentation = seg;
  for (const BinRange& b : bank.bands)
    out.modes.emplace_back(plane.apply_mask(b.lo, b.hi), signal.sample_rate_hz());
  // Residual straight from the uncovered bins, so modes + residual == input is
  // a real check rather than an identity.
  const std::size_t lo = bank.bands.front().lo, hi = bank.bands.back().hi;
  if (lo == 0 && hi == plane.bins()) {
    out.residual.assign(signal.size(), 0.0);
  } else {
    std::vector<double> keep(plane.bins(), 0.0);
    for (std::size_t k = 0; k < keep.size(); ++k) keep[k] = (k < lo || k >= hi) ? 1.0 : 0.0;
    out.residual = plane.apply(keep);
  }
  return out;
}

inline ModeSet efd_decompose(const Signal& signal, std::size_t n_modes,
                             BoundaryMode boundary = BoundaryMode::Periodic) {
  if (n_modes == 0) throw InvalidInput("number of modes must be positive");
  const auto profile = MagnitudeProfile::from_spectrum(forward_spectrum(signal));
  return efd_decompose(signal, segment_improved(profile, n_modes), boundary);
}

}  // namespace efdkit
