#pragma once

// Spectrum segmentation: local maxima, lowest minima, and the improved
// technique with adaptive sorting (endpoints join the candidate set, so the
// first/last boundary may move inward from 0 and pi).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "efdkit/errors.hpp"
#include "efdkit/spectral.hpp"

namespace efdkit {

enum class SegmentationTechnique { LocalMaxima, LowestMinima, ImprovedAdaptive };

inline std::string_view to_string(SegmentationTechnique t) {
  switch (t) {
    case SegmentationTechnique::LocalMaxima: return "local_maxima";
    case SegmentationTechnique::LowestMinima: return "lowest_minima";
    case SegmentationTechnique::ImprovedAdaptive: return "improved_adaptive";
  }
  return "unknown";
}

// Half-spectrum magnitudes |X[k]|, k = 0..floor(R/2), of a length-R signal.
struct MagnitudeProfile {
  std::vector<double> magnitudes;
  std::size_t source_length = 0;

  static MagnitudeProfile from_spectrum(const Spectrum& spectrum) {
    MagnitudeProfile p;
    p.source_length = spectrum.source_length;
    p.magnitudes.reserve(spectrum.size());
    for (const cplx& b : spectrum.bins) p.magnitudes.push_back(std::abs(b));
    return p;
  }

  static MagnitudeProfile from_signal(std::span<const double> samples) {
    return from_spectrum(forward_spectrum(samples));
  }

  std::size_t last_bin() const noexcept { return magnitudes.size() - 1; }
  double omega(double bin) const { return 2.0 * kPi * bin / static_cast<double>(source_length); }

  void validate() const {
    if (magnitudes.empty()) throw InvalidInput("magnitude profile is empty");
    if (source_length == 0 || magnitudes.size() != half_spectrum_size(source_length))
      throw InvalidInput("magnitude profile length does not match its source length");
    for (double m : magnitudes)
      if (!std::isfinite(m) || m < 0.0)
        throw InvalidInput("magnitudes must be finite and non-negative");
  }
};

struct Segmentation {
  std::vector<double> boundaries;  // normalized angular frequency, strictly increasing
  SegmentationTechnique technique = SegmentationTechnique::LocalMaxima;

  std::size_t segment_count() const noexcept {
    return boundaries.empty() ? 0 : boundaries.size() - 1;
  }

  std::vector<double> boundaries_hz(double sample_rate_hz) const {
    std::vector<double> hz;
    hz.reserve(boundaries.size());
    for (double w : boundaries) hz.push_back(w * sample_rate_hz / (2.0 * kPi));
    return hz;
  }

  void validate() const {
    if (boundaries.size() < 2) throw InvalidSegmentation("a segmentation needs at least two boundaries");
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
      const double w = boundaries[i];
      if (!(w >= 0.0 && w <= kPi)) throw InvalidSegmentation("boundary outside [0, pi]");
      if (i > 0 && !(w > boundaries[i - 1]))
        throw InvalidSegmentation("boundaries must be strictly increasing");
    }
    if (technique != SegmentationTechnique::ImprovedAdaptive &&
        (boundaries.front() != 0.0 || boundaries.back() != kPi))
      throw InvalidSegmentation("local-maxima/lowest-minima segmentations span [0, pi]");
  }
};

// Bins strictly above both neighbours; a plateau that is higher than both of
// its flanks counts once, at its lowest index. Bins 0 and K never qualify.
inline std::vector<std::size_t> local_maxima(std::span<const double> m) {
  std::vector<std::size_t> peaks;
  const std::size_t n = m.size();
  std::size_t k = 1;
  while (k + 1 < n) {
    if (m[k] > m[k - 1]) {
      std::size_t j = k;
      while (j + 1 < n && m[j + 1] == m[k]) ++j;
      if (j + 1 < n && m[j + 1] < m[k]) peaks.push_back(k);
      k = j + 1;
    } else {
      ++k;
    }
  }
  return peaks;
}

namespace detail {

// The `count` largest candidates, ties toward lower frequency, returned ascending.
inline std::vector<std::size_t> largest_ascending(std::vector<std::size_t> candidates,
                                                  std::span<const double> m, std::size_t count) {
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    if (m[a] != m[b]) return m[a] > m[b];
    return a < b;
  });
  candidates.resize(std::min(count, candidates.size()));
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

// Lowest-index minimizer over bins [lo, hi].
inline std::size_t argmin_bins(std::span<const double> m, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t k = lo + 1; k <= hi; ++k)
    if (m[k] < m[best]) best = k;
  return best;
}

inline std::vector<std::size_t> top_peaks(const MagnitudeProfile& profile, std::size_t n_segments) {
  profile.validate();
  if (n_segments == 0) throw InvalidInput("number of segments must be positive");
  const auto peaks = local_maxima(profile.magnitudes);
  if (peaks.size() + 1 < n_segments) throw SegmentationInfeasible(peaks.size(), n_segments - 1);
  return largest_ascending(peaks, profile.magnitudes, n_segments - 1);
}

}  // namespace detail

// omega_n = midpoint of consecutive retained peaks, with Omega_0 = 0.
inline Segmentation segment_local_maxima(const MagnitudeProfile& profile, std::size_t n_segments) {
  const auto peaks = detail::top_peaks(profile, n_segments);
  Segmentation seg{{0.0}, SegmentationTechnique::LocalMaxima};
  std::size_t prev = 0;
  for (std::size_t p : peaks) {
    seg.boundaries.push_back(profile.omega(0.5 * static_cast<double>(prev + p)));
    prev = p;
  }
  seg.boundaries.push_back(kPi);
  seg.validate();
  return seg;
}

// omega_n = lowest magnitude strictly between consecutive retained peaks
// (Omega_0 = 0). When two are adjacent bins, their midpoint is used.
inline Segmentation segment_lowest_minima(const MagnitudeProfile& profile, std::size_t n_segments) {
  const auto peaks = detail::top_peaks(profile, n_segments);
  const auto& m = profile.magnitudes;
  Segmentation seg{{0.0}, SegmentationTechnique::LowestMinima};
  std::size_t prev = 0;
  for (std::size_t p : peaks) {
    if (p > prev + 1)
      seg.boundaries.push_back(profile.omega(static_cast<double>(detail::argmin_bins(m, prev + 1, p - 1))));
    else
      seg.boundaries.push_back(profile.omega(0.5 * static_cast<double>(prev + p)));
    prev = p;
  }
  seg.boundaries.push_back(kPi);
  seg.validate();
  return seg;
}

// Improved segmentation: candidates are bin 0, bin K and every local maximum;
// the N largest become Omega_1..Omega_N (ascending) and Omega_0 = 0,
// Omega_{N+1} = K are appended. omega_n is the argmin on [Omega_n, Omega_{n+1}],
// or Omega_n itself when the two coincide. Returns N+1 boundaries.
inline Segmentation segment_improved(const MagnitudeProfile& profile, std::size_t n_segments) {
  profile.validate();
  if (n_segments == 0) throw InvalidInput("number of segments must be positive");
  const auto& m = profile.magnitudes;
  const std::size_t last = profile.last_bin();

  std::vector<std::size_t> candidates{0};
  for (std::size_t p : local_maxima(m)) candidates.push_back(p);
  if (last != 0) candidates.push_back(last);
  if (candidates.size() < n_segments) throw SegmentationInfeasible(candidates.size(), n_segments);

  std::vector<std::size_t> omega_cap{0};
  for (std::size_t c : detail::largest_ascending(candidates, m, n_segments)) omega_cap.push_back(c);
  omega_cap.push_back(last);

  Segmentation seg{{}, SegmentationTechnique::ImprovedAdaptive};
  std::vector<std::size_t> bins;
  for (std::size_t n = 0; n <= n_segments; ++n) {
    std::size_t lo = omega_cap[n];
    std::size_t hi = omega_cap[n + 1];
    std::size_t b = lo;
    if (lo != hi) {
      // Keep boundaries strictly increasing when a selected endpoint (bin 0 or
      // K) coincides with Omega_0 / Omega_{N+1}: search above the previous
      // boundary, and below an upper pair that will itself become a boundary.
      if (!bins.empty()) lo = std::max(lo, bins.back() + 1);
      if (n + 2 < omega_cap.size() && omega_cap[n + 1] == omega_cap[n + 2] && hi > lo) --hi;
      if (lo > hi) throw InvalidSegmentation("improved segmentation collapsed two boundaries");
      b = detail::argmin_bins(m, lo, hi);
    }
    if (!bins.empty() && b <= bins.back())
      throw InvalidSegmentation("improved segmentation collapsed two boundaries");
    bins.push_back(b);
  }
  for (std::size_t b : bins) seg.boundaries.push_back(profile.omega(static_cast<double>(b)));
  seg.validate();
  return seg;
}

inline Segmentation segment(const MagnitudeProfile& profile, std::size_t n_segments,
                            SegmentationTechnique technique) {
  switch (technique) {
    case SegmentationTechnique::LocalMaxima: return segment_local_maxima(profile, n_segments);
    case SegmentationTechnique::LowestMinima: return segment_lowest_minima(profile, n_segments);
    case SegmentationTechnique::ImprovedAdaptive: return segment_improved(profile, n_segments);
  }
  throw InvalidInput("unknown segmentation technique");
}

}  // namespace efdkit
