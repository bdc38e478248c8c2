#pragma once

// Instantaneous amplitude/frequency tracks and a nearest-bin raster of them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "efdkit/decompose.hpp"
#include "efdkit/errors.hpp"
#include "efdkit/fdm.hpp"
#include "efdkit/modes.hpp"
#include "efdkit/signal.hpp"
#include "efdkit/spectral.hpp"

namespace efdkit {

inline constexpr double kDegenerateAmplitude = 1e-12;

struct TfrTrack {
  std::vector<double> time;
  std::vector<double> inst_amplitude;
  std::vector<double> inst_frequency_hz;
  std::vector<bool> degenerate;  // amplitude below kDegenerateAmplitude; IF forced to 0

  std::size_t size() const noexcept { return time.size(); }
};

// Amplitude |z|; IF = central difference of the unwrapped phase / (2 pi dt),
// one-sided at the ends.
inline TfrTrack track_from_analytic(std::span<const cplx> z, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0)) throw InvalidInput("sample rate must be positive");
  const std::size_t n = z.size();
  TfrTrack t;
  t.time.resize(n);
  t.inst_amplitude.resize(n);
  t.inst_frequency_hz.assign(n, 0.0);
  t.degenerate.assign(n, false);
  const auto phase = unwrap_phase(z);
  const double k = sample_rate_hz / (2.0 * kPi);
  for (std::size_t r = 0; r < n; ++r) {
    t.time[r] = static_cast<double>(r) / sample_rate_hz;
    t.inst_amplitude[r] = std::abs(z[r]);
    if (t.inst_amplitude[r] < kDegenerateAmplitude) {
      t.degenerate[r] = true;
      continue;
    }
    if (n < 2) continue;
    if (r == 0) t.inst_frequency_hz[r] = (phase[1] - phase[0]) * k;
    else if (r + 1 == n) t.inst_frequency_hz[r] = (phase[r] - phase[r - 1]) * k;
    else t.inst_frequency_hz[r] = 0.5 * (phase[r + 1] - phase[r - 1]) * k;
  }
  return t;
}

inline TfrTrack mode_tfr(const Signal& mode) {
  return track_from_analytic(analytic_signal(mode), mode.sample_rate_hz());
}

inline std::vector<TfrTrack> mode_tfr(const ModeSet& modes) {
  std::vector<TfrTrack> out;
  for (const Signal& m : modes.modes) out.push_back(mode_tfr(m));
  return out;
}

// Tracks of ground-truth components.
inline std::vector<TfrTrack> benchmark_tfr(const std::vector<Signal>& components) {
  return mode_tfr(ModeSet{components, Method::Efd, std::nullopt, {}});
}

// FDM tracks come straight from each band's analytic signal, ascending bands.
inline std::vector<TfrTrack> fdm_tfr(const FibfSet& set, double sample_rate_hz) {
  std::vector<FibfBand> bands = set.bands;
  std::sort(bands.begin(), bands.end(), [](const FibfBand& x, const FibfBand& y) { return x.lo < y.lo; });
  std::vector<TfrTrack> out;
  for (const auto& b : bands) {
    const auto z = band_analytic(set.coefficients, b.lo, b.hi).values;
    out.push_back(track_from_analytic(z, sample_rate_hz));
  }
  return out;
}

// Tracks for a decomposition run: FDM from its band analytic signals, the
// filter-bank methods from the modes.
inline std::vector<TfrTrack> method_tfr(const Signal& signal, const DecomposeOptions& opt) {
  if (opt.method == Method::FdmLth) return fdm_tfr(fdm_lth(signal, opt.tol_if), signal.sample_rate_hz());
  if (opt.method == Method::FdmHtl) return fdm_tfr(fdm_htl(signal, opt.tol_if), signal.sample_rate_hz());
  return mode_tfr(decompose(signal, opt));
}

// Uniform grid start, start+step, ..., inclusive of `stop` (within rounding).
inline std::vector<double> uniform_axis(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) throw InvalidInput("invalid axis specification");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i) axis[i] = start + step * static_cast<double>(i);
  return axis;
}

struct TfrRaster {
  std::vector<double> time_axis;
  std::vector<double> freq_axis;
  std::vector<double> magnitude;  // row-major: time x frequency
  std::size_t clipped = 0;         // deposits that fell outside freq_axis
  double clipped_mass = 0.0;

  double at(std::size_t t, std::size_t f) const { return magnitude[t * freq_axis.size() + f]; }
  double total_mass() const {
    double s = 0.0;
    for (double v : magnitude) s += v;
    return s;
  }
};

namespace detail {

inline std::size_t nearest_index(const std::vector<double>& axis, double x) {
  auto it = std::lower_bound(axis.begin(), axis.end(), x);
  if (it == axis.begin()) return 0;
  if (it == axis.end()) return axis.size() - 1;
  const auto hi = static_cast<std::size_t>(it - axis.begin());
  // Ties go to the lower bin.
  return (x - axis[hi - 1] <= axis[hi] - x) ? hi - 1 : hi;
}

}  // namespace detail

// Each track deposits its amplitude at the frequency bin nearest its IF, per
// time step; overlapping deposits add. Out-of-range IF goes to the edge bin
// and is counted in `clipped`.
inline TfrRaster raster_tfr(const std::vector<TfrTrack>& tracks, const std::vector<double>& freq_axis) {
  if (freq_axis.empty()) throw InvalidInput("frequency axis is empty");
  for (std::size_t i = 1; i < freq_axis.size(); ++i)
    if (!(freq_axis[i] > freq_axis[i - 1])) throw InvalidInput("frequency axis must be increasing");
  TfrRaster r;
  r.freq_axis = freq_axis;
  if (tracks.empty()) return r;
  r.time_axis = tracks.front().time;
  for (const auto& t : tracks)
    if (t.size() != r.time_axis.size()) throw InvalidInput("tracks must share a time axis");
  const std::size_t nf = freq_axis.size();
  const double half_step_lo = nf > 1 ? 0.5 * (freq_axis[1] - freq_axis[0]) : 0.0;
  const double half_step_hi = nf > 1 ? 0.5 * (freq_axis[nf - 1] - freq_axis[nf - 2]) : 0.0;
  r.magnitude.assign(r.time_axis.size() * nf, 0.0);
  for (const auto& t : tracks) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double f = t.inst_frequency_hz[i];
      const double a = t.inst_amplitude[i];
      if (f < freq_axis.front() - half_step_lo || f > freq_axis.back() + half_step_hi) {
        ++r.clipped;
        r.clipped_mass += a;
      }
      r.magnitude[i * nf + detail::nearest_index(freq_axis, f)] += a;
    }
  }
  return r;
}

// RMSE over all cells of two rasters on identical grids.
inline double raster_rmse(const TfrRaster& a, const TfrRaster& b) {
  if (a.magnitude.size() != b.magnitude.size() || a.freq_axis.size() != b.freq_axis.size() ||
      a.magnitude.empty())
    throw InvalidInput("rasters must share non-empty grids");
  double s = 0.0;
  for (std::size_t i = 0; i < a.magnitude.size(); ++i) {
    const double d = a.magnitude[i] - b.magnitude[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.magnitude.size()));
}

}  // namespace efdkit
