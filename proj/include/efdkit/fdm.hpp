#pragma once

// Fourier decomposition method: Fourier intrinsic band functions (FIBFs) found
// by low-to-high (LTH) or high-to-low (HTL) scans over the analytic signal's
// Fourier coefficients.
//
// A band [lo, hi] is admissible when the instantaneous frequency of
// z(u) = sum_{m=lo}^{hi} a_m e^{j m phi0 u} is >= -tol_if at every sample. The
// IF is the exact derivative of the band's Fourier series,
// Im(conj(z) z') / |z|^2, so bands whose amplitude dips through zero between
// samples are judged on their true phase, not on a wrapped difference.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "efdkit/errors.hpp"
#include "efdkit/modes.hpp"
#include "efdkit/signal.hpp"
#include "efdkit/spectral.hpp"

namespace efdkit {

enum class ScanDirection { LTH, HTL };

inline std::string_view to_string(ScanDirection d) { return d == ScanDirection::LTH ? "LTH" : "HTL"; }

inline constexpr double kDefaultTolIf = 1e-10;

struct FourierCoefficients {
  std::vector<cplx> a;  // a[m], m = 0..U/2-1; a[0] is unused (zero)
  std::size_t period = 0;  // U
  double mean = 0.0;
  double nyquist = 0.0;  // f(u) carries nyquist * (-1)^u on top of the series

  std::size_t last_index() const noexcept { return period / 2 - 1; }
  double phi0() const noexcept { return 2.0 * kPi / static_cast<double>(period); }

  // Allowance for rounding in Im(conj(z) z'): proportional to the largest
  // magnitude either factor can reach.
  double rounding_allowance() const {
    double s = 0.0;
    for (std::size_t m = 1; m < a.size(); ++m) s += std::abs(a[m]);
    return 1e-13 * s * s * static_cast<double>(period / 2) * phi0();
  }
};

// a_m = (2/U) sum_u (f(u) - mean) e^{-j m phi0 u}, m = 1..U/2-1.
inline FourierCoefficients fourier_coefficients(std::span<const double> samples) {
  const std::size_t u = samples.size();
  if (u % 2 != 0) throw InvalidInput("FDM needs an even number of samples");
  if (u < 4) throw InvalidInput("FDM needs at least 4 samples");
  FourierCoefficients c;
  c.period = u;
  c.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(u);
  std::vector<double> centered(samples.begin(), samples.end());
  for (double& v : centered) v -= c.mean;
  const Spectrum s = forward_spectrum(centered);
  const double scale = 2.0 / static_cast<double>(u);
  c.a.assign(u / 2, cplx{});
  for (std::size_t m = 1; m < u / 2; ++m) c.a[m] = scale * s.bins[m];
  c.nyquist = s.bins[u / 2].real() / static_cast<double>(u);
  return c;
}

inline FourierCoefficients fourier_coefficients(const Signal& signal) {
  return fourier_coefficients(signal.samples());
}

// Principal-value phase with 2*pi jumps removed.
inline std::vector<double> unwrap_phase(std::span<const cplx> z) {
  std::vector<double> ph(z.size());
  double offset = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double p = std::arg(z[i]);
    if (i > 0) {
      const double prev = ph[i - 1] - offset;
      double d = p - prev;
      if (d > kPi) offset -= 2.0 * kPi * std::round(d / (2.0 * kPi));
      else if (d < -kPi) offset -= 2.0 * kPi * std::round(d / (2.0 * kPi));
    }
    ph[i] = p + offset;
  }
  return ph;
}

struct BandAnalytic {
  std::vector<cplx> values;
  std::vector<double> amplitude;
  std::vector<double> phase;  // unwrapped, radians
  std::size_t lo = 0, hi = 0;
};

namespace detail {

inline void check_band(const FourierCoefficients& c, std::size_t lo, std::size_t hi) {
  if (lo < 1 || hi < lo || hi > c.last_index()) throw InvalidInput("band must satisfy 1 <= lo <= hi <= U/2-1");
}

// z(u) = sum_{m=lo}^{hi} a_m e^{j m phi0 u} for all u (one inverse DFT).
inline std::vector<cplx> band_values(const FourierCoefficients& c, std::size_t lo, std::size_t hi,
                                     bool derivative = false) {
  std::vector<cplx> full(c.period, cplx{});
  for (std::size_t m = lo; m <= hi; ++m)
    full[m] = derivative ? cplx{0.0, static_cast<double>(m) * c.phi0()} * c.a[m] : c.a[m];
  auto z = complex_dft(full, /*inverse=*/true);
  const double u = static_cast<double>(c.period);
  for (auto& v : z) v *= u;
  return z;
}

}  // namespace detail

inline BandAnalytic band_analytic(const FourierCoefficients& c, std::size_t lo, std::size_t hi) {
  detail::check_band(c, lo, hi);
  BandAnalytic b;
  b.lo = lo;
  b.hi = hi;
  b.values = detail::band_values(c, lo, hi);
  b.amplitude.reserve(b.values.size());
  for (const cplx& v : b.values) b.amplitude.push_back(std::abs(v));
  b.phase = unwrap_phase(b.values);
  return b;
}

// Exact instantaneous frequency of the band (rad/sample); 0 where z vanishes.
inline std::vector<double> band_instantaneous_frequency(const FourierCoefficients& c, std::size_t lo,
                                                        std::size_t hi) {
  detail::check_band(c, lo, hi);
  const auto z = detail::band_values(c, lo, hi);
  const auto dz = detail::band_values(c, lo, hi, true);
  std::vector<double> f(z.size());
  for (std::size_t u = 0; u < z.size(); ++u) {
    const double p = std::norm(z[u]);
    f[u] = p > 0.0 ? (z[u].real() * dz[u].imag() - z[u].imag() * dz[u].real()) / p : 0.0;
  }
  return f;
}

// Direct (non-incremental) admissibility test of one band.
inline bool band_admissible(const FourierCoefficients& c, std::size_t lo, std::size_t hi,
                            double tol_if = kDefaultTolIf) {
  detail::check_band(c, lo, hi);
  const auto z = detail::band_values(c, lo, hi);
  const auto dz = detail::band_values(c, lo, hi, true);
  const double eps = c.rounding_allowance();
  for (std::size_t u = 0; u < z.size(); ++u) {
    const double num = z[u].real() * dz[u].imag() - z[u].imag() * dz[u].real();
    if (num < -tol_if * std::norm(z[u]) - eps) return false;
  }
  return true;
}

struct FibfBand {
  std::size_t lo = 0, hi = 0;  // inclusive coefficient range
  bool operator==(const FibfBand&) const = default;
};

struct FibfSet {
  std::vector<Signal> fibfs;  // in scan order
  std::vector<FibfBand> bands;  // in scan order
  std::vector<std::size_t> band_edges;  // M_0..M_K
  ScanDirection direction = ScanDirection::LTH;
  FourierCoefficients coefficients;
  double trend = 0.0;  // removed sample mean
  std::vector<double> nyquist;  // real Nyquist content, not part of any FIBF
  double tol_if = kDefaultTolIf;
};

namespace detail {

// Greedy scan that, from each band start, takes the largest admissible end.
// z and z' are evaluated lazily per sample: each sample keeps the partial sums
// up to the last coefficient it was checked against, and candidates are
// rejected at the first failing sample (tried first on the next candidate).
class FdmScanner {
 public:
  FdmScanner(const FourierCoefficients& c, double tol_if)
      : c_(c), tol_(tol_if), eps_(c.rounding_allowance()), u_(c.period) {
    twiddle_.resize(u_);
    for (std::size_t i = 0; i < u_; ++i) twiddle_[i] = std::polar(1.0, c.phi0() * static_cast<double>(i));
    da_.resize(c.a.size());
    for (std::size_t m = 0; m < c.a.size(); ++m)
      da_[m] = cplx{0.0, static_cast<double>(m) * c.phi0()} * c.a[m];
    z_.resize(u_);
    dz_.resize(u_);
    reached_.resize(u_);
    index_.resize(u_);
  }

  std::vector<FibfBand> run(ScanDirection dir) {
    std::vector<FibfBand> bands;
    const std::size_t last = c_.last_index();
    if (dir == ScanDirection::LTH) {
      std::size_t start = 1;
      while (start <= last) {
        const std::size_t end = extend(start, last, +1);
        bands.push_back({start, end});
        start = end + 1;
      }
    } else {
      std::size_t start = last;
      while (start >= 1) {
        const std::size_t end = extend(start, 1, -1);
        bands.push_back({end, start});
        if (end == 1) break;
        start = end - 1;
      }
    }
    return bands;
  }

 private:
  // Largest admissible end (furthest from start in direction `step`).
  std::size_t extend(std::size_t start, std::size_t limit, int step) {
    for (std::size_t u = 0; u < u_; ++u) {
      index_[u] = (start * u) % u_;
      z_[u] = c_.a[start] * twiddle_[index_[u]];
      dz_[u] = da_[start] * twiddle_[index_[u]];
      reached_[u] = start;
    }
    step_ = step;
    std::size_t best = start;
    if (start == limit) return best;
    for (std::size_t m = next(start); ; m = next(m)) {
      if (admissible_up_to(m)) best = m;
      if (m == limit) break;
    }
    return best;
  }

  std::size_t next(std::size_t m) const { return step_ > 0 ? m + 1 : m - 1; }

  void advance(std::size_t u, std::size_t m) {
    const std::size_t stride = step_ > 0 ? u : (u_ - u) % u_;
    std::size_t idx = index_[u];
    std::size_t k = reached_[u];
    cplx z = z_[u], dz = dz_[u];
    while (k != m) {
      k = next(k);
      idx += stride;
      if (idx >= u_) idx -= u_;
      z += c_.a[k] * twiddle_[idx];
      dz += da_[k] * twiddle_[idx];
    }
    z_[u] = z;
    dz_[u] = dz;
    index_[u] = idx;
    reached_[u] = k;
  }

  bool ok(std::size_t u) const {
    const cplx z = z_[u], dz = dz_[u];
    const double num = z.real() * dz.imag() - z.imag() * dz.real();
    return num >= -tol_ * std::norm(z) - eps_;
  }

  bool admissible_up_to(std::size_t m) {
    advance(hint_, m);
    if (!ok(hint_)) return false;
    for (std::size_t u = 0; u < u_; ++u) {
      if (u == hint_) continue;
      advance(u, m);
      if (!ok(u)) {
        hint_ = u;
        return false;
      }
    }
    return true;
  }

  const FourierCoefficients& c_;
  double tol_, eps_;
  std::size_t u_;
  int step_ = 1;
  std::size_t hint_ = 0;
  std::vector<cplx> twiddle_, da_, z_, dz_;
  std::vector<std::size_t> reached_, index_;
};

}  // namespace detail

// Band edges only (no FIBF synthesis); bands in scan order.
inline std::vector<FibfBand> fdm_scan_bands(const FourierCoefficients& c, ScanDirection dir,
                                            double tol_if = kDefaultTolIf) {
  if (!(tol_if >= 0.0)) throw InvalidInput("tol_if must be non-negative");
  detail::FdmScanner scanner(c, tol_if);
  return scanner.run(dir);
}

inline FibfSet fdm_scan(const Signal& signal, ScanDirection dir, double tol_if = kDefaultTolIf) {
  FibfSet set;
  set.direction = dir;
  set.tol_if = tol_if;
  set.coefficients = fourier_coefficients(signal);
  const auto& c = set.coefficients;
  set.trend = c.mean;
  set.bands = fdm_scan_bands(c, dir, tol_if);

  set.band_edges.push_back(dir == ScanDirection::LTH ? 0 : c.period / 2);
  for (const auto& b : set.bands) {
    set.band_edges.push_back(dir == ScanDirection::LTH ? b.hi : b.lo);
    auto z = detail::band_values(c, b.lo, b.hi);
    std::vector<double> g(z.size());
    for (std::size_t u = 0; u < z.size(); ++u) g[u] = z[u].real();
    set.fibfs.emplace_back(std::move(g), signal.sample_rate_hz());
  }
  set.nyquist.resize(c.period);
  for (std::size_t u = 0; u < c.period; ++u) set.nyquist[u] = (u % 2 == 0) ? c.nyquist : -c.nyquist;
  return set;
}

inline FibfSet fdm_lth(const Signal& signal, double tol_if = kDefaultTolIf) {
  return fdm_scan(signal, ScanDirection::LTH, tol_if);
}

inline FibfSet fdm_htl(const Signal& signal, double tol_if = kDefaultTolIf) {
  return fdm_scan(signal, ScanDirection::HTL, tol_if);
}

// Modes in ascending band order; the mean joins the lowest band and the
// Nyquist content the highest, so the modes sum to the input.
inline ModeSet to_mode_set(const FibfSet& set, const Signal& input) {
  if (input.size() != set.coefficients.period) throw InvalidInput("input length does not match the FIBF set");
  ModeSet out;
  out.method = set.direction == ScanDirection::LTH ? Method::FdmLth : Method::FdmHtl;
  std::vector<std::size_t> order(set.bands.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return set.bands[x].lo < set.bands[y].lo; });
  const double rate = set.fibfs.front().sample_rate_hz();
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::vector<double> g = set.fibfs[order[i]].values();
    if (i == 0)
      for (double& v : g) v += set.trend;
    if (i + 1 == order.size())
      for (std::size_t u = 0; u < g.size(); ++u) g[u] += set.nyquist[u];
    out.modes.emplace_back(std::move(g), rate);
  }
  out.residual = detail::subtract_sum(input.samples(), out.modes);
  return out;
}

}  // namespace efdkit
