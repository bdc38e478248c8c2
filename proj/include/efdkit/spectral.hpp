#pragma once

// Discrete Fourier machinery shared by every decomposition method.
//
// Convention: forward transform X[k] = sum_r x[r] e^{-j 2 pi k r / R} (unscaled),
// inverse x[r] = (1/R) sum_k X[k] e^{+j 2 pi k r / R}. Bin k of a length-R
// transform sits at normalized angular frequency omega_k = 2 pi k / R.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <tuple>
#include <vector>

#include "efdkit/errors.hpp"
#include "efdkit/signal.hpp"

namespace efdkit {

using cplx = std::complex<double>;

enum class Normalization {
  // Unscaled forward, 1/R-scaled inverse.
  UnscaledForward,
};

inline constexpr double kPi = std::numbers::pi;

inline double bin_omega(std::size_t k, std::size_t length) {
  return 2.0 * kPi * static_cast<double>(k) / static_cast<double>(length);
}

inline std::size_t half_spectrum_size(std::size_t length) { return length / 2 + 1; }

// Half spectrum (bins 0..floor(R/2)) of a real signal of length R.
struct Spectrum {
  std::vector<cplx> bins;
  std::size_t source_length = 0;
  Normalization normalization = Normalization::UnscaledForward;

  std::size_t size() const noexcept { return bins.size(); }
  double omega(std::size_t k) const { return bin_omega(k, source_length); }
};

namespace detail {

// FFTW plans keyed by (kind, length). Plan creation is serialized; execution
// through the new-array interface is thread-safe.
class PlanCache {
 public:
  enum class Kind { R2C, C2R, C2CForward, C2CBackward };

  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(Kind kind, std::size_t n) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(static_cast<int>(kind), n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    double* real = fftw_alloc_real(n);
    fftw_complex* a = fftw_alloc_complex(n);
    fftw_complex* b = fftw_alloc_complex(n);
    fftw_plan plan = nullptr;
    switch (kind) {
      case Kind::R2C: plan = fftw_plan_dft_r2c_1d(len, real, a, flags); break;
      case Kind::C2R: plan = fftw_plan_dft_c2r_1d(len, a, real, flags); break;
      case Kind::C2CForward: plan = fftw_plan_dft_1d(len, a, b, FFTW_FORWARD, flags); break;
      case Kind::C2CBackward: plan = fftw_plan_dft_1d(len, a, b, FFTW_BACKWARD, flags); break;
    }
    fftw_free(real);
    fftw_free(a);
    fftw_free(b);
    if (plan == nullptr) throw NumericFailure("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t>, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace detail

inline Spectrum forward_spectrum(std::span<const double> samples) {
  if (samples.empty()) throw InvalidInput("cannot transform an empty signal");
  const std::size_t n = samples.size();
  Spectrum s;
  s.source_length = n;
  s.bins.resize(half_spectrum_size(n));
  // r2c leaves its input untouched (FFTW_PRESERVE_INPUT is the r2c default).
  std::vector<double> in(samples.begin(), samples.end());
  fftw_execute_dft_r2c(detail::PlanCache::instance().get(detail::PlanCache::Kind::R2C, n),
                       in.data(), detail::as_fftw(s.bins.data()));
  return s;
}

inline Spectrum forward_spectrum(const Signal& signal) { return forward_spectrum(signal.samples()); }

// Consumes the spectrum: c2r overwrites its input.
inline std::vector<double> inverse_spectrum(Spectrum&& spectrum) {
  const std::size_t n = spectrum.source_length;
  if (n == 0 || spectrum.bins.size() != half_spectrum_size(n))
    throw InvalidInput("spectrum bin count does not match its source length");
  std::vector<double> out(n);
  fftw_execute_dft_c2r(detail::PlanCache::instance().get(detail::PlanCache::Kind::C2R, n),
                       detail::as_fftw(spectrum.bins.data()), out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

inline std::vector<double> inverse_spectrum(const Spectrum& spectrum) {
  Spectrum work = spectrum;
  return inverse_spectrum(std::move(work));
}

// Full complex DFT, unscaled (forward) or 1/R-scaled (inverse).
inline std::vector<cplx> complex_dft(std::span<const cplx> values, bool inverse = false) {
  if (values.empty()) throw InvalidInput("cannot transform an empty sequence");
  const std::size_t n = values.size();
  std::vector<cplx> in(values.begin(), values.end());
  std::vector<cplx> out(n);
  auto kind = inverse ? detail::PlanCache::Kind::C2CBackward : detail::PlanCache::Kind::C2CForward;
  fftw_execute_dft(detail::PlanCache::instance().get(kind, n), detail::as_fftw(in.data()),
                   detail::as_fftw(out.data()));
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : out) v *= scale;
  }
  return out;
}

// Analytic signal x + jH(x) by one-sided spectral doubling. DC (and the
// Nyquist bin for even R) are kept as-is, bins 1..ceil(R/2)-1 doubled, negative
// frequencies zeroed.
inline std::vector<cplx> analytic_signal(std::span<const double> samples) {
  const Spectrum spec = forward_spectrum(samples);
  const std::size_t n = spec.source_length;
  std::vector<cplx> full(n, cplx{});
  full[0] = spec.bins[0];
  const std::size_t last_doubled = (n % 2 == 0) ? n / 2 - 1 : n / 2;
  for (std::size_t k = 1; k <= last_doubled && k < n; ++k) full[k] = 2.0 * spec.bins[k];
  if (n % 2 == 0 && n >= 2) full[n / 2] = spec.bins[n / 2];
  std::vector<cplx> z = complex_dft(full, /*inverse=*/true);
  // The real part is the input by construction; pin it to kill rounding.
  for (std::size_t r = 0; r < n; ++r) z[r].real(samples[r]);
  return z;
}

inline std::vector<cplx> analytic_signal(const Signal& signal) { return analytic_signal(signal.samples()); }

// Half-sample symmetric extension: floor(R/2) mirrored samples on the left and
// ceil(R/2) on the right, so the extended length is always 2R.
struct SymmetricExtension {
  std::vector<double> samples;
  std::size_t offset = 0;  // index of the first original sample
  std::size_t original_length = 0;

  std::vector<double> crop(std::span<const double> extended) const {
    return {extended.begin() + static_cast<std::ptrdiff_t>(offset),
            extended.begin() + static_cast<std::ptrdiff_t>(offset + original_length)};
  }
};

inline SymmetricExtension mirror_extend(std::span<const double> samples) {
  if (samples.empty()) throw InvalidInput("cannot extend an empty signal");
  const std::size_t n = samples.size();
  const std::size_t left = n / 2;
  const std::size_t right = n - left;
  SymmetricExtension ext;
  ext.offset = left;
  ext.original_length = n;
  ext.samples.reserve(left + n + right);
  for (std::size_t i = left; i-- > 0;) ext.samples.push_back(samples[i]);
  ext.samples.insert(ext.samples.end(), samples.begin(), samples.end());
  for (std::size_t i = 0; i < right; ++i) ext.samples.push_back(samples[n - 1 - i]);
  return ext;
}

}  // namespace efdkit
