#pragma once

// Synthetic test signals, error metrics, component matching, the Q(a, lambda_r)
// map and wall-clock timing.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "efdkit/decompose.hpp"
#include "efdkit/errors.hpp"
#include "efdkit/modes.hpp"
#include "efdkit/signal.hpp"
#include "efdkit/spectral.hpp"
#include "efdkit/tfr.hpp"

namespace efdkit {

enum class SignalId { Sig1, Sig2, Sig3, Sig4, Sig5, Sig6 };

inline std::string_view to_string(SignalId id) {
  static constexpr std::string_view names[] = {"sig1", "sig2", "sig3", "sig4", "sig5", "sig6"};
  return names[static_cast<int>(id)];
}

inline std::optional<SignalId> parse_signal_id(std::string_view s) {
  for (int i = 0; i < 6; ++i)
    if (to_string(static_cast<SignalId>(i)) == s) return static_cast<SignalId>(i);
  return std::nullopt;
}

inline constexpr SignalId kAllSignals[] = {SignalId::Sig1, SignalId::Sig2, SignalId::Sig3,
                                           SignalId::Sig4, SignalId::Sig5, SignalId::Sig6};

struct TestSignalSpec {
  SignalId id = SignalId::Sig3;
  double sample_rate_hz = 1000.0;
  double duration_s = 1.0;
  std::uint64_t seed = 42;  // Sig1/Sig2 noise
  double snr_db = 10.0;     // Sig1/Sig2
  double a = 1.0;           // Sig6 amplitude ratio
  double lambda_r = 0.5;    // Sig6 frequency ratio

  static TestSignalSpec defaults(SignalId id) {
    TestSignalSpec s;
    s.id = id;
    if (id == SignalId::Sig5) {
      s.sample_rate_hz = 50.0;
      s.duration_s = 20.0;
    } else if (id == SignalId::Sig6) {
      s.sample_rate_hz = 10.0;
      s.duration_s = 300.0;
    }
    return s;
  }

  static TestSignalSpec sig6(double a, double lambda_r) {
    auto s = defaults(SignalId::Sig6);
    s.a = a;
    s.lambda_r = lambda_r;
    return s;
  }

  std::size_t sample_count() const {
    return static_cast<std::size_t>(std::llround(sample_rate_hz * duration_s));
  }
};

struct GeneratedSignal {
  TestSignalSpec spec;
  Signal signal;
  std::vector<Signal> components;  // noiseless ground truth
};

inline GeneratedSignal generate(const TestSignalSpec& spec) {
  const std::size_t n = spec.sample_count();
  if (n == 0) throw InvalidInput("test signal has no samples");
  const double fs = spec.sample_rate_hz;
  const double pi = kPi;

  std::vector<std::vector<double>> comps;
  auto add = [&](auto&& fn) {
    std::vector<double> c(n);
    for (std::size_t r = 0; r < n; ++r) c[r] = fn(static_cast<double>(r) / fs);
    comps.push_back(std::move(c));
  };
  switch (spec.id) {
    case SignalId::Sig1:
      add([](double t) { return 6.0 * t; });
      add([&](double t) { return std::cos(24.0 * pi * t); });
      add([&](double t) { return std::cos(50.0 * pi * t); });
      break;
    case SignalId::Sig2:
      add([&](double t) { return std::cos(20.0 * pi * t); });
      add([&](double t) { return std::cos(24.0 * pi * t); });
      add([&](double t) { return std::cos(50.0 * pi * t); });
      break;
    case SignalId::Sig3:
      add([&](double t) { return 1.0 / (1.2 + std::cos(2.0 * pi * t)); });
      add([&](double t) {
        return std::cos(32.0 * pi * t + 0.2 * std::cos(64.0 * pi * t)) / (1.5 + std::sin(2.0 * pi * t));
      });
      break;
    case SignalId::Sig4:
      add([](double t) { return 6.0 * t; });
      add([&](double t) { return std::cos(8.0 * pi * t); });
      add([&](double t) { return 0.5 * std::cos(40.0 * pi * t); });
      break;
    case SignalId::Sig5:
      for (double lam : {1.1, 1.3, 3.1}) add([&](double t) { return std::cos(2.0 * pi * lam * t); });
      break;
    case SignalId::Sig6:
      add([&](double t) { return std::cos(2.0 * pi * t); });
      add([&](double t) { return spec.a * std::cos(2.0 * pi * spec.lambda_r * t); });
      break;
    default: throw InvalidInput("unknown test signal");
  }

  std::vector<double> x(n, 0.0);
  for (const auto& c : comps)
    for (std::size_t r = 0; r < n; ++r) x[r] += c[r];

  if (spec.id == SignalId::Sig1 || spec.id == SignalId::Sig2) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> noise(n);
    for (double& v : noise) v = gauss(rng);
    double ps = 0.0, pn = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      ps += x[r] * x[r];
      pn += noise[r] * noise[r];
    }
    const double scale = std::sqrt(ps / (pn * std::pow(10.0, spec.snr_db / 10.0)));
    for (std::size_t r = 0; r < n; ++r) x[r] += scale * noise[r];
  }

  GeneratedSignal g{spec, Signal(std::move(x), fs), {}};
  for (auto& c : comps) g.components.emplace_back(std::move(c), fs);
  return g;
}

inline double rmse(std::span<const double> decomposed, std::span<const double> analytic) {
  if (decomposed.size() != analytic.size()) throw InvalidInput("rmse needs equal lengths");
  if (decomposed.empty()) throw InvalidInput("rmse of empty sequences");
  double s = 0.0;
  for (std::size_t r = 0; r < decomposed.size(); ++r) {
    const double d = decomposed[r] - analytic[r];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(decomposed.size()));
}

inline double rmse(const Signal& decomposed, const Signal& analytic) {
  return rmse(decomposed.samples(), analytic.samples());
}

// Minimum-cost assignment of each row to a distinct column (rows <= cols).
// Returns the column chosen for every row. O(rows^2 * cols).
inline std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  if (n == 0) return {};
  const std::size_t m = cost.front().size();
  if (m < n) throw InvalidInput("assignment needs at least as many columns as rows");
  const double inf = std::numeric_limits<double>::infinity();
  // Potentials-based Hungarian method, 1-indexed with a virtual column 0.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

struct ComponentMatch {
  std::vector<std::size_t> mode_for_component;
  std::vector<double> rmse;
  bool one_to_one = true;  // false when modes < components and a mode was reused
};

// One-to-one minimum total RMSE when there are at least as many modes as
// components; otherwise each component takes its best mode (reuse allowed).
inline ComponentMatch match_components(const std::vector<Signal>& modes, const std::vector<Signal>& components) {
  if (modes.empty()) throw InvalidInput("no modes to match");
  std::vector<std::vector<double>> cost(components.size(), std::vector<double>(modes.size()));
  for (std::size_t c = 0; c < components.size(); ++c)
    for (std::size_t m = 0; m < modes.size(); ++m) cost[c][m] = rmse(modes[m], components[c]);
  ComponentMatch out;
  if (modes.size() >= components.size()) {
    out.mode_for_component = min_cost_assignment(cost);
  } else {
    out.one_to_one = false;
    for (const auto& row : cost)
      out.mode_for_component.push_back(static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin()));
  }
  for (std::size_t c = 0; c < components.size(); ++c) out.rmse.push_back(cost[c][out.mode_for_component[c]]);
  return out;
}

// Q = 0 if ||c1 - sig6c1|| / ||sig6c2|| <= epsilon, else 1.
inline int q_value(std::span<const double> c1, std::span<const double> sig6c1, std::span<const double> sig6c2,
                   double epsilon = 0.5) {
  if (c1.size() != sig6c1.size() || c1.size() != sig6c2.size()) throw InvalidInput("q_value needs equal lengths");
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < c1.size(); ++r) {
    num += (c1[r] - sig6c1[r]) * (c1[r] - sig6c1[r]);
    den += sig6c2[r] * sig6c2[r];
  }
  if (den == 0.0) throw InvalidInput("q_value: second component has zero norm");
  return std::sqrt(num) / std::sqrt(den) <= epsilon ? 0 : 1;
}

// Power-weighted mean frequency of the half spectrum, in Hz.
inline double spectral_centroid_hz(const Signal& s) {
  const Spectrum sp = forward_spectrum(s);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < sp.size(); ++k) {
    const double p = std::norm(sp.bins[k]);
    num += p * static_cast<double>(k) * s.sample_rate_hz() / static_cast<double>(s.size());
    den += p;
  }
  return den > 0.0 ? num / den : 0.0;
}

// Mode counts used throughout the experiments (EFD/EWT); FDM finds its own.
inline std::size_t reference_mode_count(Method method, SignalId id) {
  static constexpr std::size_t efd[] = {3, 3, 2, 3, 3, 2};
  static constexpr std::size_t ewt[] = {3, 4, 2, 3, 4, 3};
  const auto i = static_cast<std::size_t>(id);
  return method == Method::Efd ? efd[i] : ewt[i];
}

// Experiment protocol: EFD and EWT (lowest minima) filter a mirror extension;
// the FDM scans work on the plain periodic coefficients.
inline DecomposeOptions benchmark_protocol(Method method, SignalId id) {
  DecomposeOptions o;
  o.method = method;
  o.n_modes = reference_mode_count(method, id);
  o.boundary = (method == Method::FdmLth || method == Method::FdmHtl) ? BoundaryMode::Periodic : BoundaryMode::Mirror;
  return o;
}

inline constexpr Method kBenchMethods[] = {Method::Efd, Method::EwtMinima, Method::FdmLth, Method::FdmHtl};

// Worker count: EFDKIT_THREADS if set and positive, else hardware concurrency.
inline std::size_t default_thread_count() {
  if (const char* env = std::getenv("EFDKIT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
}

struct QMapGrid {
  std::vector<double> a_axis;
  std::vector<double> lambda_axis;

  // n_a log steps over [0.01, 100], n_lambda linear steps over [0.01, 1].
  static QMapGrid standard(std::size_t n_a, std::size_t n_lambda) {
    if (n_a == 0 || n_lambda == 0) throw InvalidInput("grid needs at least one point per axis");
    QMapGrid g;
    for (std::size_t i = 0; i < n_a; ++i) {
      const double f = n_a == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n_a - 1);
      g.a_axis.push_back(std::pow(10.0, -2.0 + 4.0 * f));
    }
    for (std::size_t i = 0; i < n_lambda; ++i) {
      const double f = n_lambda == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n_lambda - 1);
      g.lambda_axis.push_back(0.01 + 0.99 * f);
    }
    return g;
  }
};

struct QMap {
  Method method = Method::Efd;
  std::vector<double> a_axis;
  std::vector<double> lambda_axis;
  std::vector<int> q;               // row-major: a x lambda
  std::vector<std::string> errors;  // per cell, empty when the decomposition ran

  int at(std::size_t ia, std::size_t il) const { return q[ia * lambda_axis.size() + il]; }

  double failure_fraction() const {
    if (q.empty()) return 0.0;
    double s = 0.0;
    for (int v : q) s += v;
    return s / static_cast<double>(q.size());
  }
};

struct QCell {
  int q = 1;
  std::string error;
};

// Decompose Sig6(a, lambda_r) with the experiment protocol, take the mode whose
// spectral centroid is nearest 1 Hz as C1, and score it.
inline QCell q_cell(Method method, double a, double lambda_r, double epsilon = 0.5) {
  const auto g = generate(TestSignalSpec::sig6(a, lambda_r));
  try {
    const ModeSet ms = decompose(g.signal, benchmark_protocol(method, SignalId::Sig6));
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ms.modes.size(); ++i) {
      const double d = std::abs(spectral_centroid_hz(ms.modes[i]) - 1.0);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return {q_value(ms.modes[best].samples(), g.components[0].samples(), g.components[1].samples(), epsilon), {}};
  } catch (const Error& e) {
    return {1, e.what()};
  }
}

inline QMap q_map(Method method, const QMapGrid& grid, double epsilon = 0.5,
                  std::size_t threads = default_thread_count()) {
  QMap map;
  map.method = method;
  map.a_axis = grid.a_axis;
  map.lambda_axis = grid.lambda_axis;
  const std::size_t nl = grid.lambda_axis.size();
  const std::size_t cells = grid.a_axis.size() * nl;
  map.q.assign(cells, 1);
  map.errors.assign(cells, {});
  parallel_for(cells, threads, [&](std::size_t i) {
    QCell c = q_cell(method, grid.a_axis[i / nl], grid.lambda_axis[i % nl], epsilon);
    map.q[i] = c.q;
    map.errors[i] = std::move(c.error);
  });
  return map;
}

// Frequency axis of the TFR comparison: 0-50 Hz in 0.25 Hz steps.
inline std::vector<double> tfr_axis() { return uniform_axis(0.0, 50.0, 0.25); }

// RMSE between the raster of a method's tracks and the raster of the
// ground-truth component tracks, on tfr_axis().
inline double tfr_rmse(Method method, SignalId id) {
  const auto g = generate(TestSignalSpec::defaults(id));
  const auto axis = tfr_axis();
  const auto truth = raster_tfr(benchmark_tfr(g.components), axis);
  const auto got = raster_tfr(method_tfr(g.signal, benchmark_protocol(method, id)), axis);
  return raster_rmse(got, truth);
}

struct TimingEntry {
  SignalId signal;
  Method method;
  std::vector<double> seconds;  // one per timed repetition
  double median_s = 0.0;
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw InvalidInput("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Serial wall-clock timing of decomposition only (generation excluded), one
// discarded warm-up run per (signal, method). Repetitions are interleaved
// round-robin across methods so that drifting machine load hits every method
// alike instead of whichever happened to run during it.
inline std::vector<TimingEntry> time_methods(const std::vector<TestSignalSpec>& specs,
                                             const std::vector<Method>& methods, std::size_t repetitions) {
  if (repetitions < 3) throw InvalidInput("timing needs at least 3 repetitions");
  using clock = std::chrono::steady_clock;
  // Each sample is a batch of calls lasting at least this long, reported per call;
  // a lone sub-millisecond call mostly measures cache state and timer jitter.
  constexpr double kMinBatchSeconds = 2e-3;
  std::vector<TimingEntry> out;
  std::vector<GeneratedSignal> signals;
  std::vector<std::size_t> batch;
  for (const auto& spec : specs) {
    signals.push_back(generate(spec));
    for (Method m : methods) {
      out.push_back({spec.id, m, {}, 0.0});
      const auto opt = benchmark_protocol(m, spec.id);
      (void)decompose(signals.back().signal, opt);
      const auto t0 = clock::now();
      (void)decompose(signals.back().signal, opt);
      const double once = std::chrono::duration<double>(clock::now() - t0).count();
      batch.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(kMinBatchSeconds / once))));
    }
  }
  for (std::size_t r = 0; r < repetitions; ++r)
    for (std::size_t s = 0; s < specs.size(); ++s)
      for (std::size_t j = 0; j < methods.size(); ++j) {
        // Rotate the order too: no method always runs right after the slow FDM scans.
        const std::size_t k = (j + r) % methods.size();
        const std::size_t idx = s * methods.size() + k;
        const auto opt = benchmark_protocol(methods[k], specs[s].id);
        const auto t0 = clock::now();
        for (std::size_t b = 0; b < batch[idx]; ++b) {
          const ModeSet ms = decompose(signals[s].signal, opt);
          if (ms.modes.empty()) throw NumericFailure("decomposition produced no modes");
        }
        const auto t1 = clock::now();
        out[idx].seconds.push_back(std::chrono::duration<double>(t1 - t0).count() /
                                   static_cast<double>(batch[idx]));
      }
  for (auto& e : out) e.median_s = median(e.seconds);
  return out;
}

}  // namespace efdkit
