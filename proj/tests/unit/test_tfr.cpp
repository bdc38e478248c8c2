#include <catch_amalgamated.hpp>

#include <cmath>

#include "efdkit/benchkit.hpp"
#include "efdkit/tfr.hpp"
#include "oracles.hpp"

using namespace efdkit;
using Catch::Matchers::WithinAbs;

namespace {

TfrTrack manual_track(std::vector<double> f, std::vector<double> a) {
  TfrTrack t;
  for (std::size_t i = 0; i < f.size(); ++i) t.time.push_back(static_cast<double>(i));
  t.inst_frequency_hz = std::move(f);
  t.inst_amplitude = std::move(a);
  t.degenerate.assign(t.time.size(), false);
  return t;
}

}  // namespace

TEST_CASE("track of a pure tone", "[tfr]") {
  std::vector<double> x(400);
  for (std::size_t r = 0; r < x.size(); ++r) x[r] = 2.0 * std::cos(2 * kPi * 5 * static_cast<double>(r) / 100.0);
  const auto t = mode_tfr(Signal(x, 100.0));
  REQUIRE(t.size() == 400);
  CHECK_THAT(t.time[100], WithinAbs(1.0, 1e-15));
  for (std::size_t r = 0; r < 400; ++r) {
    CHECK_THAT(t.inst_amplitude[r], WithinAbs(2.0, 1e-10));
    CHECK_THAT(t.inst_frequency_hz[r], WithinAbs(5.0, 1e-9));
    CHECK_FALSE(t.degenerate[r]);
  }
}

TEST_CASE("instantaneous frequency of a linear chirp", "[tfr]") {
  // Phase from the closed form: IF = 2 + 3 t Hz; compare with the unwrapped
  // phase differenced the same way.
  const double fs = 200;
  std::vector<oracle::cplx> z(600);
  for (std::size_t r = 0; r < z.size(); ++r) {
    const double t = static_cast<double>(r) / fs;
    z[r] = std::polar(1.0, 2 * kPi * (2 * t + 1.5 * t * t));
  }
  const auto tr = track_from_analytic(z, fs);
  for (std::size_t r = 1; r + 1 < z.size(); ++r)
    CHECK_THAT(tr.inst_frequency_hz[r], WithinAbs(2 + 3 * static_cast<double>(r) / fs, 1e-6));
}

TEST_CASE("zero amplitude is flagged with zero frequency", "[tfr]") {
  std::vector<oracle::cplx> z(5, oracle::cplx{});
  z[2] = {1.0, 0.0};
  const auto t = track_from_analytic(z, 10.0);
  CHECK(t.degenerate == std::vector<bool>{true, true, false, true, true});
  for (std::size_t r = 0; r < 5; ++r)
    if (t.degenerate[r]) CHECK(t.inst_frequency_hz[r] == 0.0);
  CHECK_THROWS_AS(track_from_analytic(z, 0.0), InvalidInput);
}

TEST_CASE("uniform axis includes its end point", "[tfr]") {
  const auto ax = uniform_axis(0, 50, 0.25);
  REQUIRE(ax.size() == 201);
  CHECK(ax.front() == 0.0);
  CHECK_THAT(ax.back(), WithinAbs(50.0, 1e-12));
  CHECK(uniform_axis(1, 1, 0.5).size() == 1);
  CHECK_THROWS_AS(uniform_axis(0, 1, 0), InvalidInput);
  CHECK_THROWS_AS(uniform_axis(2, 1, 0.1), InvalidInput);
}

TEST_CASE("raster deposits at the nearest bin, ties low, out-of-range to the edge", "[tfr]") {
  const std::vector<double> ax{0, 1, 2};
  const auto r = raster_tfr({manual_track({0.5, 1.6, 5.0, -1.0}, {1, 2, 3, 4})}, ax);
  REQUIRE(r.magnitude.size() == 12);
  CHECK(r.at(0, 0) == 1.0);
  CHECK(r.at(1, 2) == 2.0);
  CHECK(r.at(2, 2) == 3.0);
  CHECK(r.at(3, 0) == 4.0);
  CHECK(r.clipped == 2);
  CHECK(r.clipped_mass == 7.0);
  CHECK(r.total_mass() == 10.0);
  // A value within half a step of the edge is not clipped.
  CHECK(raster_tfr({manual_track({2.4}, {1})}, ax).clipped == 0);
}

TEST_CASE("overlapping tracks add up", "[tfr]") {
  const std::vector<double> ax{0, 1, 2};
  const auto r = raster_tfr({manual_track({1.1, 0}, {1, 1}), manual_track({0.9, 2}, {0.5, 1})}, ax);
  CHECK(r.at(0, 1) == 1.5);
  CHECK(r.at(1, 0) == 1.0);
  CHECK(r.at(1, 2) == 1.0);
}

TEST_CASE("raster validation and rmse", "[tfr]") {
  const std::vector<double> ax{0, 1, 2};
  CHECK_THROWS_AS(raster_tfr({}, {}), InvalidInput);
  CHECK_THROWS_AS(raster_tfr({}, {1, 1}), InvalidInput);
  CHECK_THROWS_AS(raster_tfr({manual_track({1}, {1}), manual_track({1, 1}, {1, 1})}, ax), InvalidInput);
  const auto a = raster_tfr({manual_track({0, 1}, {1, 1})}, ax);
  const auto b = raster_tfr({manual_track({0, 2}, {1, 1})}, ax);
  CHECK(raster_rmse(a, a) == 0.0);
  // Two cells differ by 1 out of 6.
  CHECK_THAT(raster_rmse(a, b), WithinAbs(std::sqrt(2.0 / 6.0), 1e-15));
  CHECK_THROWS_AS(raster_rmse(a, raster_tfr({manual_track({0}, {1})}, ax)), InvalidInput);
}

TEST_CASE("benchmark tracks of the chirp signal", "[tfr]") {
  const auto g = generate(TestSignalSpec::defaults(SignalId::Sig3));
  const auto tracks = benchmark_tfr(g.components);
  REQUIRE(tracks.size() == 2);
  // Independent: direct-DFT analytic signal, IF from the phase of z[r+1] conj(z[r-1]).
  const auto z = oracle::analytic(g.components[1].values());
  double worst = 0, mean_if = 0;
  for (std::size_t r = 1; r + 1 < z.size(); ++r) {
    const double f = std::arg(z[r + 1] * std::conj(z[r - 1])) / (2 * 2 * kPi) * g.signal.sample_rate_hz();
    worst = std::max(worst, std::abs(tracks[1].inst_frequency_hz[r] - f));
    mean_if += tracks[1].inst_frequency_hz[r];
  }
  CHECK(worst < 1e-6);
  // The phase modulation averages out over whole periods: mean IF is the 16 Hz carrier.
  CHECK_THAT(mean_if / static_cast<double>(z.size() - 2), WithinAbs(16.0, 0.1));
  const auto ra = raster_tfr({tracks[1]}, uniform_axis(0, 50, 0.25));
  CHECK(ra.clipped == 0);
}

TEST_CASE("FDM tracks come one per band in ascending order", "[tfr]") {
  const auto g = generate(TestSignalSpec::defaults(SignalId::Sig3));
  const auto set = fdm_htl(g.signal);
  const auto tracks = fdm_tfr(set, g.signal.sample_rate_hz());
  REQUIRE(tracks.size() == set.bands.size());
  for (const auto& t : tracks) {
    CHECK(t.size() == g.signal.size());
    // FIBF bands are admissible: no negative IF beyond rounding.
    for (std::size_t r = 1; r + 1 < t.size(); ++r)
      if (!t.degenerate[r]) CHECK(t.inst_frequency_hz[r] > -1e-6);
  }
}
