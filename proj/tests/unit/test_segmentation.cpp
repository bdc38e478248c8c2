#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "efdkit/benchkit.hpp"
#include "efdkit/segmentation.hpp"
#include "oracles.hpp"

using namespace efdkit;
using Catch::Matchers::WithinAbs;

namespace {

MagnitudeProfile profile_of(std::vector<double> mags, std::size_t source_length) {
  return MagnitudeProfile{std::move(mags), source_length};
}

// The 9-bin example profile; R = 16 gives bins 0..8.
const std::vector<double> kNineBins{0.1, 0.2, 5.0, 0.3, 0.1, 4.0, 0.2, 0.1, 0.05};

double bin_w(double k, std::size_t r) { return 2 * kPi * k / static_cast<double>(r); }

}  // namespace

TEST_CASE("local maxima: strict peaks, plateaus once, endpoints never", "[segmentation]") {
  CHECK(local_maxima(std::vector<double>{0, 1, 0, 2, 2, 1, 3}) == std::vector<std::size_t>{1, 3});
  CHECK(local_maxima(std::vector<double>{5, 1, 1, 1, 5}).empty());
  CHECK(local_maxima(std::vector<double>{0, 2, 2, 3, 1}) == std::vector<std::size_t>{3});
  CHECK(local_maxima(std::vector<double>{1}).empty());
  CHECK(local_maxima(kNineBins) == std::vector<std::size_t>{2, 5});
}

TEST_CASE("local-maxima segmentation places midpoints", "[segmentation]") {
  std::vector<double> m(11, 1.0);  // R = 20: bin k at k*pi/10
  m[2] = 5.0;
  m[6] = 4.0;
  const auto seg = segment_local_maxima(profile_of(m, 20), 3);
  REQUIRE(seg.boundaries.size() == 4);
  CHECK(seg.boundaries[0] == 0.0);
  CHECK_THAT(seg.boundaries[1], WithinAbs(0.1 * kPi, 1e-15));
  CHECK_THAT(seg.boundaries[2], WithinAbs(0.4 * kPi, 1e-15));
  CHECK(seg.boundaries[3] == kPi);

  std::vector<double> one(11, 1.0);
  one[6] = 3.0;
  const auto s2 = segment_local_maxima(profile_of(one, 20), 2);
  REQUIRE(s2.boundaries.size() == 3);
  CHECK_THAT(s2.boundaries[1], WithinAbs(0.3 * kPi, 1e-15));
}

TEST_CASE("local-maxima segmentation of the noisy two-tone-plus-trend signal", "[segmentation]") {
  const auto g = generate(TestSignalSpec::defaults(SignalId::Sig1));
  const auto prof = MagnitudeProfile::from_signal(g.signal.samples());
  const auto seg = segment_local_maxima(prof, 3);

  // Oracle: plain scan for strict peaks, two largest, midpoints with 0.
  const auto& m = prof.magnitudes;
  std::vector<std::size_t> peaks;
  for (std::size_t k = 1; k + 1 < m.size(); ++k)
    if (m[k] > m[k - 1] && m[k] > m[k + 1]) peaks.push_back(k);
  std::sort(peaks.begin(), peaks.end(), [&](auto a, auto b) { return m[a] > m[b]; });
  std::vector<std::size_t> top(peaks.begin(), peaks.begin() + 2);
  std::sort(top.begin(), top.end());
  CHECK(top == std::vector<std::size_t>{12, 25});
  const double b1 = bin_w(0.5 * static_cast<double>(top[0]), 1000);
  const double b2 = bin_w(0.5 * static_cast<double>(top[0] + top[1]), 1000);
  CHECK_THAT(seg.boundaries[1], WithinAbs(b1, 1e-12));
  CHECK_THAT(seg.boundaries[2], WithinAbs(b2, 1e-12));
  const auto hz = seg.boundaries_hz(1000);
  CHECK(hz[1] < 12.0);
  CHECK(hz[2] > 12.0);
  CHECK(hz[2] < 25.0);
}

TEST_CASE("lowest-minima segmentation on the 9-bin profile", "[segmentation]") {
  // Three segments keep both peaks; the boundary between them is the bin-4 valley.
  const auto seg = segment_lowest_minima(profile_of(kNineBins, 16), 3);
  REQUIRE(seg.boundaries.size() == 4);
  CHECK_THAT(seg.boundaries[1], WithinAbs(bin_w(1, 16), 1e-15));
  CHECK_THAT(seg.boundaries[2], WithinAbs(bin_w(4, 16), 1e-15));
  CHECK(seg.boundaries[3] == kPi);

  // Two segments keep only the bin-2 peak; its boundary is the minimum between DC and it.
  const auto s2 = segment_lowest_minima(profile_of(kNineBins, 16), 2);
  CHECK_THAT(s2.boundaries[1], WithinAbs(bin_w(1, 16), 1e-15));
}

TEST_CASE("lowest-minima valleys and ties", "[segmentation]") {
  const std::vector<double> v{0.5, 3, 2, 1, 0.2, 1, 2, 4, 1};
  auto seg = segment_lowest_minima(profile_of(v, 16), 3);
  CHECK_THAT(seg.boundaries[2], WithinAbs(bin_w(4, 16), 1e-15));

  const std::vector<double> flat{0.5, 3, 1, 0.2, 0.2, 0.2, 1, 4, 1};
  seg = segment_lowest_minima(profile_of(flat, 16), 3);
  CHECK_THAT(seg.boundaries[2], WithinAbs(bin_w(3, 16), 1e-15));

  // A peak at bin 1 leaves no bin strictly between it and DC: midpoint.
  const std::vector<double> adj{0, 3, 1, 0.5, 2, 0, 0, 0, 0};
  seg = segment_lowest_minima(profile_of(adj, 16), 2);
  CHECK_THAT(seg.boundaries[1], WithinAbs(bin_w(0.5, 16), 1e-15));
}

TEST_CASE("improved segmentation on the 9-bin profile", "[segmentation]") {
  const auto seg = segment_improved(profile_of(kNineBins, 16), 2);
  REQUIRE(seg.boundaries.size() == 3);
  CHECK(seg.technique == SegmentationTechnique::ImprovedAdaptive);
  CHECK(seg.boundaries[0] == 0.0);
  CHECK_THAT(seg.boundaries[1], WithinAbs(bin_w(4, 16), 1e-15));
  CHECK_THAT(seg.boundaries[2], WithinAbs(bin_w(8, 16), 1e-15));
}

TEST_CASE("improved segmentation brackets a single tone", "[segmentation]") {
  for (std::size_t k : {3u, 40u, 120u}) {
    std::vector<double> x(256);
    for (std::size_t r = 0; r < x.size(); ++r)
      x[r] = std::cos(2 * kPi * static_cast<double>(k * r) / 256.0) + 0.01 * std::cos(0.37 * static_cast<double>(r * r));
    const auto seg = segment_improved(MagnitudeProfile::from_signal(x), 1);
    REQUIRE(seg.boundaries.size() == 2);
    CHECK(seg.boundaries[0] < bin_w(static_cast<double>(k), 256));
    CHECK(seg.boundaries[1] > bin_w(static_cast<double>(k), 256));
  }
}

TEST_CASE("improved segmentation: a selected endpoint collapses onto itself", "[segmentation]") {
  // Strong DC is a candidate: Omega_0 = Omega_1 = 0, so omega_0 = 0.
  const std::vector<double> m{9, 1, 5, 1, 0.5};
  const auto seg = segment_improved(profile_of(m, 8), 2);
  REQUIRE(seg.boundaries.size() == 3);
  CHECK(seg.boundaries[0] == 0.0);
  CHECK_THAT(seg.boundaries[1], WithinAbs(bin_w(1, 8), 1e-15));
  CHECK_THAT(seg.boundaries[2], WithinAbs(bin_w(4, 8), 1e-15));
}

TEST_CASE("too few peaks is infeasible and reports the count", "[segmentation]") {
  try {
    (void)segment_local_maxima(profile_of(kNineBins, 16), 5);
    FAIL("expected SegmentationInfeasible");
  } catch (const SegmentationInfeasible& e) {
    CHECK(e.found() == 2);
    CHECK(e.required() == 4);
  }
  CHECK_THROWS_AS(segment_lowest_minima(profile_of(kNineBins, 16), 4), SegmentationInfeasible);
  CHECK_THROWS_AS(segment_improved(profile_of(kNineBins, 16), 5), SegmentationInfeasible);
  // All four candidates selected, bin 8 twice: the last two boundaries stay apart.
  const auto four = segment_improved(profile_of(kNineBins, 16), 4);
  CHECK(four.boundaries.size() == 5);
  CHECK_THAT(four.boundaries[3], WithinAbs(bin_w(7, 16), 1e-15));
  CHECK_THAT(four.boundaries[4], WithinAbs(bin_w(8, 16), 1e-15));
  CHECK_THROWS_AS(segment_improved(profile_of(kNineBins, 16), 0), InvalidInput);
  CHECK_THROWS_AS(segment_improved(profile_of({1, -1, 2}, 4), 1), InvalidInput);
  CHECK_THROWS_AS(segment_improved(profile_of({1, 2}, 8), 1), InvalidInput);
}

TEST_CASE("one segment spans the whole axis", "[segmentation]") {
  const auto seg = segment_lowest_minima(profile_of(kNineBins, 16), 1);
  CHECK(seg.boundaries == std::vector<double>{0.0, kPi});
}

TEST_CASE("well-separated tones land in distinct segments for every technique", "[segmentation][property]") {
  // Local maxima / lowest minima anchor the first boundary at DC, so their
  // lowest segment is a (possibly empty) residual band: they get one extra
  // segment, the same convention as the EWT mode counts of the experiments.
  const std::size_t r = 512;
  const std::vector<std::size_t> tones{20, 90, 170};
  std::vector<double> x(r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k : tones) x[i] += std::cos(2 * kPi * static_cast<double>(k * i) / static_cast<double>(r) + 0.1 * static_cast<double>(k));
  const auto prof = MagnitudeProfile::from_signal(x);
  for (auto tech : {SegmentationTechnique::LocalMaxima, SegmentationTechnique::LowestMinima,
                    SegmentationTechnique::ImprovedAdaptive}) {
    const std::size_t extra = tech == SegmentationTechnique::ImprovedAdaptive ? 0 : 1;
    const auto seg = segment(prof, tones.size() + extra, tech);
    REQUIRE(seg.segment_count() == tones.size() + extra);
    for (std::size_t i = 0; i < tones.size(); ++i) {
      const double w = bin_w(static_cast<double>(tones[i]), r);
      CHECK(seg.boundaries[i + extra] < w);
      CHECK(w < seg.boundaries[i + extra + 1]);
    }
  }
}

TEST_CASE("random profiles give strictly increasing, deterministic boundaries", "[segmentation][property]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t r = 16 + rng() % 500;
    const auto x = oracle::random_signal(r, rng());
    const auto prof = MagnitudeProfile::from_signal(x);
    const std::size_t n = 1 + rng() % 6;
    for (auto tech : {SegmentationTechnique::LocalMaxima, SegmentationTechnique::LowestMinima,
                      SegmentationTechnique::ImprovedAdaptive}) {
      try {
        const auto a = segment(prof, n, tech);
        const auto b = segment(prof, n, tech);
        CHECK(a.boundaries == b.boundaries);
        CHECK(a.segment_count() == n);
        CHECK_NOTHROW(a.validate());
        // Every boundary is a bin frequency or the midpoint of two.
        for (double w : a.boundaries) {
          const double twice_bin = 2 * w * static_cast<double>(r) / (2 * kPi);
          CHECK((std::abs(twice_bin - std::round(twice_bin)) < 1e-9 || w == kPi));
        }
      } catch (const SegmentationInfeasible&) {
      } catch (const InvalidSegmentation&) {
      }
    }
  }
}
