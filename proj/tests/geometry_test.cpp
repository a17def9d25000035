// Copyright 2026 The TrendSketch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "trendsketch/geometry.hpp"

namespace ts = trendsketch;

namespace {

ts::NormalizedSignal ns(std::vector<ts::NormalizedPoint> pts) {
  return ts::NormalizedSignal("s", std::move(pts), ts::NormalizationMode::local());
}

double dist(std::vector<double> p, std::vector<double> a, std::vector<double> b) {
  return ts::perpendicular_distance(p, a, b);
}

}  // namespace

TEST(Normalize, LocalEndpointsDefineRange) {
  const ts::Signal s("s", {}, {{0, {2}}, {10, {4}}});
  const auto n = ts::normalize(s, ts::NormalizationMode::local());
  EXPECT_EQ(n.points()[0], (ts::NormalizedPoint{0, {0}}));
  EXPECT_EQ(n.points()[1], (ts::NormalizedPoint{1, {1}}));
}

TEST(Normalize, ConstantAxisMapsToHalf) {
  const ts::Signal s("s", {}, {{0, {3}}, {1, {3}}, {2, {3}}});
  const auto n = ts::normalize(s, ts::NormalizationMode::local());
  for (const auto& p : n.points()) EXPECT_EQ(p.y[0], 0.5);
}

TEST(Normalize, GlobalUsesSuppliedExtents) {
  ts::Extents e;
  e.time = {0, 20};
  e.measures = {{0, 8}};
  const ts::Signal s("s", {}, {{0, {2}}, {10, {4}}});
  const auto n = ts::normalize(s, ts::NormalizationMode::global(e));
  EXPECT_DOUBLE_EQ(n.points()[0].y[0], 0.25);
  EXPECT_DOUBLE_EQ(n.points()[1].y[0], 0.5);
  EXPECT_DOUBLE_EQ(n.points()[0].t, 0.0);
  EXPECT_DOUBLE_EQ(n.points()[1].t, 0.5);
}

TEST(Normalize, GlobalRangeViolationNamesAxis) {
  ts::Extents e;
  e.time = {0, 20};
  e.measures = {{0, 3}};
  const ts::Signal s("s", {}, {{0, {2}}, {10, {4}}});
  try {
    ts::normalize(s, ts::NormalizationMode::global(e));
    FAIL();
  } catch (const ts::Error& err) {
    EXPECT_EQ(err.kind(), ts::ErrorKind::kRangeViolation);
    EXPECT_NE(std::string(err.what()).find("measure 0"), std::string::npos);
  }
  e.measures = {{0, 8}};
  e.time = {1, 20};
  try {
    ts::normalize(s, ts::NormalizationMode::global(e));
    FAIL();
  } catch (const ts::Error& err) {
    EXPECT_NE(std::string(err.what()).find("time"), std::string::npos);
  }
}

TEST(Normalize, PreservesOrderAlongEachAxis) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = oracle::random_signal(rng, "s", 20, 2);
    const auto n = ts::normalize(s, ts::NormalizationMode::local());
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t j = 0; j < 20; ++j) {
        for (std::size_t k = 0; k < 2; ++k) {
          if (s.points()[i].y[k] < s.points()[j].y[k]) {
            EXPECT_LE(n.points()[i].y[k], n.points()[j].y[k]);
          }
        }
      }
    }
  }
}

TEST(PerpendicularDistance, Examples) {
  EXPECT_DOUBLE_EQ(dist({0, 1}, {-1, 0}, {1, 0}), 1.0);
  EXPECT_NEAR(dist({0.5, 0.5}, {0, 0}, {1, 1}), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(dist({1, 1}, {0, 0}, {0, 0}), std::sqrt(2.0));
  // Infinite line, not segment: beyond b the distance is still to the line.
  EXPECT_NEAR(dist({3, 0}, {0, 0}, {1, 0}), 0.0, 1e-15);
}

TEST(SegmentPointDistance, ClampsToEndpoints) {
  const std::vector<double> p{3, 0}, a{0, 0}, b{1, 0};
  EXPECT_DOUBLE_EQ(ts::segment_point_distance(p, a, b), 2.0);
}

TEST(Simplify, CollinearCollapsesToEndpoints) {
  const auto out = ts::simplify(ns({{0, {0}}, {0.5, {0.5}}, {1, {1}}}), 0.01);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out.points()[0].t, 0);
  EXPECT_EQ(out.points()[1].t, 1);
}

TEST(Simplify, KeepDropDecidedByDistanceOracle) {
  // (0.5, 0.4) is 0.4 from the chord y = 0, which exceeds 0.3.
  const auto in = ns({{0, {0}}, {0.5, {0.4}}, {1, {0}}});
  const double d = oracle::point_segment({0.5, 0.4}, {0, 0}, {1, 0});
  EXPECT_NEAR(d, 0.4, 1e-12);
  EXPECT_EQ(ts::simplify(in, 0.3).size(), d > 0.3 ? 3u : 2u);
  EXPECT_EQ(ts::simplify(in, 0.5).size(), 2u);
}

TEST(Simplify, TwoPointSignalUnchanged) {
  const auto in = ns({{0, {0.3}}, {1, {0.9}}});
  EXPECT_EQ(ts::simplify(in, 1e-6), in);
  EXPECT_EQ(ts::simplify(in, 10.0), in);
}

TEST(Simplify, RejectsNonPositiveEpsilon) {
  EXPECT_THROW(ts::simplify(ns({{0, {0}}, {1, {1}}}), 0.0), ts::Error);
}

TEST(Simplify, GuaranteeIdempotenceAndMonotonicity) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> len(2, 50);
  std::uniform_real_distribution<double> eps(0.005, 0.3);
  for (int rep = 0; rep < 200; ++rep) {
    const auto raw = oracle::random_signal(rng, "s", len(rng), rep % 3 == 0 ? 2 : 1);
    const auto n = ts::normalize(raw, ts::NormalizationMode::local());
    const double e1 = eps(rng), e2 = eps(rng);
    const auto s = ts::simplify(n, e1);

    std::vector<std::vector<double>> poly;
    for (const auto& p : s.points()) poly.push_back(oracle::flat(p));
    for (const auto& p : n.points()) {
      EXPECT_LE(oracle::point_polyline(oracle::flat(p), poly), e1 + 1e-12);
    }
    EXPECT_EQ(s.points().front(), n.points().front());
    EXPECT_EQ(s.points().back(), n.points().back());
    EXPECT_EQ(ts::simplify(s, e1), s);
    const auto lo = std::min(e1, e2), hi = std::max(e1, e2);
    EXPECT_GE(ts::simplify(n, lo).size(), ts::simplify(n, hi).size());
  }
}

TEST(Describe, Examples) {
  auto d = ts::describe(ns({{0, {0}}, {1, {1}}}));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d[0].length, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(d[0].mid_spatial[0], 0.5);
  EXPECT_DOUBLE_EQ(d[0].mid_time, 0.5);
  EXPECT_DOUBLE_EQ(d[0].velocity[0], 1.0);

  d = ts::describe(ns({{0, {0.3}}, {0.5, {0.3}}}));
  EXPECT_DOUBLE_EQ(d[0].length, 0.5);
  EXPECT_DOUBLE_EQ(d[0].velocity[0], 0.0);

  d = ts::describe(ns({{0.2, {0.1}}, {0.6, {0.9}}}));
  EXPECT_NEAR(d[0].length, std::sqrt(0.16 + 0.64), 1e-12);
  EXPECT_NEAR(d[0].mid_time, 0.4, 1e-12);
  EXPECT_NEAR(d[0].mid_spatial[0], 0.5, 1e-12);
  EXPECT_NEAR(d[0].velocity[0], 2.0, 1e-12);
}

TEST(Describe, ZeroDurationIsDegenerate) {
  try {
    ts::describe(ns({{0, {0}}, {0, {1}}}));
    FAIL();
  } catch (const ts::Error& e) {
    EXPECT_EQ(e.kind(), ts::ErrorKind::kDegenerateSegment);
  }
}

TEST(Describe, CountAndDurationSum) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    const auto n = ts::normalize(oracle::random_signal(rng, "s", 3 + rep, 2), ts::NormalizationMode::local());
    const auto d = ts::describe(n);
    ASSERT_EQ(d.size(), n.size() - 1);
    double sum = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      sum += n.points()[k + 1].t - n.points()[k].t;
      EXPECT_EQ(d[k].velocity.size(), 2u);
    }
    EXPECT_NEAR(sum, n.points().back().t - n.points().front().t, 1e-12);
  }
}

TEST(DeduplicateSketch, KeepsLastOfEqualTimesAndDropsBacktracks) {
  const auto out = ts::deduplicate_sketch({{0, {0}}, {0, {1}}, {0.5, {0.2}}, {0.4, {0.9}}, {1, {0}}});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], (ts::NormalizedPoint{0, {1}}));
  EXPECT_EQ(out[1], (ts::NormalizedPoint{0.5, {0.2}}));
  EXPECT_EQ(out[2], (ts::NormalizedPoint{1, {0}}));
}
