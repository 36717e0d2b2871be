#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "seisloc/raytrace.hpp"

using namespace seisloc;

TEST(Raytrace, DegenerateRay) {
  auto row = trace_ray({0.5, 0.5}, {0.5, 0.5}, FieldConfig::square(10));
  EXPECT_TRUE(row.entries.empty());
  EXPECT_EQ(row.total_length, 0.0);
}

TEST(Raytrace, AxisAlignedBottomRow) {
  auto f = FieldConfig::square(10);
  auto row = trace_ray({0.05, 0.05}, {0.95, 0.05}, f);
  ASSERT_EQ(row.entries.size(), 10u);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(row.entries[i].first, i * 10);
    const double expected = (i == 0 || i == 9) ? 0.05 : 0.10;
    EXPECT_NEAR(row.entries[i].second, expected, 1e-12);
  }
  EXPECT_NEAR(row.total_length, 0.90, 1e-12);
}

TEST(Raytrace, MatchesFineSamplingOracle) {
  auto f = FieldConfig::square(10);
  const Point a{0.12, 0.33}, b{0.87, 0.61};
  auto row = trace_ray(a, b, f);
  auto oracle = oracle::sampled_ray_lengths(a, b, f, 1'000'000);
  ASSERT_EQ(row.entries.size(), oracle.size());
  for (const auto& [cell, len] : row.entries) {
    ASSERT_TRUE(oracle.count(cell)) << cell;
    EXPECT_NEAR(len, oracle.at(cell), 1e-4);
  }
}

TEST(Raytrace, RandomRaysConserveLengthAndAreSymmetric) {
  auto f = FieldConfig::square(20);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
    auto row = trace_ray(a, b, f);
    double sum = 0.0;
    for (const auto& e : row.entries) {
      EXPECT_GE(e.second, 0.0);
      EXPECT_GE(e.first, 0);
      EXPECT_LT(e.first, f.cells());
      sum += e.second;
    }
    EXPECT_NEAR(sum, distance(a, b), 1e-9);
    EXPECT_LE(std::abs(sum - distance(a, b)), 1e-6 * distance(a, b));
    auto back = trace_ray(b, a, f);
    EXPECT_EQ(row.entries, back.entries);
  }
}

TEST(Raytrace, CreditedCellsAreIntersected) {
  auto f = FieldConfig{1.0, 1.0, 13, 9};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 25; ++k) {
    Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
    auto row = trace_ray(a, b, f);
    auto oracle = oracle::sampled_ray_lengths(a, b, f, 200'000);
    for (const auto& [cell, len] : row.entries) {
      if (len > 1e-5) {
        EXPECT_TRUE(oracle.count(cell)) << "cell " << cell;
      }
      EXPECT_NEAR(len, oracle.count(cell) ? oracle.at(cell) : 0.0, 2e-5);
    }
  }
}

TEST(Raytrace, RayAlongGridlineGoesToLargerIndex) {
  auto f = FieldConfig::square(10);
  auto row = trace_ray({0.5, 0.05}, {0.5, 0.25}, f);
  for (const auto& e : row.entries) EXPECT_EQ(e.first / 10, 5);
  auto edge = trace_ray({1.0, 0.0}, {1.0, 1.0}, f);
  for (const auto& e : edge.entries) EXPECT_EQ(e.first / 10, 9);
  EXPECT_NEAR(edge.total_length, 1.0, 1e-12);
}

TEST(Raytrace, OutOfFieldEndpoint) {
  EXPECT_THROW(trace_ray({0.5, 0.5}, {1.2, 0.5}, FieldConfig::square(10)), OutOfFieldError);
}

TEST(Raytrace, EventMatrixFromCenter) {
  auto f = FieldConfig::square(10);
  auto sensors = place_boundary_sensors(f);
  auto a = assemble_event_matrix({0.5, 0.5}, sensors, f);
  ASSERT_EQ(a.rows.size(), 8u);
  for (int m = 0; m < 4; ++m) EXPECT_NEAR(a.rows[m].total_length, std::sqrt(0.5), 1e-12);
  for (int m = 4; m < 8; ++m) EXPECT_NEAR(a.rows[m].total_length, 0.5, 1e-12);
}

TEST(Raytrace, EventMatrixAtSensorAndRandom) {
  auto f = FieldConfig::square(20);
  auto sensors = place_boundary_sensors(f);
  auto a = assemble_event_matrix(sensors[0], sensors, f);
  EXPECT_TRUE(a.rows[0].entries.empty());
  EXPECT_EQ(a.rows[0].total_length, 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    Point p{u(rng), u(rng)};
    auto m = assemble_event_matrix(p, sensors, f);
    for (int s = 0; s < sensors.size(); ++s) {
      double sum = 0.0;
      for (const auto& e : m.rows[s].entries) sum += e.second;
      const double d = std::sqrt((p.x - sensors[s].x) * (p.x - sensors[s].x) + (p.y - sensors[s].y) * (p.y - sensors[s].y));
      EXPECT_NEAR(sum, d, 1e-9);
    }
  }
}
