#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

#include "dainr/autodiff/ops.hpp"
#include "dainr/encodings/frequency.hpp"
#include "dainr/encodings/hash_grid.hpp"
#include "test_support.hpp"

namespace ad = dainr::ad;
using dainr::HashGrid;
using dainr::HashGridConfig;
using dainr::testing::expect_gradients_match;
using dainr::testing::random_tensor;

TEST(FrequencyEncoding, ZeroInput) {
  auto v = dainr::frequency_encode(0.0, 3);
  std::vector<double> want{0, 1, 0, 1, 0, 1};
  ASSERT_EQ(v.size(), want.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], want[i], 1e-15);
}

TEST(FrequencyEncoding, UnitInputSingleBand) {
  auto v = dainr::frequency_encode(1.0, 1);
  EXPECT_NEAR(v[0], 0.0, 1e-15);
  EXPECT_NEAR(v[1], -1.0, 1e-15);
}

TEST(FrequencyEncoding, QuarterInputTwoBands) {
  auto v = dainr::frequency_encode(0.25, 2);
  EXPECT_NEAR(v[0], 0.70710678118654752, 1e-15);
  EXPECT_NEAR(v[1], 0.70710678118654752, 1e-15);
  EXPECT_NEAR(v[2], 1.0, 1e-15);
  EXPECT_NEAR(v[3], 0.0, 1e-15);
}

TEST(FrequencyEncoding, OutputsBoundedAndBatchMatchesScalar) {
  ad::Tape<double> tape;
  auto p = random_tensor({7, 3}, 21, -3.0, 3.0, false);
  auto y = dainr::frequency_encode(tape, p, 6);
  ASSERT_EQ(y.shape(), (ad::Shape{7, 36}));
  for (std::size_t b = 0; b < 7; ++b)
    for (std::size_t d = 0; d < 3; ++d) {
      auto ref = dainr::frequency_encode(p.values()[b * 3 + d], 6);
      for (int k = 0; k < 12; ++k) {
        const double v = y.values()[b * 36 + d * 12 + k];
        EXPECT_NEAR(v, ref[k], 1e-14);
        EXPECT_LE(std::abs(v), 1.0);
      }
    }
}

TEST(FrequencyEncoding, GradientMatchesFiniteDifferences) {
  auto p = random_tensor({5, 2}, 22);
  auto w = random_tensor({5, 40}, 23, -1, 1, false);
  expect_gradients_match(
      [&](ad::Tape<double>& t) {
        return ad::sum(t, ad::multiply(t, dainr::frequency_encode(t, p, 10), w));
      },
      {p}, 1e-7, 1e-5);
}

TEST(HashGridConfig, ResolutionsFollowGrowth) {
  HashGridConfig cfg;
  EXPECT_EQ(dainr::grid_resolution(0, cfg), 16);
  EXPECT_EQ(dainr::grid_resolution(3, cfg), 128);
  EXPECT_THROW(dainr::grid_resolution(16, cfg), dainr::InvalidArgument);
  EXPECT_THROW(dainr::grid_resolution(-1, cfg), dainr::InvalidArgument);
}

TEST(HashGridConfig, GrowthFromFinestResolution) {
  HashGridConfig cfg;
  cfg.max_resolution = 512;
  EXPECT_NEAR(cfg.growth_ratio(), 1.2599210498948732, 1e-12);
  EXPECT_EQ(dainr::grid_resolution(15, cfg), 512);
  EXPECT_EQ(dainr::grid_resolution(3, cfg), 32);
  EXPECT_EQ(dainr::grid_resolution(5, cfg), 50);
}

TEST(HashGridConfig, ValidationRejectsBadTables) {
  HashGridConfig cfg;
  cfg.table_size = 1000;
  EXPECT_THROW(cfg.validate(), dainr::InvalidArgument);
  cfg.table_size = 1024;
  cfg.features = 0;
  EXPECT_THROW(cfg.validate(), dainr::InvalidArgument);
}

TEST(HashIndex, DenseRegimeIsRowMajor) {
  HashGridConfig cfg;
  EXPECT_EQ(dainr::hash_index<2>({0, 0}, 0, cfg), 0u);
  EXPECT_EQ(dainr::hash_index<2>({1, 0}, 0, cfg), 1u);
  EXPECT_EQ(dainr::hash_index<2>({0, 1}, 0, cfg), 17u);
  EXPECT_THROW(dainr::hash_index<2>({17, 0}, 0, cfg), dainr::InvalidArgument);
}

TEST(HashIndex, DenseRegimeIsInjective) {
  HashGridConfig cfg;
  cfg.table_size = 1 << 10;
  cfg.min_resolution = 8;
  std::set<std::uint32_t> seen;
  for (std::uint32_t y = 0; y <= 8; ++y)
    for (std::uint32_t x = 0; x <= 8; ++x) seen.insert(dainr::hash_index<2>({x, y}, 0, cfg));
  EXPECT_EQ(seen.size(), 81u);
}

TEST(HashIndex, HashedRegimeInRangeAndDeterministic) {
  HashGridConfig cfg;
  cfg.table_size = 1 << 12;
  ASSERT_FALSE(dainr::dense_level<2>(3, cfg));
  std::mt19937 gen(5);
  const int res = dainr::grid_resolution(3, cfg);
  std::uniform_int_distribution<std::uint32_t> dist(0, res);
  for (int i = 0; i < 1000; ++i) {
    std::array<std::uint32_t, 2> v{dist(gen), dist(gen)};
    const auto a = dainr::hash_index<2>(v, 3, cfg);
    EXPECT_LT(a, cfg.table_size);
    EXPECT_EQ(a, dainr::hash_index<2>(v, 3, cfg));
    EXPECT_EQ(a, (v[0] ^ (v[1] * 2654435761u)) & (cfg.table_size - 1));
  }
}

namespace {
HashGridConfig small_config() {
  HashGridConfig cfg;
  cfg.levels = 4;
  cfg.table_size = 1 << 8;
  cfg.min_resolution = 4;
  cfg.growth = 2.0;
  cfg.init_range = 1.0;
  return cfg;
}
}  // namespace

TEST(HashGrid, LevelLayout) {
  dainr::Rng rng(1);
  HashGrid<double, 2> grid(small_config(), rng);
  EXPECT_TRUE(grid.dense(0));
  EXPECT_EQ(grid.level_entries(0), 25u);
  EXPECT_EQ(grid.level_entries(1), 81u);
  EXPECT_FALSE(grid.dense(2));
  EXPECT_EQ(grid.level_entries(2), 256u);
  EXPECT_EQ(grid.table().dim(0), 25u + 81u + 256u + 256u);
  EXPECT_EQ(grid.output_dim(), 8);
}

TEST(HashGrid, ExactAtVertices) {
  dainr::Rng rng(2);
  auto cfg = small_config();
  cfg.levels = 1;
  HashGrid<double, 2> grid(cfg, rng);
  auto tv = grid.table().values();
  for (std::uint32_t iy = 0; iy <= 4; ++iy)
    for (std::uint32_t ix = 0; ix <= 4; ++ix) {
      const double x = -1.0 + 2.0 * ix / 4;
      const double y = -1.0 + 2.0 * iy / 4;
      auto out = grid.encode_point({x, y});
      const auto idx = dainr::hash_index<2>({ix, iy}, 0, cfg);
      EXPECT_NEAR(out[0], tv[idx * 2], 1e-14);
      EXPECT_NEAR(out[1], tv[idx * 2 + 1], 1e-14);
    }
}

TEST(HashGrid, VerticesExactAtEveryLevel) {
  dainr::Rng rng(3);
  auto cfg = small_config();
  HashGrid<double, 2> grid(cfg, rng);
  // (0, 0) maps to a vertex of every level of even resolution.
  auto out = grid.encode_point({0.0, 0.0});
  auto tv = grid.table().values();
  for (int l = 0; l < cfg.levels; ++l) {
    const std::uint32_t mid = grid.resolution(l) / 2;
    const auto idx = grid.level_offset(l) + dainr::hash_index<2>({mid, mid}, l, cfg);
    EXPECT_NEAR(out[l * 2], tv[idx * 2], 1e-14);
  }
}

TEST(HashGrid, CellCentreIsCornerMean) {
  dainr::Rng rng(4);
  auto cfg = small_config();
  cfg.levels = 1;
  HashGrid<double, 2> grid(cfg, rng);
  auto tv = grid.table().values();
  // cell (1, 2) of a 4x4 grid, centre at pos (1.5, 2.5)
  auto out = grid.encode_point({-1.0 + 2 * 1.5 / 4, -1.0 + 2 * 2.5 / 4});
  double mean = 0.0;
  for (std::uint32_t dy = 0; dy < 2; ++dy)
    for (std::uint32_t dx = 0; dx < 2; ++dx)
      mean += tv[dainr::hash_index<2>({1 + dx, 2 + dy}, 0, cfg) * 2] / 4;
  EXPECT_NEAR(out[0], mean, 1e-14);
}

TEST(HashGrid, CornerWeightsSumToOne) {
  dainr::Rng rng(5);
  HashGrid<double, 2> grid(small_config(), rng);
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  HashGrid<double, 2>::Corners c;
  for (int i = 0; i < 200; ++i) {
    const double x[2] = {dist(gen), dist(gen)};
    for (int l = 0; l < 4; ++l) {
      grid.locate(x, l, c);
      double s = 0;
      for (double w : c.weight) s += w;
      EXPECT_NEAR(s, 1.0, 1e-14);
    }
  }
}

TEST(HashGrid, ClampsOutOfRangeAndRejectsNaN) {
  dainr::Rng rng(6);
  HashGrid<double, 2> grid(small_config(), rng);
  auto inside = grid.encode_point({1.0, -1.0});
  auto outside = grid.encode_point({3.5, -7.0});
  for (std::size_t i = 0; i < inside.size(); ++i) EXPECT_EQ(inside[i], outside[i]);
  ad::Tape<double> tape;
  auto bad = ad::Tensor<double>::from({1, 2}, {std::numeric_limits<double>::quiet_NaN(), 0.0});
  EXPECT_THROW(grid.encode(tape, bad), dainr::InvalidArgument);
}

TEST(HashGrid, ContinuousInCoordinate) {
  dainr::Rng rng(7);
  HashGrid<double, 2> grid(small_config(), rng);
  auto a = grid.encode_point({0.3, -0.2});
  auto b = grid.encode_point({0.3 + 1e-9, -0.2 - 1e-9});
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-7);
}

TEST(HashGrid, GradientsToTableAndCoordinates) {
  dainr::Rng rng(8);
  HashGrid<double, 2> grid(small_config(), rng);
  auto coords = random_tensor({6, 2}, 30, -0.95, 0.95);
  auto w = random_tensor({6, 8}, 31, -1, 1, false);
  expect_gradients_match(
      [&](ad::Tape<double>& t) { return ad::sum(t, ad::multiply(t, grid.encode(t, coords), w)); },
      {grid.table(), coords}, 1e-7, 1e-5);
}

TEST(HashGrid, ThreeDimensionalEncodeAgreesWithPointPath) {
  dainr::Rng rng(9);
  HashGrid<double, 3> grid(small_config(), rng);
  auto coords = random_tensor({4, 3}, 32, -1, 1, false);
  ad::Tape<double> tape;
  auto y = grid.encode(tape, coords);
  for (std::size_t b = 0; b < 4; ++b) {
    auto cv = coords.values();
    auto ref = grid.encode_point({cv[b * 3], cv[b * 3 + 1], cv[b * 3 + 2]});
    for (int k = 0; k < 8; ++k) EXPECT_NEAR(y.values()[b * 8 + k], ref[k], 1e-14);
  }
}
