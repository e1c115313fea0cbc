// Copyright 2026 The semmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "semmap/stereo_matching.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>
#include <omp.h>

#include "test_util.hpp"

namespace semmap
{
namespace
{

GrayImage random_image(int w, int h, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  GrayImage img(w, h);
  for (auto & v : img.data) {
    v = u(rng);
  }
  return img;
}

// Right view of a fronto-parallel plane at integer disparity d: R(x) = L(x + d).
GrayImage shift_left(const GrayImage & left, int d)
{
  GrayImage right(left.width, left.height);
  for (int y = 0; y < left.height; ++y) {
    for (int x = 0; x < left.width; ++x) {
      right.at(x, y) = left.at(std::min(x + d, left.width - 1), y);
    }
  }
  return right;
}

GrayImage mirror(const GrayImage & img)
{
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      out.at(img.width - 1 - x, y) = img.at(x, y);
    }
  }
  return out;
}

CostVolume random_volume(int w, int h, int nd, std::uint64_t seed, bool integral = false)
{
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> k(0, 40);
  std::uniform_real_distribution<float> u(0.0f, 10.0f);
  CostVolume v(w, h, nd);
  for (auto & c : v.raw()) {
    c = integral ? static_cast<float>(k(rng)) : u(rng);
  }
  return v;
}

MatchingParams small_params(int radius, int max_d)
{
  MatchingParams p;
  p.block_radius = radius;
  p.max_disparity = max_d;
  p.p1_smooth = MatchingParams::default_p1(radius);
  p.p2_smooth = MatchingParams::default_p2(radius);
  return p;
}

// Direct translation of the path recurrence, visiting pixels in the order of a
// walk along the direction from every start pixel.
CostVolume oracle_path(const CostVolume & c, PathDirection r, double p1, double p2)
{
  const int w = c.width();
  const int h = c.height();
  const int nd = c.num_disparities();
  std::vector<double> l(static_cast<std::size_t>(w * h * nd), 0.0);
  auto idx = [&](int x, int y, int d) { return static_cast<std::size_t>((y * w + x) * nd + d); };
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const int px = x0 - r.dx;
      const int py = y0 - r.dy;
      if (px >= 0 && py >= 0 && px < w && py < h) {
        continue;
      }
      for (int d = 0; d < nd; ++d) {
        l[idx(x0, y0, d)] = c.at(x0, y0, d);
      }
      for (int x = x0 + r.dx, y = y0 + r.dy; x >= 0 && y >= 0 && x < w && y < h;
           x += r.dx, y += r.dy) {
        const int qx = x - r.dx;
        const int qy = y - r.dy;
        double m = std::numeric_limits<double>::infinity();
        for (int k = 0; k < nd; ++k) {
          m = std::min(m, l[idx(qx, qy, k)]);
        }
        for (int d = 0; d < nd; ++d) {
          double best = std::min(l[idx(qx, qy, d)], m + p2);
          if (d > 0) {
            best = std::min(best, l[idx(qx, qy, d - 1)] + p1);
          }
          if (d + 1 < nd) {
            best = std::min(best, l[idx(qx, qy, d + 1)] + p1);
          }
          l[idx(x, y, d)] = c.at(x, y, d) + best - m;
        }
      }
    }
  }
  CostVolume out(w, h, nd);
  for (std::size_t i = 0; i < l.size(); ++i) {
    out.raw()[i] = static_cast<float>(l[i]);
  }
  return out;
}

TEST(MatchingParamsTest, DefaultsAreValid)
{
  const MatchingParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.block_radius, 3);
  EXPECT_EQ(p.max_disparity, 64);
  EXPECT_EQ(p.num_paths, 8);
  EXPECT_DOUBLE_EQ(p.uniqueness_ratio, 1.15);
  EXPECT_LT(p.p1_smooth, p.p2_smooth);
  EXPECT_DOUBLE_EQ(p.p1_smooth, 8.0 * 49.0 / 255.0);
  EXPECT_DOUBLE_EQ(p.p2_smooth, 32.0 * 49.0 / 255.0);
}

TEST(MatchingParamsTest, ValidateRejects)
{
  MatchingParams p;
  p.p1_smooth = p.p2_smooth;
  EXPECT_SEMMAP_ERROR(p.validate(), InvalidArgument);
  p = MatchingParams{};
  p.p1_smooth = 0.0;
  EXPECT_SEMMAP_ERROR(p.validate(), InvalidArgument);
  p = MatchingParams{};
  p.block_radius = 0;
  EXPECT_SEMMAP_ERROR(p.validate(), InvalidArgument);
  p = MatchingParams{};
  p.max_disparity = 0;
  EXPECT_SEMMAP_ERROR(p.validate(), InvalidArgument);
  p = MatchingParams{};
  p.num_paths = 6;
  EXPECT_SEMMAP_ERROR(p.validate(), InvalidArgument);
  p = MatchingParams{};
  p.uniqueness_ratio = 0.9;
  EXPECT_SEMMAP_ERROR(p.validate(), InvalidArgument);
}

TEST(MatchingParamsTest, ConfigRoundTrip)
{
  MatchingParams p = small_params(2, 48);
  p.uniqueness_ratio = 2.0;
  p.num_paths = 4;
  p.subpixel = false;
  p.invalidate_left_border = false;
  KeyValueConfig cfg;
  p.to_config(cfg, "matching.");
  const MatchingParams back = MatchingParams::from_config(cfg, "matching.");
  EXPECT_EQ(back.block_radius, 2);
  EXPECT_EQ(back.max_disparity, 48);
  EXPECT_EQ(back.p1_smooth, p.p1_smooth);
  EXPECT_EQ(back.p2_smooth, p.p2_smooth);
  EXPECT_EQ(back.uniqueness_ratio, 2.0);
  EXPECT_EQ(back.num_paths, 4);
  EXPECT_FALSE(back.subpixel);
  EXPECT_FALSE(back.invalidate_left_border);
}

TEST(SadCostVolumeTest, IdenticalImagesZeroAtZeroDisparity)
{
  const GrayImage img = random_image(20, 15, 1);
  const CostVolume v = sad_cost_volume(img, img, small_params(2, 6));
  EXPECT_EQ(v.num_disparities(), 7);
  for (int y = 0; y < 15; ++y) {
    for (int x = 0; x < 20; ++x) {
      EXPECT_EQ(v.at(x, y, 0), 0.0f);
    }
  }
}

TEST(SadCostVolumeTest, ConstantImagesZeroAtInteriorDisparities)
{
  const GrayImage img(16, 8, 0.4f);
  const MatchingParams p = small_params(1, 5);
  const CostVolume v = sad_cost_volume(img, img, p);
  for (int y = 0; y < 8; ++y) {
    // Block columns x-1..x+1 (clamped) must see a right pixel at x' - d >= 0.
    for (int x = 0; x < 16; ++x) {
      for (int d = 0; d <= 5; ++d) {
        if (std::max(x - 1, 0) - d >= 0) {
          EXPECT_EQ(v.at(x, y, d), 0.0f) << x << "," << y << "," << d;
        }
      }
    }
  }
}

TEST(SadCostVolumeTest, ShiftedPairZeroAtTrueDisparity)
{
  const GrayImage left = random_image(40, 20, 2);
  const GrayImage right = shift_left(left, 5);
  const MatchingParams p = small_params(2, 10);
  const CostVolume v = sad_cost_volume(left, right, p);
  for (int y = 0; y < 20; ++y) {
    for (int x = 5 + 2; x < 40 - 2 - 5; ++x) {
      EXPECT_EQ(v.at(x, y, 5), 0.0f);
      EXPECT_GT(v.at(x, y, 4), 0.0f);
    }
  }
}

TEST(SadCostVolumeTest, OutOfRangeRightPixelsCostOne)
{
  const GrayImage img(6, 1, 0.5f);
  const CostVolume v = sad_cost_volume(img, img, small_params(1, 4));
  // At x = 0 with d = 3, all three block columns (0, 0, 1) fall off the right image, and
  // the block has 3 rows (clamped), so the cost is 9.
  EXPECT_EQ(v.at(0, 0, 3), 9.0f);
  // At x = 2 with d = 2: columns 1, 2, 3 map to -1, 0, 1, one column off.
  EXPECT_EQ(v.at(2, 0, 2), 3.0f);
}

TEST(SadCostVolumeTest, SwapSymmetryOnOverlap)
{
  // Swapping the images and mirroring both is the same as negating disparity.
  const int w = 48;
  const int h = 12;
  const int r = 2;
  const GrayImage left = random_image(w, h, 3);
  const GrayImage right = random_image(w, h, 4);
  const MatchingParams p = small_params(r, 8);
  const CostVolume a = sad_cost_volume(left, right, p);
  const CostVolume b = sad_cost_volume(mirror(right), mirror(left), p);
  for (int y = 0; y < h; ++y) {
    for (int d = 0; d <= 8; ++d) {
      for (int x = d + r; x + r < w; ++x) {
        EXPECT_NEAR(a.at(x, y, d), b.at(w - 1 - x + d, y, d), 1e-4f);
      }
    }
  }
}

TEST(SadCostVolumeTest, MatchesReference)
{
  const GrayImage left = random_image(37, 23, 5);
  const GrayImage right = random_image(37, 23, 6);
  const MatchingParams p = small_params(3, 12);
  const CostVolume fast = sad_cost_volume(left, right, p);
  const CostVolume slow = reference::sad_cost_volume(left, right, p);
  ASSERT_EQ(fast.raw().size(), slow.raw().size());
  for (std::size_t i = 0; i < fast.raw().size(); ++i) {
    EXPECT_NEAR(fast.raw()[i], slow.raw()[i], 1e-4f);
  }
}

TEST(SadCostVolumeTest, DimensionMismatch)
{
  EXPECT_SEMMAP_ERROR(
    sad_cost_volume(GrayImage(4, 4), GrayImage(5, 4), small_params(1, 2)), DimensionMismatch);
}

TEST(SgmTest, NoSmoothnessGivesScaledRawCost)
{
  const CostVolume raw = random_volume(9, 7, 5, 7, true);
  for (int paths : {4, 8}) {
    MatchingParams p;
    p.p1_smooth = 0.0;
    p.p2_smooth = 0.0;
    p.num_paths = paths;
    const CostVolume agg = sgm_aggregate(raw, p);
    for (std::size_t i = 0; i < raw.raw().size(); ++i) {
      EXPECT_EQ(agg.raw()[i], static_cast<float>(paths) * raw.raw()[i]);
    }
  }
}

TEST(SgmTest, HandUnrolledStrip)
{
  // C(x, d) for x = 0..2, d = 0..1; p1 = 1, p2 = 3, left-to-right path.
  CostVolume c(3, 1, 2);
  c.at(0, 0, 0) = 1;
  c.at(0, 0, 1) = 4;
  c.at(1, 0, 0) = 3;
  c.at(1, 0, 1) = 0;
  c.at(2, 0, 0) = 2;
  c.at(2, 0, 1) = 2;
  const CostVolume l = aggregate_path(c, {1, 0}, 1.0, 3.0);
  // x = 1: d0 = 3 + min(1, 4 + 1, 1 + 3) - 1 = 3, d1 = 0 + min(4, 1 + 1, 4) - 1 = 1.
  // x = 2: d0 = 2 + min(3, 1 + 1, 4) - 1 = 3, d1 = 2 + min(1, 3 + 1, 4) - 1 = 2.
  EXPECT_EQ(l.at(0, 0, 0), 1.0f);
  EXPECT_EQ(l.at(0, 0, 1), 4.0f);
  EXPECT_EQ(l.at(1, 0, 0), 3.0f);
  EXPECT_EQ(l.at(1, 0, 1), 1.0f);
  EXPECT_EQ(l.at(2, 0, 0), 3.0f);
  EXPECT_EQ(l.at(2, 0, 1), 2.0f);
}

TEST(SgmTest, EveryDirectionMatchesOracle)
{
  const CostVolume raw = random_volume(11, 8, 6, 8, true);
  for (const PathDirection dir : kPathDirections) {
    const CostVolume got = aggregate_path(raw, dir, 2.0, 9.0);
    const CostVolume want = oracle_path(raw, dir, 2.0, 9.0);
    EXPECT_EQ(got.raw(), want.raw()) << dir.dx << "," << dir.dy;
  }
}

TEST(SgmTest, ParallelMatchesReferenceExactly)
{
  const CostVolume raw = random_volume(31, 19, 9, 9);
  for (int paths : {4, 8}) {
    MatchingParams p;
    p.p1_smooth = 0.7;
    p.p2_smooth = 3.1;
    p.num_paths = paths;
    EXPECT_EQ(sgm_aggregate(raw, p).raw(), reference::sgm_aggregate(raw, p).raw());
  }
}

TEST(SgmTest, DeterministicAcrossThreadCounts)
{
  const CostVolume raw = random_volume(40, 30, 8, 10);
  const MatchingParams p;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const CostVolume one = sgm_aggregate(raw, p);
  omp_set_num_threads(4);
  const CostVolume four = sgm_aggregate(raw, p);
  omp_set_num_threads(saved);
  EXPECT_EQ(one.raw(), four.raw());
}

TEST(SgmTest, ConstantOffsetKeepsArgmin)
{
  const CostVolume raw = random_volume(15, 12, 7, 11, true);
  CostVolume shifted = raw;
  for (auto & c : shifted.raw()) {
    c += 13.0f;
  }
  MatchingParams p;
  p.p1_smooth = 2.0;
  p.p2_smooth = 8.0;
  p.subpixel = false;
  p.uniqueness_ratio = 1.0;
  const DisparityMap a = winner_take_all(sgm_aggregate(raw, p), p);
  const DisparityMap b = winner_take_all(sgm_aggregate(shifted, p), p);
  // Validity may change through the ratio test; the argmin itself may not.
  const CostVolume aa = sgm_aggregate(raw, p);
  const CostVolume bb = sgm_aggregate(shifted, p);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 15; ++x) {
      const auto ca = aa.costs(x, y);
      const auto cb = bb.costs(x, y);
      EXPECT_EQ(
        std::min_element(ca.begin(), ca.end()) - ca.begin(),
        std::min_element(cb.begin(), cb.end()) - cb.begin());
      if (a.is_valid(x, y) && b.is_valid(x, y)) {
        EXPECT_EQ(a.disparity.at(x, y), b.disparity.at(x, y));
      }
    }
  }
}

CostVolume single_pixel(std::initializer_list<float> costs)
{
  CostVolume v(1, 1, static_cast<int>(costs.size()));
  int d = 0;
  for (float c : costs) {
    v.at(0, 0, d++) = c;
  }
  return v;
}

TEST(WinnerTakeAllTest, ClearMinimum)
{
  MatchingParams p;
  p.subpixel = false;
  const DisparityMap m = winner_take_all(single_pixel({3, 1, 2}), p);
  EXPECT_TRUE(m.is_valid(0, 0));
  EXPECT_EQ(m.disparity.at(0, 0), 1.0f);
}

TEST(WinnerTakeAllTest, ParabolaRefinement)
{
  MatchingParams p;
  const DisparityMap m = winner_take_all(single_pixel({3, 1, 2}), p);
  ASSERT_TRUE(m.is_valid(0, 0));
  // Vertex of the parabola through (0, 3), (1, 1), (2, 2): 1 + (3 - 2) / (2 * 3).
  EXPECT_NEAR(m.disparity.at(0, 0), 1.0 + 1.0 / 6.0, 1e-6);
}

TEST(WinnerTakeAllTest, AmbiguousAndFlatAreInvalid)
{
  MatchingParams p;
  EXPECT_FALSE(winner_take_all(single_pixel({1, 1, 5}), p).is_valid(0, 0));
  EXPECT_FALSE(winner_take_all(single_pixel({2, 2, 2, 2, 2}), p).is_valid(0, 0));
}

TEST(WinnerTakeAllTest, UniquenessRatio)
{
  MatchingParams p;
  p.subpixel = false;
  // Best 1.0 at d = 2; runner-up outside the +-1 window is 1.1 at d = 4.
  const CostVolume v = single_pixel({5, 3, 1, 3, 1.1f, 6});
  p.uniqueness_ratio = 1.05;
  EXPECT_TRUE(winner_take_all(v, p).is_valid(0, 0));
  p.uniqueness_ratio = 1.15;
  EXPECT_FALSE(winner_take_all(v, p).is_valid(0, 0));
}

TEST(WinnerTakeAllTest, BoundaryMinimumIsInvalid)
{
  MatchingParams p;
  EXPECT_FALSE(winner_take_all(single_pixel({0, 5, 6, 7}), p).is_valid(0, 0));
  EXPECT_FALSE(winner_take_all(single_pixel({7, 6, 5, 0}), p).is_valid(0, 0));
}

TEST(ComputeDisparityTest, ConstantDisparityPair)
{
  const int w = 96;
  const int h = 48;
  const int d = 7;
  const GrayImage left = random_image(w, h, 12);
  const GrayImage right = shift_left(left, d);
  MatchingParams p = small_params(2, 16);
  const DisparityMap m = compute_disparity(left, right, p);
  int interior = 0;
  int correct = 0;
  for (int y = 2; y < h - 2; ++y) {
    for (int x = p.max_disparity; x < w - d - 2; ++x) {
      ++interior;
      if (m.is_valid(x, y) && std::abs(m.disparity.at(x, y) - d) <= 1.0f) {
        ++correct;
      }
    }
  }
  EXPECT_GE(correct, 0.95 * interior);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < p.max_disparity; ++x) {
      EXPECT_FALSE(m.is_valid(x, y));
    }
  }
}

TEST(ComputeDisparityTest, LeftBorderBandIsOptional)
{
  const GrayImage left = random_image(64, 16, 13);
  const GrayImage right = shift_left(left, 4);
  MatchingParams p = small_params(2, 8);
  p.invalidate_left_border = false;
  const DisparityMap m = compute_disparity(left, right, p);
  int valid_in_band = 0;
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 8; ++x) {
      valid_in_band += m.is_valid(x, y) ? 1 : 0;
    }
  }
  EXPECT_GT(valid_in_band, 0);
}

TEST(DisparityIoTest, FixedPointRoundTrip)
{
  testing::TempDir dir;
  DisparityMap m(4, 2);
  m.disparity.at(0, 0) = 12.5f;
  m.valid.at(0, 0) = 1;
  m.disparity.at(3, 1) = 0.0625f;
  m.valid.at(3, 1) = 1;
  m.disparity.at(2, 0) = 9.0f;  // invalid pixels are not stored
  save_disparity(dir / "d.png", m);
  const DisparityMap back = load_disparity(dir / "d.png");
  EXPECT_EQ(back.valid, m.valid);
  EXPECT_EQ(back.disparity.at(0, 0), 12.5f);
  EXPECT_EQ(back.disparity.at(3, 1), 0.0625f);
  EXPECT_EQ(back.disparity.at(2, 0), 0.0f);
}

}  // namespace
}  // namespace semmap
