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

#ifndef SEMMAP_STEREO_MATCHING_HPP_
#define SEMMAP_STEREO_MATCHING_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "semmap/config.hpp"
#include "semmap/image.hpp"

namespace semmap
{

/// Semi-global block matching parameters. Costs are in units of summed
/// [0, 1] intensity differences over the block.
struct MatchingParams
{
  int block_radius{3};
  int max_disparity{64};
  double p1_smooth{default_p1(3)};
  double p2_smooth{default_p2(3)};
  double uniqueness_ratio{1.15};
  int num_paths{8};
  bool subpixel{true};
  /// Columns u < max_disparity cannot see their full search range in the right
  /// image; compute_disparity marks them invalid.
  bool invalidate_left_border{true};

  static double default_p1(int block_radius);
  static double default_p2(int block_radius);

  /// Throws InvalidArgument unless 0 < p1 < p2, radius >= 1, max_disparity >= 1,
  /// num_paths is 4 or 8 and ratio >= 1.
  void validate() const;

  static MatchingParams from_config(const KeyValueConfig & cfg, const std::string & prefix);
  void to_config(KeyValueConfig & cfg, const std::string & prefix) const;
};

/// Dense W x H x (max_disparity + 1) cost volume, disparities contiguous per pixel.
class CostVolume
{
public:
  CostVolume() = default;
  CostVolume(int width, int height, int num_disparities, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  int num_disparities() const { return num_disparities_; }

  float & at(int x, int y, int d) { return data_[offset(x, y) + static_cast<std::size_t>(d)]; }
  float at(int x, int y, int d) const
  {
    return data_[offset(x, y) + static_cast<std::size_t>(d)];
  }
  std::span<float> costs(int x, int y)
  {
    return {data_.data() + offset(x, y), static_cast<std::size_t>(num_disparities_)};
  }
  std::span<const float> costs(int x, int y) const
  {
    return {data_.data() + offset(x, y), static_cast<std::size_t>(num_disparities_)};
  }
  std::vector<float> & raw() { return data_; }
  const std::vector<float> & raw() const { return data_; }

  bool operator==(const CostVolume &) const = default;

private:
  std::size_t offset(int x, int y) const
  {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
           static_cast<std::size_t>(num_disparities_);
  }

  int width_{0};
  int height_{0};
  int num_disparities_{0};
  std::vector<float> data_;
};

struct DisparityMap
{
  Image<float> disparity;
  Image<std::uint8_t> valid;

  DisparityMap() = default;
  DisparityMap(int w, int h) : disparity(w, h, 0.0f), valid(w, h, 0) {}

  int width() const { return disparity.width; }
  int height() const { return disparity.height; }
  bool is_valid(int x, int y) const { return valid.at(x, y) != 0; }
};

/// Aggregation path step (dx, dy).
struct PathDirection
{
  int dx{0};
  int dy{0};
};

/// First four are the horizontal/vertical paths used when num_paths == 4.
inline constexpr std::array<PathDirection, 8> kPathDirections{{
  {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1},
}};

/// cost(u, v, d) = sum over the block of |L(u+i, v+j) - R(u+i-d, v+j)|. Block
/// samples outside the image are clamped to the border; samples whose right
/// pixel falls left of the image cost 1 (the maximum difference).
/// Throws DimensionMismatch if the images differ in size.
CostVolume sad_cost_volume(
  const GrayImage & left, const GrayImage & right, const MatchingParams & params);

/// Sum of the path-wise recurrences over params.num_paths directions.
CostVolume sgm_aggregate(const CostVolume & costs, const MatchingParams & params);

/// L_r for one direction. Requires 0 <= p1 <= p2.
CostVolume aggregate_path(
  const CostVolume & costs, PathDirection direction, double p1_smooth, double p2_smooth);

/// Argmin per pixel with uniqueness and boundary rejection, optional parabola refinement.
DisparityMap winner_take_all(const CostVolume & costs, const MatchingParams & params);

/// Full matcher: SAD volume, aggregation, winner-take-all, then the optional
/// left border band.
DisparityMap compute_disparity(
  const GrayImage & left, const GrayImage & right, const MatchingParams & params);

/// 16-bit fixed point, 1/16 px units; 0 encodes an invalid pixel.
DisparityMap disparity_from_fixed_point(const Image<std::uint16_t> & raster);
Image<std::uint16_t> disparity_to_fixed_point(const DisparityMap & map);
DisparityMap load_disparity(const std::filesystem::path & path);
void save_disparity(const std::filesystem::path & path, const DisparityMap & map);

namespace reference
{

/// Direct block sums, one pixel at a time.
CostVolume sad_cost_volume(
  const GrayImage & left, const GrayImage & right, const MatchingParams & params);

/// Scan-order recurrence per direction, single threaded.
CostVolume sgm_aggregate(const CostVolume & costs, const MatchingParams & params);

}  // namespace reference

}  // namespace semmap

#endif  // SEMMAP_STEREO_MATCHING_HPP_
