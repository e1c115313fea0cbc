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

#ifndef SEMMAP_PLANE_BASELINE_HPP_
#define SEMMAP_PLANE_BASELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "semmap/camera_geometry.hpp"
#include "semmap/config.hpp"
#include "semmap/labeling.hpp"
#include "semmap/point_cloud.hpp"
#include "semmap/voxel_fusion.hpp"

namespace semmap
{

/// Plane n . x = offset with unit normal.
struct PlaneModel
{
  Eigen::Vector3d normal{0.0, 0.0, 1.0};
  double offset_m{0.0};

  double signed_distance(const Eigen::Vector3d & p) const { return normal.dot(p) - offset_m; }

  /// Plane through three points; nullopt when they are (nearly) collinear.
  static std::optional<PlaneModel> through(
    const Eigen::Vector3d & a, const Eigen::Vector3d & b, const Eigen::Vector3d & c);

  /// Flips (n, offset) so that the sensor lies on the positive side.
  PlaneModel oriented_towards(const Eigen::Vector3d & sensor) const;
};

struct MlesacParams
{
  int iterations{500};
  double inlier_sigma_m{0.02};
  /// Support of the uniform outlier density.
  double outlier_span_m{2.0};
  int em_steps{5};
  double min_sample_separation_m{0.05};
  std::uint64_t seed{0};
  /// Hypotheses are scored on at most this many points (evenly strided); 0 scores all.
  std::size_t max_fit_points{20000};

  void validate() const;
  static MlesacParams from_config(const KeyValueConfig & cfg, const std::string & prefix);
  void to_config(KeyValueConfig & cfg, const std::string & prefix) const;
};

struct HeightClassifierParams
{
  double rock_height_threshold_m{0.05};

  void validate() const;
  static HeightClassifierParams from_config(
    const KeyValueConfig & cfg, const std::string & prefix);
  void to_config(KeyValueConfig & cfg, const std::string & prefix) const;
};

struct MlesacScore
{
  /// Negative log-likelihood of the Gaussian-inlier / uniform-outlier mixture.
  double cost{0.0};
  /// Mixing coefficient after the EM steps.
  double inlier_fraction{0.0};
};

MlesacScore mlesac_score(
  std::span<const Eigen::Vector3d> points, const PlaneModel & plane, const MlesacParams & params);

/// Posterior inlier probability of one residual under the mixture.
double inlier_posterior(double residual, double inlier_fraction, const MlesacParams & params);

struct MlesacResult
{
  PlaneModel plane;
  std::vector<std::uint8_t> inliers;
  double cost{0.0};
  double inlier_fraction{0.0};
  /// Best sampled hypothesis before least-squares refinement.
  PlaneModel hypothesis;
  int best_iteration{-1};
  bool refined{false};
  /// Cost of every sampled hypothesis; +inf where no valid sample was drawn.
  std::vector<double> candidate_costs;
};

/// Maximum-likelihood sample consensus. The returned plane is the least-squares
/// refit on posterior inliers when that does not raise the cost, else the best
/// hypothesis; oriented so that `sensor` is on its positive side.
/// Throws TooFewPoints (< 3 points) or DegenerateGeometry (no valid sample).
MlesacResult mlesac_plane(
  std::span<const Eigen::Vector3d> points, const MlesacParams & params,
  const Eigen::Vector3d & sensor = Eigen::Vector3d::Zero());

/// Total least squares plane over masked points (all when mask is empty).
/// Throws TooFewPoints or DegenerateGeometry.
PlaneModel fit_plane_least_squares(
  std::span<const Eigen::Vector3d> points, std::span<const std::uint8_t> mask = {});

/// Rocks where the signed height above the plane exceeds the threshold, else Sand.
std::vector<Label> classify_by_height(
  std::span<const Eigen::Vector3d> points, const PlaneModel & plane,
  const HeightClassifierParams & params);

struct BaselineFrameResult
{
  MlesacResult fit;
  InsertStats stats;
};

/// Fits the ground plane in the sensor frame, labels the cloud by height and
/// fuses it through SemanticVoxelGrid::insert_labeled_cloud.
BaselineFrameResult baseline_pipeline(
  const PointCloud & cloud, const Pose & sensor_pose, SemanticVoxelGrid & grid,
  const MlesacParams & mlesac, const HeightClassifierParams & classifier);

namespace reference
{

/// Single-threaded hypothesis loop; same result as semmap::mlesac_plane.
MlesacResult mlesac_plane(
  std::span<const Eigen::Vector3d> points, const MlesacParams & params,
  const Eigen::Vector3d & sensor = Eigen::Vector3d::Zero());

}  // namespace reference

}  // namespace semmap

#endif  // SEMMAP_PLANE_BASELINE_HPP_
