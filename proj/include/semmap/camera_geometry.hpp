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

#ifndef SEMMAP_CAMERA_GEOMETRY_HPP_
#define SEMMAP_CAMERA_GEOMETRY_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "semmap/config.hpp"

namespace semmap
{

inline constexpr const char * kLeftCameraFrame = "left_camera";
inline constexpr const char * kWorldFrame = "world";

/// Rectified stereo pair. Camera frame: x right, y down, z forward.
struct CameraModel
{
  double focal_length_px{0.0};
  double baseline_m{0.0};
  double cx{0.0};
  double cy{0.0};
  int width{0};
  int height{0};

  /// Throws InvalidArgument unless f > 0, b > 0 and the principal point lies in the image.
  void validate() const;

  static CameraModel from_config(const KeyValueConfig & cfg);
  static CameraModel load(const std::filesystem::path & path);
  KeyValueConfig to_config() const;
};

struct Point3
{
  double x{0.0};
  double y{0.0};
  double z{0.0};
  std::string frame{kLeftCameraFrame};

  Eigen::Vector3d vec() const { return {x, y, z}; }
};

/// Left-image pixel plus disparity.
struct StereoObservation
{
  double u{0.0};
  double v{0.0};
  double disparity{0.0};
};

/// Rigid transform mapping coordinates in frame_from to frame_to: p' = R p + t.
class Pose
{
public:
  Pose() = default;

  /// Throws InvalidArgument if R is not a proper rotation within 1e-9.
  Pose(
    const Eigen::Matrix3d & rotation, const Eigen::Vector3d & translation, std::string frame_from,
    std::string frame_to);

  static Pose identity(const std::string & frame_from, const std::string & frame_to);
  /// Quaternion (w, x, y, z) is normalized before use.
  static Pose from_quaternion(
    const Eigen::Vector3d & translation, double qw, double qx, double qy, double qz,
    const std::string & frame_from, const std::string & frame_to);

  const Eigen::Matrix3d & rotation() const { return rotation_; }
  const Eigen::Vector3d & translation() const { return translation_; }
  const std::string & frame_from() const { return frame_from_; }
  const std::string & frame_to() const { return frame_to_; }

  Eigen::Vector3d apply(const Eigen::Vector3d & p) const { return rotation_ * p + translation_; }
  Pose inverse() const;

private:
  Eigen::Matrix3d rotation_{Eigen::Matrix3d::Identity()};
  Eigen::Vector3d translation_{Eigen::Vector3d::Zero()};
  std::string frame_from_{kLeftCameraFrame};
  std::string frame_to_{kWorldFrame};
};

/// Pose with the dataset timestamp stem it belongs to.
struct StampedPose
{
  std::string timestamp;
  Pose pose;
};

/// Pinhole stereo with principal-point offset:
/// Z = b f / d, X = (u - cx) Z / f, Y = (v - cy) Z / f.
/// Throws NonPositiveDisparity when d <= min_disparity, OutOfBounds outside the image.
Point3 triangulate(
  double u_l, double v_l, double disparity, const CameraModel & cam, double min_disparity = 0.5);

/// Right inverse of triangulate. Throws BehindCamera when z <= 0 and FrameMismatch for
/// points outside the left camera frame.
StereoObservation project(const Point3 & p, const CameraModel & cam);

/// Throws FrameMismatch when p.frame != pose.frame_from().
Point3 transform(const Point3 & p, const Pose & pose);

/// Returns outer ∘ inner. Throws FrameMismatch when inner.frame_to() != outer.frame_from().
Pose compose(const Pose & outer, const Pose & inner);

/// CSV rows: timestamp, x, y, z, qw, qx, qy, qz. An optional header row is skipped.
/// Poses map left_camera to world.
std::vector<StampedPose> load_poses_csv(const std::filesystem::path & path);
void save_poses_csv(const std::filesystem::path & path, const std::vector<StampedPose> & poses);

}  // namespace semmap

#endif  // SEMMAP_CAMERA_GEOMETRY_HPP_
