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

#include "semmap/camera_geometry.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Geometry>

#include "semmap/error.hpp"

namespace semmap
{

void CameraModel::validate() const
{
  if (!(focal_length_px > 0.0) || !std::isfinite(focal_length_px)) {
    throw Error(ErrorCode::InvalidArgument, "focal_px must be positive");
  }
  if (!(baseline_m > 0.0) || !std::isfinite(baseline_m)) {
    throw Error(ErrorCode::InvalidArgument, "baseline_m must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw Error(ErrorCode::InvalidArgument, "principal point outside the image");
  }
}

CameraModel CameraModel::from_config(const KeyValueConfig & cfg)
{
  CameraModel cam;
  cam.focal_length_px = cfg.get_double("focal_px");
  cam.baseline_m = cfg.get_double("baseline_m");
  cam.cx = cfg.get_double("cx");
  cam.cy = cfg.get_double("cy");
  cam.width = static_cast<int>(cfg.get_int("width"));
  cam.height = static_cast<int>(cfg.get_int("height"));
  cam.validate();
  return cam;
}

CameraModel CameraModel::load(const std::filesystem::path & path)
{
  return from_config(KeyValueConfig::load(path));
}

KeyValueConfig CameraModel::to_config() const
{
  KeyValueConfig cfg;
  cfg.set("focal_px", format_double(focal_length_px));
  cfg.set("baseline_m", format_double(baseline_m));
  cfg.set("cx", format_double(cx));
  cfg.set("cy", format_double(cy));
  cfg.set("width", std::to_string(width));
  cfg.set("height", std::to_string(height));
  return cfg;
}

Pose::Pose(
  const Eigen::Matrix3d & rotation, const Eigen::Vector3d & translation, std::string frame_from,
  std::string frame_to)
: rotation_(rotation),
  translation_(translation),
  frame_from_(std::move(frame_from)),
  frame_to_(std::move(frame_to))
{
  const double ortho_err = (rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity()).norm();
  if (!(ortho_err <= 1e-9) || !(std::abs(rotation_.determinant() - 1.0) <= 1e-9)) {
    throw Error(ErrorCode::InvalidArgument, "rotation is not orthonormal with det +1");
  }
  if (!translation_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "translation is not finite");
  }
}

Pose Pose::identity(const std::string & frame_from, const std::string & frame_to)
{
  return Pose(Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero(), frame_from, frame_to);
}

Pose Pose::from_quaternion(
  const Eigen::Vector3d & translation, double qw, double qx, double qy, double qz,
  const std::string & frame_from, const std::string & frame_to)
{
  Eigen::Quaterniond q(qw, qx, qy, qz);
  if (!(q.norm() > 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "zero quaternion");
  }
  q.normalize();
  return Pose(q.toRotationMatrix(), translation, frame_from, frame_to);
}

Pose Pose::inverse() const
{
  const Eigen::Matrix3d rt = rotation_.transpose();
  return Pose(rt, -(rt * translation_), frame_to_, frame_from_);
}

Point3 triangulate(
  double u_l, double v_l, double disparity, const CameraModel & cam, double min_disparity)
{
  if (!(disparity > min_disparity)) {
    throw Error(
      ErrorCode::NonPositiveDisparity,
      "disparity " + format_double(disparity) + " <= " + format_double(min_disparity));
  }
  if (!(u_l >= 0.0 && u_l < cam.width && v_l >= 0.0 && v_l < cam.height)) {
    throw Error(
      ErrorCode::OutOfBounds, "pixel (" + format_double(u_l) + ", " + format_double(v_l) + ")");
  }
  const double z = cam.baseline_m * cam.focal_length_px / disparity;
  return Point3{
    (u_l - cam.cx) * z / cam.focal_length_px, (v_l - cam.cy) * z / cam.focal_length_px, z,
    kLeftCameraFrame};
}

StereoObservation project(const Point3 & p, const CameraModel & cam)
{
  if (p.frame != kLeftCameraFrame) {
    throw Error(ErrorCode::FrameMismatch, "cannot project a point in '" + p.frame + "'");
  }
  if (!(p.z > 0.0)) {
    throw Error(ErrorCode::BehindCamera, "z = " + format_double(p.z));
  }
  return StereoObservation{
    cam.cx + cam.focal_length_px * p.x / p.z, cam.cy + cam.focal_length_px * p.y / p.z,
    cam.baseline_m * cam.focal_length_px / p.z};
}

Point3 transform(const Point3 & p, const Pose & pose)
{
  if (p.frame != pose.frame_from()) {
    throw Error(
      ErrorCode::FrameMismatch, "point in '" + p.frame + "', pose expects '" + pose.frame_from() +
                                  "'");
  }
  const Eigen::Vector3d q = pose.apply(p.vec());
  return Point3{q.x(), q.y(), q.z(), pose.frame_to()};
}

Pose compose(const Pose & outer, const Pose & inner)
{
  if (inner.frame_to() != outer.frame_from()) {
    throw Error(
      ErrorCode::FrameMismatch,
      "cannot chain '" + inner.frame_to() + "' into '" + outer.frame_from() + "'");
  }
  return Pose(
    outer.rotation() * inner.rotation(), outer.rotation() * inner.translation() +
                                           outer.translation(),
    inner.frame_from(), outer.frame_to());
}

std::vector<StampedPose> load_poses_csv(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::vector<StampedPose> poses;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') {
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(t);
    std::string field;
    while (std::getline(ss, field, ',')) {
      fields.push_back(trim(field));
    }
    if (line_no == 1 && !fields.empty() && fields.front() == "timestamp") {
      continue;
    }
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != 8) {
      throw Error(ErrorCode::ParseError, where + ": expected 8 fields");
    }
    double v[7];
    for (int i = 0; i < 7; ++i) {
      v[i] = parse_double(fields[i + 1], where);
    }
    poses.push_back(StampedPose{
      fields[0], Pose::from_quaternion(
                   {v[0], v[1], v[2]}, v[3], v[4], v[5], v[6], kLeftCameraFrame, kWorldFrame)});
  }
  return poses;
}

void save_poses_csv(const std::filesystem::path & path, const std::vector<StampedPose> & poses)
{
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << "timestamp,x,y,z,qw,qx,qy,qz\n";
  for (const auto & sp : poses) {
    const Eigen::Quaterniond q(sp.pose.rotation());
    const Eigen::Vector3d & t = sp.pose.translation();
    out << sp.timestamp << ',' << format_double(t.x()) << ',' << format_double(t.y()) << ','
        << format_double(t.z()) << ',' << format_double(q.w()) << ',' << format_double(q.x())
        << ',' << format_double(q.y()) << ',' << format_double(q.z()) << '\n';
  }
}

}  // namespace semmap
