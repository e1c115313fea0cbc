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
#include <random>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "test_util.hpp"

namespace semmap
{
namespace
{

CameraModel camera(double f, double b, double cx, double cy, int w = 1032, int h = 776)
{
  CameraModel cam;
  cam.focal_length_px = f;
  cam.baseline_m = b;
  cam.cx = cx;
  cam.cy = cy;
  cam.width = w;
  cam.height = h;
  return cam;
}

Pose random_pose(std::mt19937_64 & rng, const std::string & from, const std::string & to)
{
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return Pose(q.toRotationMatrix(), Eigen::Vector3d(n(rng), n(rng), n(rng)), from, to);
}

TEST(TriangulateTest, OriginPixelAtOneMetre)
{
  const Point3 p = triangulate(0.0, 0.0, 60.0, camera(500.0, 0.12, 0.0, 0.0));
  EXPECT_NEAR(p.x, 0.0, 1e-12);
  EXPECT_NEAR(p.y, 0.0, 1e-12);
  EXPECT_NEAR(p.z, 1.0, 1e-12);
  EXPECT_EQ(p.frame, kLeftCameraFrame);
}

TEST(TriangulateTest, PrincipalPointOffset)
{
  // Z = 0.12 * 500 / 30 = 2, X = (616 - 516) * 2 / 500 = 0.4, same for Y.
  const Point3 p = triangulate(616.0, 488.0, 30.0, camera(500.0, 0.12, 516.0, 388.0));
  EXPECT_NEAR(p.x, 0.4, 1e-12);
  EXPECT_NEAR(p.y, 0.4, 1e-12);
  EXPECT_NEAR(p.z, 2.0, 1e-12);
}

TEST(TriangulateTest, PrincipalPointLiesOnOpticalAxis)
{
  const CameraModel cam = camera(500.0, 0.12, 516.0, 388.0);
  for (double d : {0.75, 3.0, 17.5, 200.0}) {
    const Point3 p = triangulate(cam.cx, cam.cy, d, cam);
    EXPECT_EQ(p.x, 0.0);
    EXPECT_EQ(p.y, 0.0);
  }
}

TEST(TriangulateTest, RejectsSmallDisparity)
{
  const CameraModel cam = camera(500.0, 0.12, 516.0, 388.0);
  EXPECT_SEMMAP_ERROR(triangulate(10.0, 10.0, 0.5, cam), NonPositiveDisparity);
  EXPECT_SEMMAP_ERROR(triangulate(10.0, 10.0, 0.0, cam), NonPositiveDisparity);
  EXPECT_SEMMAP_ERROR(triangulate(10.0, 10.0, -3.0, cam), NonPositiveDisparity);
  EXPECT_SEMMAP_ERROR(triangulate(10.0, 10.0, 2.0, cam, 2.0), NonPositiveDisparity);
  EXPECT_NO_THROW(triangulate(10.0, 10.0, 0.51, cam));
}

TEST(TriangulateTest, RejectsPixelsOutsideImage)
{
  const CameraModel cam = camera(500.0, 0.12, 516.0, 388.0);
  EXPECT_SEMMAP_ERROR(triangulate(-0.5, 10.0, 5.0, cam), OutOfBounds);
  EXPECT_SEMMAP_ERROR(triangulate(1032.0, 10.0, 5.0, cam), OutOfBounds);
  EXPECT_SEMMAP_ERROR(triangulate(10.0, 776.0, 5.0, cam), OutOfBounds);
  EXPECT_NO_THROW(triangulate(1031.9, 775.9, 5.0, cam));
}

TEST(TriangulateTest, DepthDecreasesWithDisparity)
{
  const CameraModel cam = camera(500.0, 0.12, 516.0, 388.0);
  double prev_z = std::numeric_limits<double>::infinity();
  for (double d = 0.6; d < 300.0; d *= 1.3) {
    const double z = triangulate(100.0, 100.0, d, cam).z;
    EXPECT_LT(z, prev_z);
    prev_z = z;
  }
}

TEST(ProjectTest, InvertsFirstExample)
{
  const StereoObservation o = project(Point3{0.0, 0.0, 1.0}, camera(500.0, 0.12, 0.0, 0.0));
  EXPECT_NEAR(o.u, 0.0, 1e-12);
  EXPECT_NEAR(o.v, 0.0, 1e-12);
  EXPECT_NEAR(o.disparity, 60.0, 1e-12);
}

TEST(ProjectTest, OpticalAxisMapsToPrincipalPoint)
{
  const CameraModel cam = camera(500.0, 0.12, 516.0, 388.0);
  const StereoObservation o = project(Point3{0.0, 0.0, 4.0}, cam);
  EXPECT_EQ(o.u, cam.cx);
  EXPECT_EQ(o.v, cam.cy);
  EXPECT_NEAR(o.disparity, 0.12 * 500.0 / 4.0, 1e-12);
}

TEST(ProjectTest, BehindCamera)
{
  const CameraModel cam = camera(500.0, 0.12, 516.0, 388.0);
  EXPECT_SEMMAP_ERROR(project(Point3{0.0, 0.0, 0.0}, cam), BehindCamera);
  EXPECT_SEMMAP_ERROR(project(Point3{1.0, 0.0, -2.0}, cam), BehindCamera);
}

TEST(ProjectTest, RejectsForeignFrame)
{
  Point3 p{0.0, 0.0, 1.0, kWorldFrame};
  EXPECT_SEMMAP_ERROR(project(p, camera(500.0, 0.12, 0.0, 0.0)), FrameMismatch);
}

TEST(ProjectTest, RoundTripRandomPoints)
{
  const CameraModel cam = camera(500.0, 0.12, 516.0, 388.0);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> zd(0.5, 20.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double z = zd(rng);
    // Pick a pixel inside the image so triangulate accepts the projection.
    const double u = ud(rng) * (cam.width - 1);
    const double v = ud(rng) * (cam.height - 1);
    const Point3 p{(u - cam.cx) * z / cam.focal_length_px, (v - cam.cy) * z / cam.focal_length_px, z};
    const StereoObservation o = project(p, cam);
    const Point3 q = triangulate(o.u, o.v, o.disparity, cam);
    EXPECT_LT((q.vec() - p.vec()).norm(), 1e-9);
  }
}

TEST(PoseTest, RejectsNonRotation)
{
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 0) = -1.0;  // reflection, det = -1
  EXPECT_SEMMAP_ERROR(Pose(m, Eigen::Vector3d::Zero(), "a", "b"), InvalidArgument);
  m = Eigen::Matrix3d::Identity() * 1.001;
  EXPECT_SEMMAP_ERROR(Pose(m, Eigen::Vector3d::Zero(), "a", "b"), InvalidArgument);
}

TEST(TransformTest, IdentityAndTranslation)
{
  const Point3 p{0.3, -1.2, 5.0};
  const Point3 same = transform(p, Pose::identity(kLeftCameraFrame, kWorldFrame));
  EXPECT_EQ(same.vec(), p.vec());
  EXPECT_EQ(same.frame, kWorldFrame);

  const Pose shift(Eigen::Matrix3d::Identity(), {1.0, 2.0, 3.0}, kLeftCameraFrame, kWorldFrame);
  const Point3 moved = transform(Point3{}, shift);
  EXPECT_EQ(moved.vec(), Eigen::Vector3d(1.0, 2.0, 3.0));
}

TEST(TransformTest, FrameMismatch)
{
  const Pose pose = Pose::identity("rover", kWorldFrame);
  EXPECT_SEMMAP_ERROR(transform(Point3{}, pose), FrameMismatch);
}

TEST(TransformTest, ComposeMatchesSequentialApplication)
{
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const Pose t1 = random_pose(rng, kLeftCameraFrame, "rover");
    const Pose t2 = random_pose(rng, "rover", kWorldFrame);
    const Point3 p{n(rng), n(rng), n(rng)};
    const Point3 direct = transform(transform(p, t1), t2);
    const Point3 composed = transform(p, compose(t2, t1));
    // Matrix oracle: R2 (R1 p + t1) + t2.
    const Eigen::Vector3d oracle =
      t2.rotation() * (t1.rotation() * p.vec() + t1.translation()) + t2.translation();
    EXPECT_LT((composed.vec() - oracle).norm(), 1e-9);
    EXPECT_LT((direct.vec() - oracle).norm(), 1e-9);
    EXPECT_EQ(composed.frame, kWorldFrame);
  }
  EXPECT_SEMMAP_ERROR(
    compose(Pose::identity("a", "b"), Pose::identity("c", "d")), FrameMismatch);
}

TEST(TransformTest, PreservesDistances)
{
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const Pose pose = random_pose(rng, kLeftCameraFrame, kWorldFrame);
    const Point3 a{n(rng), n(rng), n(rng)};
    const Point3 b{n(rng), n(rng), n(rng)};
    const double before = (a.vec() - b.vec()).norm();
    const double after = (transform(a, pose).vec() - transform(b, pose).vec()).norm();
    EXPECT_NEAR(before, after, 1e-9);
  }
}

TEST(TransformTest, InverseUndoes)
{
  std::mt19937_64 rng(3);
  const Pose pose = random_pose(rng, kLeftCameraFrame, kWorldFrame);
  const Point3 p{1.0, -2.0, 3.0};
  const Point3 back = transform(transform(p, pose), pose.inverse());
  EXPECT_LT((back.vec() - p.vec()).norm(), 1e-12);
  EXPECT_EQ(back.frame, kLeftCameraFrame);
}

TEST(CameraModelTest, ConfigRoundTrip)
{
  const CameraModel cam = camera(512.25, 0.12, 515.5, 387.5);
  const CameraModel back = CameraModel::from_config(cam.to_config());
  EXPECT_EQ(back.focal_length_px, cam.focal_length_px);
  EXPECT_EQ(back.baseline_m, cam.baseline_m);
  EXPECT_EQ(back.cx, cam.cx);
  EXPECT_EQ(back.cy, cam.cy);
  EXPECT_EQ(back.width, cam.width);
  EXPECT_EQ(back.height, cam.height);
}

TEST(CameraModelTest, ValidateRejectsBadIntrinsics)
{
  EXPECT_SEMMAP_ERROR(camera(0.0, 0.12, 10.0, 10.0).validate(), InvalidArgument);
  EXPECT_SEMMAP_ERROR(camera(500.0, -0.1, 10.0, 10.0).validate(), InvalidArgument);
  EXPECT_NO_THROW(camera(500.0, 0.12, 10.0, 10.0).validate());
}

TEST(PosesCsvTest, RoundTripWithHeader)
{
  testing::TempDir dir;
  std::mt19937_64 rng(5);
  std::vector<StampedPose> poses;
  for (int i = 0; i < 5; ++i) {
    poses.push_back({"00000" + std::to_string(i), random_pose(rng, kLeftCameraFrame, kWorldFrame)});
  }
  save_poses_csv(dir / "poses.csv", poses);
  const auto loaded = load_poses_csv(dir / "poses.csv");
  ASSERT_EQ(loaded.size(), poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    EXPECT_EQ(loaded[i].timestamp, poses[i].timestamp);
    EXPECT_LT((loaded[i].pose.rotation() - poses[i].pose.rotation()).norm(), 1e-12);
    EXPECT_LT((loaded[i].pose.translation() - poses[i].pose.translation()).norm(), 1e-12);
  }
}

TEST(PosesCsvTest, HeaderlessAndMalformed)
{
  testing::TempDir dir;
  testing::write_file(dir / "ok.csv", "17,1,2,3,1,0,0,0\n");
  const auto poses = load_poses_csv(dir / "ok.csv");
  ASSERT_EQ(poses.size(), 1u);
  EXPECT_EQ(poses[0].timestamp, "17");
  EXPECT_EQ(poses[0].pose.translation(), Eigen::Vector3d(1.0, 2.0, 3.0));

  testing::write_file(dir / "bad.csv", "17,1,2,3,1,0,0\n");
  EXPECT_SEMMAP_ERROR(load_poses_csv(dir / "bad.csv"), ParseError);
  EXPECT_SEMMAP_ERROR(load_poses_csv(dir / "missing.csv"), IoError);
}

}  // namespace
}  // namespace semmap
