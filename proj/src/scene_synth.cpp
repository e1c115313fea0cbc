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

#include "semmap/scene_synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>

#include "semmap/error.hpp"

namespace semmap
{
namespace
{

constexpr double kNoHit = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double lattice(std::int64_t ix, std::int64_t iy, std::int64_t iz, std::uint64_t seed)
{
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(ix));
  h = splitmix64(h ^ static_cast<std::uint64_t>(iy));
  h = splitmix64(h ^ static_cast<std::uint64_t>(iz));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(const Eigen::Vector3d & p, std::uint64_t seed)
{
  const double fx = std::floor(p.x());
  const double fy = std::floor(p.y());
  const double fz = std::floor(p.z());
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const auto iz = static_cast<std::int64_t>(fz);
  const double tx = smooth(p.x() - fx);
  const double ty = smooth(p.y() - fy);
  const double tz = smooth(p.z() - fz);
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) {
    const int dx = c & 1;
    const int dy = (c >> 1) & 1;
    const int dz = (c >> 2) & 1;
    const double w = (dx ? tx : 1.0 - tx) * (dy ? ty : 1.0 - ty) * (dz ? tz : 1.0 - tz);
    acc += w * lattice(ix + dx, iy + dy, iz + dz, seed);
  }
  return acc;
}

struct Hit
{
  double t{kNoHit};
  Eigen::Vector3d normal{0.0, 0.0, 1.0};
  Label label{Label::Background};
};

struct Ray
{
  Eigen::Vector3d origin;
  Eigen::Vector3d dir;
};

void hit_box(const Ray & ray, const RockPrimitive & rock, double ground, Hit & best)
{
  const Eigen::Vector3d lo(
    rock.center.x() - 0.5 * rock.size.x(), rock.center.y() - 0.5 * rock.size.y(), ground);
  const Eigen::Vector3d hi(
    rock.center.x() + 0.5 * rock.size.x(), rock.center.y() + 0.5 * rock.size.y(),
    ground + rock.size.z());
  double t_near = -kNoHit;
  double t_far = kNoHit;
  int axis = -1;
  double sign = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double o = ray.origin[a];
    const double d = ray.dir[a];
    if (d == 0.0) {
      if (o < lo[a] || o > hi[a]) {
        return;
      }
      continue;
    }
    double t0 = (lo[a] - o) / d;
    double t1 = (hi[a] - o) / d;
    double s = -1.0;
    if (t0 > t1) {
      std::swap(t0, t1);
      s = 1.0;
    }
    if (t0 > t_near) {
      t_near = t0;
      axis = a;
      sign = s;
    }
    t_far = std::min(t_far, t1);
  }
  if (axis < 0 || t_near > t_far || t_near <= 0.0 || t_near >= best.t) {
    return;
  }
  best.t = t_near;
  best.normal = Eigen::Vector3d::Zero();
  best.normal[axis] = sign;
  best.label = Label::Rocks;
}

void hit_hemisphere(const Ray & ray, const RockPrimitive & rock, double ground, Hit & best)
{
  const Eigen::Vector3d c(rock.center.x(), rock.center.y(), ground);
  const double r = rock.size.x();
  const Eigen::Vector3d oc = ray.origin - c;
  const double a = ray.dir.squaredNorm();
  const double b = oc.dot(ray.dir);
  const double disc = b * b - a * (oc.squaredNorm() - r * r);
  if (disc < 0.0) {
    return;
  }
  const double t = (-b - std::sqrt(disc)) / a;
  if (t <= 0.0 || t >= best.t) {
    return;
  }
  const Eigen::Vector3d p = ray.origin + t * ray.dir;
  if (p.z() < ground) {
    return;
  }
  best.t = t;
  best.normal = (p - c) / r;
  best.label = Label::Rocks;
}

Hit trace(const SyntheticScene & scene, const Ray & ray)
{
  Hit best;
  if (ray.dir.z() < 0.0) {
    const double t = (scene.plane_height - ray.origin.z()) / ray.dir.z();
    if (t > 0.0) {
      best.t = t;
      best.normal = Eigen::Vector3d(0.0, 0.0, 1.0);
      best.label = Label::Sand;
    }
  }
  for (const auto & rock : scene.rocks) {
    if (rock.shape == RockShape::Box) {
      hit_box(ray, rock, scene.plane_height, best);
    } else {
      hit_hemisphere(ray, rock, scene.plane_height, best);
    }
  }
  return best;
}

double shade(const SyntheticScene & scene, const Ray & ray)
{
  const Hit hit = trace(scene, ray);
  if (hit.label == Label::Background) {
    // Sky lies at infinity: its appearance depends on direction only.
    const Eigen::Vector3d d = ray.dir.normalized();
    return 0.78 + 0.15 * d.z();
  }
  const Eigen::Vector3d p = ray.origin + hit.t * ray.dir;
  static const Eigen::Vector3d kSun = Eigen::Vector3d(0.35, 0.25, 0.9).normalized();
  const double lambert = 0.6 + 0.4 * std::max(0.0, hit.normal.dot(kSun));
  const bool rock = hit.label == Label::Rocks;
  const std::uint64_t seed = rock ? scene.texture_seed ^ 0x5bd1e995ULL : scene.texture_seed;
  const double albedo = (rock ? 0.65 : 1.0) * surface_texture(
                                                    p, seed, rock ? scene.rock_texture_contrast
                                                                  : scene.texture_contrast);
  return std::clamp(lambert * albedo, 0.0, 1.0);
}

Eigen::Vector3d pixel_direction(const CameraModel & cam, const Pose & pose, double u, double v)
{
  const Eigen::Vector3d d(
    (u - cam.cx) / cam.focal_length_px, (v - cam.cy) / cam.focal_length_px, 1.0);
  return pose.rotation() * d;
}

const Pose & pose_at(const SyntheticScene & scene, std::size_t index)
{
  if (index >= scene.trajectory.size()) {
    throw Error(
      ErrorCode::IndexOutOfRange, "pose index " + std::to_string(index) + " outside trajectory of " +
                                    std::to_string(scene.trajectory.size()));
  }
  return scene.trajectory[index];
}

// Positive-area overlap of two convex quads (separating axis test).
bool quads_overlap(const std::array<Eigen::Vector2d, 4> & a, const std::array<Eigen::Vector2d, 4> & b)
{
  for (const auto * poly : {&a, &b}) {
    for (std::size_t i = 0; i < 4; ++i) {
      const Eigen::Vector2d e = (*poly)[(i + 1) % 4] - (*poly)[i];
      const Eigen::Vector2d axis(-e.y(), e.x());
      double amin = kNoHit;
      double amax = -kNoHit;
      double bmin = kNoHit;
      double bmax = -kNoHit;
      for (const auto & p : a) {
        amin = std::min(amin, axis.dot(p));
        amax = std::max(amax, axis.dot(p));
      }
      for (const auto & p : b) {
        bmin = std::min(bmin, axis.dot(p));
        bmax = std::max(bmax, axis.dot(p));
      }
      const double tol = 1e-12 * std::max(1.0, axis.norm());
      if (amax <= bmin + tol || bmax <= amin + tol) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

double surface_texture(const Eigen::Vector3d & p, std::uint64_t seed, double contrast)
{
  constexpr std::array<double, 4> kScale{0.025, 0.06, 0.15, 0.4};
  constexpr std::array<double, 4> kAmp{0.35, 0.3, 0.2, 0.15};
  double n = 0.0;
  for (std::size_t o = 0; o < kScale.size(); ++o) {
    n += kAmp[o] * value_noise(p / kScale[o], seed + 0x1000 * o);
  }
  return std::clamp(0.5 + 1.6 * contrast * (n - 0.5), 0.0, 1.0);
}

void SyntheticScene::validate() const
{
  camera.validate();
  if (trajectory.empty()) {
    throw Error(ErrorCode::InvalidArgument, "scene has no trajectory poses");
  }
  for (const auto & pose : trajectory) {
    if (pose.frame_from() != kLeftCameraFrame || pose.frame_to() != kWorldFrame) {
      throw Error(ErrorCode::FrameMismatch, "trajectory poses must map left_camera to world");
    }
  }
  for (const auto & rock : rocks) {
    if (!(rock.size.x() > 0.0) || (rock.shape == RockShape::Box && !(rock.size.minCoeff() > 0.0))) {
      throw Error(ErrorCode::InvalidArgument, "rock dimensions must be positive");
    }
  }
  if (supersample < 1 || supersample > 8) {
    throw Error(ErrorCode::InvalidArgument, "supersample must be in [1, 8]");
  }
  if (!(texture_contrast >= 0.0) || !(rock_texture_contrast >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "texture contrasts must be >= 0");
  }
}

Pose camera_pose(double x, double y, double height, double yaw_deg, double pitch_deg)
{
  const double yaw = yaw_deg * std::numbers::pi / 180.0;
  const double pitch = pitch_deg * std::numbers::pi / 180.0;
  const Eigen::Vector3d forward(
    std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), -std::sin(pitch));
  const Eigen::Vector3d right(std::sin(yaw), -std::cos(yaw), 0.0);
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return Pose(r, Eigen::Vector3d(x, y, height), kLeftCameraFrame, kWorldFrame);
}

SyntheticScene SyntheticScene::from_config(const KeyValueConfig & cfg)
{
  SyntheticScene s;
  s.camera.focal_length_px = cfg.get_double("camera.focal_px", 400.0);
  s.camera.baseline_m = cfg.get_double("camera.baseline_m", 0.12);
  s.camera.width = static_cast<int>(cfg.get_int("camera.width", 512));
  s.camera.height = static_cast<int>(cfg.get_int("camera.height", 384));
  s.camera.cx = cfg.get_double("camera.cx", 0.5 * (s.camera.width - 1));
  s.camera.cy = cfg.get_double("camera.cy", 0.5 * (s.camera.height - 1));
  s.plane_height = cfg.get_double("plane_height", 0.0);
  s.texture_seed = static_cast<std::uint64_t>(cfg.get_int("texture_seed", 1));
  s.texture_contrast = cfg.get_double("texture_contrast", 1.0);
  s.rock_texture_contrast = cfg.get_double("rock_texture_contrast", s.texture_contrast);
  s.supersample = static_cast<int>(cfg.get_int("supersample", 2));

  for (const auto & line : cfg.all("rock")) {
    const auto f = split_whitespace(line);
    RockPrimitive rock;
    if (!f.empty() && f[0] == "box" && f.size() == 6) {
      rock.shape = RockShape::Box;
      rock.center = {parse_double(f[1], "rock"), parse_double(f[2], "rock")};
      rock.size = {parse_double(f[3], "rock"), parse_double(f[4], "rock"),
                   parse_double(f[5], "rock")};
    } else if (!f.empty() && f[0] == "hemisphere" && f.size() == 4) {
      rock.shape = RockShape::Hemisphere;
      rock.center = {parse_double(f[1], "rock"), parse_double(f[2], "rock")};
      const double r = parse_double(f[3], "rock");
      rock.size = {r, r, r};
    } else {
      throw Error(
        ErrorCode::ParseError,
        "rock: expected 'box x y sx sy sz' or 'hemisphere x y r', got '" + line + "'");
    }
    s.rocks.push_back(rock);
  }
  for (const auto & line : cfg.all("pose")) {
    const auto f = split_whitespace(line);
    if (f.size() != 5) {
      throw Error(ErrorCode::ParseError, "pose: expected 'x y height yaw_deg pitch_deg'");
    }
    s.trajectory.push_back(camera_pose(
      parse_double(f[0], "pose"), parse_double(f[1], "pose"), parse_double(f[2], "pose"),
      parse_double(f[3], "pose"), parse_double(f[4], "pose")));
  }

  s.ground_truth.origin_x = cfg.get_double("ground_truth.origin_x", 0.0);
  s.ground_truth.origin_y = cfg.get_double("ground_truth.origin_y", -4.0);
  s.ground_truth.cell_size_m = cfg.get_double("ground_truth.cell_size_m", 0.2);
  s.ground_truth.width = static_cast<int>(cfg.get_int("ground_truth.width", 50));
  s.ground_truth.height = static_cast<int>(cfg.get_int("ground_truth.height", 40));
  s.ground_truth.rotation = cfg.get_double("ground_truth.rotation", 0.0);
  s.ground_truth.validate();

  s.label_corruption.dilate_rocks_px = static_cast<int>(cfg.get_int("labels.dilate_px", 0));
  s.label_corruption.flip_fraction = cfg.get_double("labels.flip_fraction", 0.0);
  s.label_corruption.seed = static_cast<std::uint64_t>(cfg.get_int("labels.seed", 0));
  s.emit_disparity = cfg.get_bool("emit_disparity", false);
  s.validate();
  return s;
}

SyntheticScene SyntheticScene::load(const std::filesystem::path & path)
{
  return from_config(KeyValueConfig::load(path));
}

RenderedFrame render_frame(const SyntheticScene & scene, std::size_t pose_index)
{
  const Pose & pose = pose_at(scene, pose_index);
  const CameraModel & cam = scene.camera;
  const int w = cam.width;
  const int h = cam.height;
  const int ss = std::max(1, scene.supersample);
  const Eigen::Vector3d left_origin = pose.translation();
  const Eigen::Vector3d right_origin =
    left_origin + pose.rotation() * Eigen::Vector3d(cam.baseline_m, 0.0, 0.0);

  RenderedFrame out;
  out.left = GrayImage(w, h);
  out.right = GrayImage(w, h);
  out.disparity = DisparityMap(w, h);
  out.labels = LabelImage(w, h, Label::Background);
  out.depth = Image<float>(w, h, 0.0f);

#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const Ray centre{left_origin, pixel_direction(cam, pose, u, v)};
      const Hit hit = trace(scene, centre);
      out.labels.at(u, v) = hit.label;
      if (hit.label != Label::Background) {
        // Ray direction has unit camera-z, so t is the depth Z.
        out.depth.at(u, v) = static_cast<float>(hit.t);
        out.disparity.disparity.at(u, v) =
          static_cast<float>(cam.baseline_m * cam.focal_length_px / hit.t);
        out.disparity.valid.at(u, v) = 1;
      }
      double sum_l = 0.0;
      double sum_r = 0.0;
      for (int j = 0; j < ss; ++j) {
        for (int i = 0; i < ss; ++i) {
          const double su = u + (i + 0.5) / ss - 0.5;
          const double sv = v + (j + 0.5) / ss - 0.5;
          const Eigen::Vector3d dir = pixel_direction(cam, pose, su, sv);
          sum_l += shade(scene, Ray{left_origin, dir});
          sum_r += shade(scene, Ray{right_origin, dir});
        }
      }
      out.left.at(u, v) = static_cast<float>(sum_l / (ss * ss));
      out.right.at(u, v) = static_cast<float>(sum_r / (ss * ss));
    }
  }
  return out;
}

LabelImage render_labels(const SyntheticScene & scene, std::size_t pose_index)
{
  const Pose & pose = pose_at(scene, pose_index);
  const CameraModel & cam = scene.camera;
  LabelImage labels(cam.width, cam.height, Label::Background);
#pragma omp parallel for schedule(static)
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      labels.at(u, v) = trace(scene, Ray{pose.translation(), pixel_direction(cam, pose, u, v)}).label;
    }
  }
  return labels;
}

GroundTruthRaster true_raster(const SyntheticScene & scene, const RasterGeometry & geometry)
{
  geometry.validate();
  GroundTruthRaster out(geometry, RasterCell::NotRock);
  const double s = geometry.cell_size_m;
  for (const auto & rock : scene.rocks) {
    const double r = rock.shape == RockShape::Box ? 0.0 : rock.size.x();
    std::array<Eigen::Vector2d, 4> footprint;
    if (rock.shape == RockShape::Box) {
      const double hx = 0.5 * rock.size.x();
      const double hy = 0.5 * rock.size.y();
      footprint = {
        geometry.to_local(rock.center + Eigen::Vector2d(-hx, -hy)),
        geometry.to_local(rock.center + Eigen::Vector2d(hx, -hy)),
        geometry.to_local(rock.center + Eigen::Vector2d(hx, hy)),
        geometry.to_local(rock.center + Eigen::Vector2d(-hx, hy))};
    }
    const Eigen::Vector2d c_local = geometry.to_local(rock.center);
    for (int row = 0; row < geometry.height; ++row) {
      for (int col = 0; col < geometry.width; ++col) {
        const double x0 = col * s;
        const double y0 = row * s;
        bool overlap = false;
        if (rock.shape == RockShape::Box) {
          const std::array<Eigen::Vector2d, 4> cell{
            Eigen::Vector2d(x0, y0), Eigen::Vector2d(x0 + s, y0), Eigen::Vector2d(x0 + s, y0 + s),
            Eigen::Vector2d(x0, y0 + s)};
          overlap = quads_overlap(cell, footprint);
        } else {
          const double dx = c_local.x() - std::clamp(c_local.x(), x0, x0 + s);
          const double dy = c_local.y() - std::clamp(c_local.y(), y0, y0 + s);
          overlap = dx * dx + dy * dy < r * r;
        }
        if (overlap) {
          out.cells.at(col, row) = RasterCell::Rock;
        }
      }
    }
  }
  return out;
}

std::string frame_stem(std::size_t index)
{
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06zu", index);
  return buf;
}

void write_dataset(const SyntheticScene & scene, const std::filesystem::path & out_dir)
{
  namespace fs = std::filesystem;
  scene.validate();
  for (const char * sub : {"left", "right", "labels", "ground_truth"}) {
    fs::create_directories(out_dir / sub);
  }
  if (scene.emit_disparity) {
    fs::create_directories(out_dir / "disparity");
  }
  const Palette palette;
  std::vector<StampedPose> poses;
  for (std::size_t i = 0; i < scene.trajectory.size(); ++i) {
    const std::string stem = frame_stem(i);
    const RenderedFrame frame = render_frame(scene, i);
    save_gray(out_dir / "left" / (stem + ".png"), frame.left);
    save_gray(out_dir / "right" / (stem + ".png"), frame.right);
    LabelCorruption corruption = scene.label_corruption;
    corruption.seed = scene.label_corruption.seed + i;
    save_label_image(
      out_dir / "labels" / (stem + ".png"), corrupt_labels(frame.labels, corruption), palette);
    if (scene.emit_disparity) {
      save_disparity(out_dir / "disparity" / (stem + ".png"), frame.disparity);
    }
    poses.push_back(StampedPose{stem, scene.trajectory[i]});
  }
  save_poses_csv(out_dir / "poses.csv", poses);
  scene.camera.to_config().save(out_dir / "camera.cfg");

  const GroundTruthRaster truth = true_raster(scene, scene.ground_truth);
  save_class_raster(out_dir / "ground_truth" / "raster.png", truth, palette);
  save_georeference(out_dir / "ground_truth" / "raster.geo", truth.geometry);

  KeyValueConfig run;
  run.set("dataset", ".");
  fs::path name = out_dir.lexically_normal();
  if (name.filename().empty()) {
    name = name.parent_path();
  }
  run.set("dataset_name", name.filename().string());
  run.set("method", "cnn");
  run.set("output", "out");
  run.save(out_dir / "run.cfg");
}

}  // namespace semmap
