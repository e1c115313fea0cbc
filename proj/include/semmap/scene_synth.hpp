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

#ifndef SEMMAP_SCENE_SYNTH_HPP_
#define SEMMAP_SCENE_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "semmap/camera_geometry.hpp"
#include "semmap/config.hpp"
#include "semmap/evaluation.hpp"
#include "semmap/image.hpp"
#include "semmap/labeling.hpp"
#include "semmap/stereo_matching.hpp"

namespace semmap
{

enum class RockShape { Box, Hemisphere };

/// Rock resting on the ground plane. Boxes are axis aligned with footprint
/// size (sx, sy) and height sz; hemispheres use size.x() as the radius.
struct RockPrimitive
{
  RockShape shape{RockShape::Box};
  Eigen::Vector2d center{0.0, 0.0};
  Eigen::Vector3d size{0.2, 0.2, 0.2};
};

/// World frame: z up, ground plane z = plane_height.
struct SyntheticScene
{
  double plane_height{0.0};
  std::vector<RockPrimitive> rocks;
  std::uint64_t texture_seed{1};
  /// Ground texture contrast; rocks use rock_texture_contrast.
  double texture_contrast{1.0};
  double rock_texture_contrast{1.0};
  /// Left camera to world, one pose per frame.
  std::vector<Pose> trajectory;
  CameraModel camera;
  /// Intensity samples per pixel side.
  int supersample{2};

  // Dataset emission.
  RasterGeometry ground_truth;
  LabelCorruption label_corruption;
  bool emit_disparity{false};

  void validate() const;

  /// Keys: camera.*, plane_height, texture_seed, texture_contrast,
  /// rock_texture_contrast (defaults to texture_contrast), supersample,
  /// `rock = box x y sx sy sz`, `rock = hemisphere x y r`,
  /// `pose = x y height yaw_deg pitch_deg`, ground_truth.{origin_x, origin_y,
  /// cell_size_m, width, height, rotation}, labels.{dilate_px, flip_fraction,
  /// seed}, emit_disparity.
  static SyntheticScene from_config(const KeyValueConfig & cfg);
  static SyntheticScene load(const std::filesystem::path & path);
};

/// Left camera pose at (x, y, height) looking along yaw, tilted down by pitch.
Pose camera_pose(double x, double y, double height, double yaw_deg, double pitch_deg);

struct RenderedFrame
{
  GrayImage left;
  GrayImage right;
  /// b f / Z at every pixel centre that hits geometry; sky pixels are invalid.
  DisparityMap disparity;
  LabelImage labels;
  /// Camera-frame depth Z of the centre ray (0 for sky).
  Image<float> depth;
};

/// Throws IndexOutOfRange for a pose index outside the trajectory.
RenderedFrame render_frame(const SyntheticScene & scene, std::size_t pose_index);

/// Label image only; cheaper than a full render.
LabelImage render_labels(const SyntheticScene & scene, std::size_t pose_index);

/// Procedural surface intensity at a world point, in [0, 1].
double surface_texture(const Eigen::Vector3d & p, std::uint64_t seed, double contrast);

/// Rock iff the cell overlaps a rock footprint with positive area, else NotRock.
GroundTruthRaster true_raster(const SyntheticScene & scene, const RasterGeometry & geometry);

/// Timestamp stem of frame i in emitted datasets.
std::string frame_stem(std::size_t index);

/// Writes left/, right/, labels/, optional disparity/, poses.csv, camera.cfg,
/// ground_truth/raster.png + raster.geo and a run.cfg template.
void write_dataset(const SyntheticScene & scene, const std::filesystem::path & out_dir);

}  // namespace semmap

#endif  // SEMMAP_SCENE_SYNTH_HPP_
