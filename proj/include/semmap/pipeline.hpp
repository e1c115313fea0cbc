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

#ifndef SEMMAP_PIPELINE_HPP_
#define SEMMAP_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semmap/camera_geometry.hpp"
#include "semmap/config.hpp"
#include "semmap/evaluation.hpp"
#include "semmap/labeling.hpp"
#include "semmap/plane_baseline.hpp"
#include "semmap/point_cloud.hpp"
#include "semmap/stereo_matching.hpp"
#include "semmap/voxel_fusion.hpp"

namespace semmap
{

enum class Method { Cnn, Mlesac };

std::string to_string(Method method);
/// Throws ConfigInvalid for anything but "cnn" or "mlesac".
Method method_from_string(const std::string & name);

/// Inclusive frame index range over the timestamp-sorted frame list.
struct FrameRange
{
  std::size_t first{0};
  std::size_t last{0};
};

/// Parses "a..b". Throws ConfigInvalid.
FrameRange parse_frame_range(const std::string & text);

struct RunConfig
{
  std::filesystem::path dataset;
  std::string dataset_name;
  Method method{Method::Cnn};
  std::filesystem::path camera_path;
  /// Label rasters paired by timestamp stem; defaults to <dataset>/labels.
  std::filesystem::path labels_dir;
  std::filesystem::path output;
  std::optional<FrameRange> frames;
  FusionParams fusion;
  MatchingParams matching;
  MlesacParams mlesac;
  HeightClassifierParams classifier;
  Palette palette;
  double min_disparity{0.5};
  /// Load disparity/<ts>.png when present instead of matching.
  bool use_precomputed_disparity{true};

  /// Relative paths resolve against base_dir. Throws ConfigInvalid.
  static RunConfig from_config(
    const KeyValueConfig & cfg, const std::filesystem::path & base_dir);
  static RunConfig load(const std::filesystem::path & path);

  /// Throws ConfigInvalid if the dataset directory does not exist.
  void validate() const;

  /// Every parameter, with absolute paths; loadable by from_config.
  KeyValueConfig to_config() const;
};

struct FrameFiles
{
  std::string stem;
  std::filesystem::path left;
  std::filesystem::path right;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> disparity;
  Pose pose;
};

struct DatasetIndex
{
  CameraModel camera;
  std::vector<FrameFiles> frames;
  std::optional<std::filesystem::path> ground_truth_raster;
  std::optional<std::filesystem::path> ground_truth_georef;
};

/// Pairs files by timestamp stem. Throws DatasetIncomplete naming the first
/// missing file, or when the frame range selects nothing.
DatasetIndex index_dataset(const RunConfig & config);

/// Triangulates every valid disparity into the left camera frame. When labels
/// are given each point takes the label of its pixel.
PointCloud build_cloud(
  const DisparityMap & disparity, const CameraModel & camera, const LabelImage * labels,
  double min_disparity);

struct RunResult
{
  std::size_t frames_processed{0};
  std::size_t frames_skipped{0};
  std::size_t warnings{0};
  SemanticVoxelGrid grid;
  std::vector<SemanticVoxel> map;
  std::optional<ClassRaster> predicted;
  std::optional<MetricsReport> metrics;
  std::filesystem::path manifest;
};

/// Runs the selected pipeline over the dataset and writes map.ply, grid.csv,
/// predicted_raster.png and metrics.csv (when ground truth exists) and
/// run_manifest.cfg into config.output. Per-frame failures are logged and the
/// frame skipped.
RunResult run(const RunConfig & config, std::ostream & log);

/// Metrics of two runs over the same dataset as a method x dataset table.
/// Throws MismatchedDatasets.
std::string compare(
  const std::filesystem::path & manifest_a, const std::filesystem::path & manifest_b);

}  // namespace semmap

#endif  // SEMMAP_PIPELINE_HPP_
