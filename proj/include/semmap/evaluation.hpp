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

#ifndef SEMMAP_EVALUATION_HPP_
#define SEMMAP_EVALUATION_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "semmap/config.hpp"
#include "semmap/image.hpp"
#include "semmap/labeling.hpp"
#include "semmap/voxel_fusion.hpp"

namespace semmap
{

enum class RasterCell : std::uint8_t { Rock = 0, NotRock = 1, Unobserved = 2 };

/// Placement of a top-down raster in the world xy plane. Cell (col, row)
/// covers local [col, col+1) x [row, row+1) times cell_size, where
/// world = origin + Rot(rotation) * local.
struct RasterGeometry
{
  int width{0};
  int height{0};
  double cell_size_m{0.2};
  double origin_x{0.0};
  double origin_y{0.0};
  /// Radians, counter-clockwise.
  double rotation{0.0};

  void validate() const;
  Eigen::Vector2d to_local(const Eigen::Vector2d & world) const;
  Eigen::Vector2d to_world(const Eigen::Vector2d & local) const;
  std::optional<std::pair<int, int>> cell_of(const Eigen::Vector2d & world) const;

  bool operator==(const RasterGeometry &) const = default;
};

/// Georeference sidecar keys: origin_x, origin_y, cell_size_m, rotation.
/// Width and height come from the raster itself.
RasterGeometry load_georeference(const std::filesystem::path & path, int width, int height);
void save_georeference(const std::filesystem::path & path, const RasterGeometry & geometry);

struct ClassRaster
{
  RasterGeometry geometry;
  Image<RasterCell> cells;

  ClassRaster() = default;
  explicit ClassRaster(const RasterGeometry & g, RasterCell fill = RasterCell::Unobserved)
  : geometry(g), cells(g.width, g.height, fill)
  {
  }
};

using GroundTruthRaster = ClassRaster;

/// Colors: Rock = palette rocks, NotRock = palette sand, Unobserved = palette background.
ClassRaster load_class_raster(
  const std::filesystem::path & raster_path, const std::filesystem::path & georef_path,
  const Palette & palette);
void save_class_raster(
  const std::filesystem::path & raster_path, const ClassRaster & raster, const Palette & palette);

/// Top-down view of the semantic map: a cell is Rock if any Rocks voxel center
/// lies in its column, NotRock if only non-rock voxels do, Unobserved otherwise.
/// An empty map yields an all-Unobserved raster.
ClassRaster collapse_to_2d(
  const std::vector<SemanticVoxel> & map, double voxel_size_m, const RasterGeometry & geometry);

/// Cells observed in both rasters.
Image<std::uint8_t> observed_mask(const ClassRaster & predicted, const ClassRaster & truth);

struct ConfusionMatrix
{
  std::uint64_t tp{0};
  std::uint64_t tn{0};
  std::uint64_t fp{0};
  std::uint64_t fn{0};

  std::uint64_t total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionMatrix &) const = default;
};

/// Rock is the positive class. Throws GeometryMismatch if the rasters or mask
/// differ in geometry, InvalidArgument if the mask selects an Unobserved cell.
ConfusionMatrix compute_confusion(
  const ClassRaster & predicted, const ClassRaster & truth, const Image<std::uint8_t> & mask);

struct MetricsReport
{
  double accuracy{0.0};
  double iou{0.0};
  ConfusionMatrix confusion;
  std::string method;
  std::string dataset;
};

/// accuracy = (TP + TN) / total, IoU = TP / (TP + FP + FN) with IoU = 1 when
/// TP = FP = FN = 0. Throws EmptyEvaluation when the total is zero.
MetricsReport metrics(
  const ConfusionMatrix & confusion, const std::string & method = {},
  const std::string & dataset = {});

void write_metrics_csv(const std::filesystem::path & path, const std::vector<MetricsReport> & rows);
std::vector<MetricsReport> read_metrics_csv(const std::filesystem::path & path);

/// Methods as rows, datasets as column pairs (Accuracy, IoU).
std::string format_metrics_table(const std::vector<MetricsReport> & rows);

}  // namespace semmap

#endif  // SEMMAP_EVALUATION_HPP_
