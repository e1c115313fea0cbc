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

#ifndef SEMMAP_VOXEL_FUSION_HPP_
#define SEMMAP_VOXEL_FUSION_HPP_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "semmap/camera_geometry.hpp"
#include "semmap/config.hpp"
#include "semmap/labeling.hpp"
#include "semmap/point_cloud.hpp"

namespace semmap
{

struct FusionParams
{
  double voxel_size_m{0.2};
  /// Inverse measurement model p(m | z) for a labeled point.
  double l_occ_probability{0.9};
  double prior_probability{0.5};
  double occupied_threshold{0.70};
  double max_range_m{12.0};

  void validate() const;
  static FusionParams from_config(const KeyValueConfig & cfg, const std::string & prefix);
  void to_config(KeyValueConfig & cfg, const std::string & prefix) const;
};

double logit(double p);
/// 1 / (1 + exp(-l)).
double logistic(double l);

/// Binary Bayes filter step in log-odds form:
/// l = l_prev + log(p / (1 - p)) - log(prior / (1 - prior)).
/// Throws DegenerateProbability when p or prior is outside (0, 1).
double log_odds_update(double l_prev, double p_inverse_model, double p_prior);

struct VoxelIndex
{
  std::int32_t ix{0};
  std::int32_t iy{0};
  std::int32_t iz{0};

  auto operator<=>(const VoxelIndex &) const = default;
};

struct VoxelIndexHash
{
  std::size_t operator()(const VoxelIndex & v) const noexcept
  {
    std::uint64_t h = static_cast<std::uint32_t>(v.ix);
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(v.iy);
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(v.iz);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// Map labels (Sand, Rocks) that own an accumulator.
inline constexpr std::array<Label, 2> kMapLabels{Label::Sand, Label::Rocks};

/// Per-label evidence of one voxel. Evidence is kept in fixed point
/// (2^-32 log-odds units) so that sums are exact and order independent.
class VoxelCell
{
public:
  static constexpr double kScale = 4294967296.0;

  /// Log-odds relative to the prior, i.e. the sum of applied increments.
  double evidence(Label label) const;
  std::int64_t raw_evidence(Label label) const { return evidence_[slot(label)]; }
  std::uint32_t updates(Label label) const { return updates_[slot(label)]; }
  std::uint32_t observation_count() const { return updates_[0] + updates_[1]; }
  bool touched(Label label) const { return updates_[slot(label)] > 0; }

  void add(Label label, std::int64_t raw_increment);
  void merge(const VoxelCell & other);

  bool operator==(const VoxelCell &) const = default;

private:
  static std::size_t slot(Label label);

  std::array<std::int64_t, 2> evidence_{0, 0};
  std::array<std::uint32_t, 2> updates_{0, 0};
};

struct InsertStats
{
  std::size_t inserted_points{0};
  std::size_t skipped_background{0};
  std::size_t skipped_range{0};
  std::size_t skipped_invalid{0};
  std::size_t voxel_updates{0};
};

struct SemanticVoxel
{
  VoxelIndex index;
  Label label{Label::Sand};
  double probability{0.0};
};

class SemanticVoxelGrid
{
public:
  explicit SemanticVoxelGrid(FusionParams params = {}, std::string frame = kWorldFrame);

  const FusionParams & params() const { return params_; }
  const std::string & frame() const { return frame_; }
  std::size_t size() const { return cells_.size(); }

  /// floor(p / voxel_size) componentwise.
  VoxelIndex index_of(const Eigen::Vector3d & p) const;
  Eigen::Vector3d center_of(const VoxelIndex & index) const;

  /// Fuses one frame: each non-background point within max_range_m of the sensor
  /// is transformed by sensor_pose and updates its voxel's accumulator for its
  /// label once per frame. Throws FrameMismatch if the cloud, pose and grid frames
  /// do not chain, InvalidArgument if the cloud is unlabeled.
  InsertStats insert_labeled_cloud(const PointCloud & cloud, const Pose & sensor_pose);

  /// Applies one inverse-model observation directly.
  void observe(const VoxelIndex & index, Label label, double p_inverse_model);

  const VoxelCell * find(const VoxelIndex & index) const;

  /// Log-odds of the occupancy belief for label, prior included.
  double log_odds(const VoxelCell & cell, Label label) const;
  double cell_probability(const VoxelCell & cell, Label label) const;

  /// Sums accumulators of a grid built from a disjoint set of frames.
  /// Throws InvalidArgument if the parameters or frame differ.
  void merge(const SemanticVoxelGrid & other);

  std::vector<std::pair<VoxelIndex, VoxelCell>> sorted_cells() const;

  bool operator==(const SemanticVoxelGrid & other) const;

private:
  std::int64_t increment_for(double p_inverse_model) const;

  FusionParams params_;
  std::string frame_;
  std::unordered_map<VoxelIndex, VoxelCell, VoxelIndexHash> cells_;
};

/// Occupied voxels with their single label, sorted by index. A voxel is emitted
/// iff its most probable label exceeds occupied_threshold; ties go to Rocks.
std::vector<SemanticVoxel> extract_semantic_map(const SemanticVoxelGrid & grid);

/// ASCII PLY of occupied voxel centers with per-vertex label color.
void write_semantic_map_ply(
  const std::filesystem::path & path, const SemanticVoxelGrid & grid,
  const std::vector<SemanticVoxel> & map, const Palette & palette);

/// Rows `ix,iy,iz,label,log_odds` for every touched (voxel, label), sorted.
std::string grid_to_csv(const SemanticVoxelGrid & grid);
void write_grid_csv(const std::filesystem::path & path, const SemanticVoxelGrid & grid);

}  // namespace semmap

#endif  // SEMMAP_VOXEL_FUSION_HPP_
