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

#include "semmap/voxel_fusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "semmap/error.hpp"

namespace semmap
{

void FusionParams::validate() const
{
  if (!(voxel_size_m > 0.0) || !std::isfinite(voxel_size_m)) {
    throw Error(ErrorCode::InvalidArgument, "voxel_size_m must be positive");
  }
  if (!(l_occ_probability > 0.5 && l_occ_probability < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "l_occ_probability must be in (0.5, 1)");
  }
  if (!(prior_probability > 0.0 && prior_probability < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "prior_probability must be in (0, 1)");
  }
  if (!(occupied_threshold >= 0.5 && occupied_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "occupied_threshold must be in [0.5, 1)");
  }
  if (!(max_range_m > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "max_range_m must be positive");
  }
}

FusionParams FusionParams::from_config(const KeyValueConfig & cfg, const std::string & prefix)
{
  FusionParams p;
  p.voxel_size_m = cfg.get_double(prefix + "voxel_size_m", p.voxel_size_m);
  p.l_occ_probability = cfg.get_double(prefix + "l_occ_probability", p.l_occ_probability);
  p.prior_probability = cfg.get_double(prefix + "prior_probability", p.prior_probability);
  p.occupied_threshold = cfg.get_double(prefix + "occupied_threshold", p.occupied_threshold);
  p.max_range_m = cfg.get_double(prefix + "max_range_m", p.max_range_m);
  p.validate();
  return p;
}

void FusionParams::to_config(KeyValueConfig & cfg, const std::string & prefix) const
{
  cfg.set(prefix + "voxel_size_m", format_double(voxel_size_m));
  cfg.set(prefix + "l_occ_probability", format_double(l_occ_probability));
  cfg.set(prefix + "prior_probability", format_double(prior_probability));
  cfg.set(prefix + "occupied_threshold", format_double(occupied_threshold));
  cfg.set(prefix + "max_range_m", format_double(max_range_m));
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double logistic(double l) { return 1.0 / (1.0 + std::exp(-l)); }

double log_odds_update(double l_prev, double p_inverse_model, double p_prior)
{
  if (!(p_inverse_model > 0.0 && p_inverse_model < 1.0)) {
    throw Error(
      ErrorCode::DegenerateProbability, "inverse model p = " + format_double(p_inverse_model));
  }
  if (!(p_prior > 0.0 && p_prior < 1.0)) {
    throw Error(ErrorCode::DegenerateProbability, "prior p = " + format_double(p_prior));
  }
  return l_prev + logit(p_inverse_model) - logit(p_prior);
}

std::size_t VoxelCell::slot(Label label)
{
  switch (label) {
    case Label::Sand: return 0;
    case Label::Rocks: return 1;
    case Label::Background: break;
  }
  throw Error(ErrorCode::InvalidArgument, "background has no map accumulator");
}

double VoxelCell::evidence(Label label) const
{
  return static_cast<double>(evidence_[slot(label)]) / kScale;
}

void VoxelCell::add(Label label, std::int64_t raw_increment)
{
  const std::size_t s = slot(label);
  evidence_[s] += raw_increment;
  ++updates_[s];
}

void VoxelCell::merge(const VoxelCell & other)
{
  for (std::size_t s = 0; s < 2; ++s) {
    evidence_[s] += other.evidence_[s];
    updates_[s] += other.updates_[s];
  }
}

SemanticVoxelGrid::SemanticVoxelGrid(FusionParams params, std::string frame)
: params_(params), frame_(std::move(frame))
{
  params_.validate();
}

VoxelIndex SemanticVoxelGrid::index_of(const Eigen::Vector3d & p) const
{
  const double s = params_.voxel_size_m;
  return VoxelIndex{
    static_cast<std::int32_t>(std::floor(p.x() / s)),
    static_cast<std::int32_t>(std::floor(p.y() / s)),
    static_cast<std::int32_t>(std::floor(p.z() / s))};
}

Eigen::Vector3d SemanticVoxelGrid::center_of(const VoxelIndex & index) const
{
  const double s = params_.voxel_size_m;
  return {(index.ix + 0.5) * s, (index.iy + 0.5) * s, (index.iz + 0.5) * s};
}

std::int64_t SemanticVoxelGrid::increment_for(double p_inverse_model) const
{
  const double delta = log_odds_update(0.0, p_inverse_model, params_.prior_probability);
  return std::llround(delta * VoxelCell::kScale);
}

InsertStats SemanticVoxelGrid::insert_labeled_cloud(
  const PointCloud & cloud, const Pose & sensor_pose)
{
  if (cloud.frame != sensor_pose.frame_from()) {
    throw Error(
      ErrorCode::FrameMismatch,
      "cloud in '" + cloud.frame + "', pose expects '" + sensor_pose.frame_from() + "'");
  }
  if (sensor_pose.frame_to() != frame_) {
    throw Error(
      ErrorCode::FrameMismatch,
      "pose maps into '" + sensor_pose.frame_to() + "', grid is in '" + frame_ + "'");
  }
  if (!cloud.labeled()) {
    throw Error(ErrorCode::InvalidArgument, "point cloud carries no labels");
  }

  InsertStats stats;
  std::vector<std::pair<VoxelIndex, Label>> keys;
  keys.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d & p = cloud.points[i];
    const Label label = cloud.labels[i];
    if (label == Label::Background) {
      ++stats.skipped_background;
      continue;
    }
    if (!p.allFinite()) {
      ++stats.skipped_invalid;
      continue;
    }
    if (p.norm() > params_.max_range_m) {
      ++stats.skipped_range;
      continue;
    }
    keys.emplace_back(index_of(sensor_pose.apply(p)), label);
    ++stats.inserted_points;
  }

  // One observation per (voxel, label) per frame.
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  const std::int64_t inc = increment_for(params_.l_occ_probability);
  for (const auto & [index, label] : keys) {
    cells_[index].add(label, inc);
  }
  stats.voxel_updates = keys.size();
  return stats;
}

void SemanticVoxelGrid::observe(const VoxelIndex & index, Label label, double p_inverse_model)
{
  if (label == Label::Background) {
    throw Error(ErrorCode::InvalidArgument, "background has no map accumulator");
  }
  cells_[index].add(label, increment_for(p_inverse_model));
}

const VoxelCell * SemanticVoxelGrid::find(const VoxelIndex & index) const
{
  auto it = cells_.find(index);
  return it == cells_.end() ? nullptr : &it->second;
}

double SemanticVoxelGrid::log_odds(const VoxelCell & cell, Label label) const
{
  return logit(params_.prior_probability) + cell.evidence(label);
}

double SemanticVoxelGrid::cell_probability(const VoxelCell & cell, Label label) const
{
  if (!cell.touched(label)) {
    return params_.prior_probability;
  }
  return logistic(log_odds(cell, label));
}

void SemanticVoxelGrid::merge(const SemanticVoxelGrid & other)
{
  const FusionParams & a = params_;
  const FusionParams & b = other.params_;
  if (
    frame_ != other.frame_ || a.voxel_size_m != b.voxel_size_m ||
    a.l_occ_probability != b.l_occ_probability || a.prior_probability != b.prior_probability) {
    throw Error(ErrorCode::InvalidArgument, "cannot merge grids with different parameters");
  }
  for (const auto & [index, cell] : other.cells_) {
    cells_[index].merge(cell);
  }
}

std::vector<std::pair<VoxelIndex, VoxelCell>> SemanticVoxelGrid::sorted_cells() const
{
  std::vector<std::pair<VoxelIndex, VoxelCell>> out(cells_.begin(), cells_.end());
  std::sort(out.begin(), out.end(), [](const auto & l, const auto & r) {
    return l.first < r.first;
  });
  return out;
}

bool SemanticVoxelGrid::operator==(const SemanticVoxelGrid & other) const
{
  return frame_ == other.frame_ && cells_ == other.cells_;
}

std::vector<SemanticVoxel> extract_semantic_map(const SemanticVoxelGrid & grid)
{
  std::vector<SemanticVoxel> out;
  for (const auto & [index, cell] : grid.sorted_cells()) {
    const double p_rock = grid.cell_probability(cell, Label::Rocks);
    const double p_sand = grid.cell_probability(cell, Label::Sand);
    // Rocks wins ties.
    const bool rock = p_rock >= p_sand;
    const double best = rock ? p_rock : p_sand;
    if (best > grid.params().occupied_threshold) {
      out.push_back(SemanticVoxel{index, rock ? Label::Rocks : Label::Sand, best});
    }
  }
  return out;
}

void write_semantic_map_ply(
  const std::filesystem::path & path, const SemanticVoxelGrid & grid,
  const std::vector<SemanticVoxel> & map, const Palette & palette)
{
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << "ply\n"
      << "format ascii 1.0\n"
      << "comment frame " << grid.frame() << '\n'
      << "comment voxel_size_m " << format_double(grid.params().voxel_size_m) << '\n'
      << "element vertex " << map.size() << '\n'
      << "property float x\n"
      << "property float y\n"
      << "property float z\n"
      << "property uchar red\n"
      << "property uchar green\n"
      << "property uchar blue\n"
      << "property uchar label\n"
      << "property float probability\n"
      << "end_header\n";
  char line[160];
  for (const auto & v : map) {
    const Eigen::Vector3d c = grid.center_of(v.index);
    const Rgb color = palette.color(v.label);
    std::snprintf(
      line, sizeof(line), "%.4f %.4f %.4f %u %u %u %u %.6f\n", c.x(), c.y(), c.z(),
      static_cast<unsigned>(color.r), static_cast<unsigned>(color.g),
      static_cast<unsigned>(color.b), static_cast<unsigned>(v.label), v.probability);
    out << line;
  }
}

std::string grid_to_csv(const SemanticVoxelGrid & grid)
{
  std::ostringstream out;
  out << "ix,iy,iz,label,log_odds\n";
  for (const auto & [index, cell] : grid.sorted_cells()) {
    for (Label l : kMapLabels) {
      if (!cell.touched(l)) {
        continue;
      }
      out << index.ix << ',' << index.iy << ',' << index.iz << ',' << to_string(l) << ','
          << format_double(grid.log_odds(cell, l)) << '\n';
    }
  }
  return out.str();
}

void write_grid_csv(const std::filesystem::path & path, const SemanticVoxelGrid & grid)
{
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << grid_to_csv(grid);
}

}  // namespace semmap
