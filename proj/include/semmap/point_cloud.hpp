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

#ifndef SEMMAP_POINT_CLOUD_HPP_
#define SEMMAP_POINT_CLOUD_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "semmap/camera_geometry.hpp"
#include "semmap/labeling.hpp"

namespace semmap
{

/// Points in one named frame. labels is either empty or parallel to points;
/// pixels records the left-image pixel each point came from, when known.
struct PointCloud
{
  std::string frame{kLeftCameraFrame};
  std::vector<Eigen::Vector3d> points;
  std::vector<Label> labels;
  std::vector<Eigen::Vector2i> pixels;

  std::size_t size() const { return points.size(); }
  bool labeled() const { return labels.size() == points.size(); }
};

}  // namespace semmap

#endif  // SEMMAP_POINT_CLOUD_HPP_
