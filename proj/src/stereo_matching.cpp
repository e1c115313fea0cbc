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

#include "semmap/stereo_matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semmap/error.hpp"

namespace semmap
{

double MatchingParams::default_p1(int block_radius)
{
  const double area = (2.0 * block_radius + 1.0) * (2.0 * block_radius + 1.0);
  return 8.0 * area / 255.0;
}

double MatchingParams::default_p2(int block_radius)
{
  const double area = (2.0 * block_radius + 1.0) * (2.0 * block_radius + 1.0);
  return 32.0 * area / 255.0;
}

void MatchingParams::validate() const
{
  if (block_radius < 1) {
    throw Error(ErrorCode::InvalidArgument, "block_radius must be >= 1");
  }
  if (max_disparity < 1) {
    throw Error(ErrorCode::InvalidArgument, "max_disparity must be >= 1");
  }
  if (!(p1_smooth > 0.0 && p1_smooth < p2_smooth)) {
    throw Error(ErrorCode::InvalidArgument, "require 0 < p1_smooth < p2_smooth");
  }
  if (!(uniqueness_ratio >= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "uniqueness_ratio must be >= 1");
  }
  if (num_paths != 4 && num_paths != 8) {
    throw Error(ErrorCode::InvalidArgument, "num_paths must be 4 or 8");
  }
}

MatchingParams MatchingParams::from_config(const KeyValueConfig & cfg, const std::string & prefix)
{
  MatchingParams p;
  p.block_radius = static_cast<int>(cfg.get_int(prefix + "block_radius", p.block_radius));
  p.max_disparity = static_cast<int>(cfg.get_int(prefix + "max_disparity", p.max_disparity));
  p.p1_smooth = cfg.get_double(prefix + "p1_smooth", default_p1(p.block_radius));
  p.p2_smooth = cfg.get_double(prefix + "p2_smooth", default_p2(p.block_radius));
  p.uniqueness_ratio = cfg.get_double(prefix + "uniqueness_ratio", p.uniqueness_ratio);
  p.num_paths = static_cast<int>(cfg.get_int(prefix + "num_paths", p.num_paths));
  p.subpixel = cfg.get_bool(prefix + "subpixel", p.subpixel);
  p.invalidate_left_border =
    cfg.get_bool(prefix + "invalidate_left_border", p.invalidate_left_border);
  p.validate();
  return p;
}

void MatchingParams::to_config(KeyValueConfig & cfg, const std::string & prefix) const
{
  cfg.set(prefix + "block_radius", std::to_string(block_radius));
  cfg.set(prefix + "max_disparity", std::to_string(max_disparity));
  cfg.set(prefix + "p1_smooth", format_double(p1_smooth));
  cfg.set(prefix + "p2_smooth", format_double(p2_smooth));
  cfg.set(prefix + "uniqueness_ratio", format_double(uniqueness_ratio));
  cfg.set(prefix + "num_paths", std::to_string(num_paths));
  cfg.set(prefix + "subpixel", subpixel ? "true" : "false");
  cfg.set(prefix + "invalidate_left_border", invalidate_left_border ? "true" : "false");
}

CostVolume::CostVolume(int width, int height, int num_disparities, float fill)
: width_(width),
  height_(height),
  num_disparities_(num_disparities),
  data_(
    static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
      static_cast<std::size_t>(num_disparities),
    fill)
{
}

namespace
{

void check_pair(const GrayImage & left, const GrayImage & right, const MatchingParams & params)
{
  if (left.width != right.width || left.height != right.height) {
    throw Error(ErrorCode::DimensionMismatch, "left and right images differ in size");
  }
  if (left.width <= 0 || left.height <= 0) {
    throw Error(ErrorCode::DimensionMismatch, "empty image");
  }
  if (params.block_radius < 0 || params.max_disparity < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative block radius or disparity range");
  }
}

inline float abs_diff(const GrayImage & left, const GrayImage & right, int x, int y, int d)
{
  const int xr = x - d;
  if (xr < 0) {
    return 1.0f;
  }
  return std::fabs(left.at(x, y) - right.at(xr, y));
}

inline int clampi(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

// One recurrence step: out[d] = C[d] + min(prev[d], prev[d±1] + p1, min(prev) + p2) - min(prev).
inline void path_step(
  std::span<const float> cost, const float * prev, float * out, float p1, float p2)
{
  const int n = static_cast<int>(cost.size());
  float min_prev = prev[0];
  for (int d = 1; d < n; ++d) {
    min_prev = std::min(min_prev, prev[d]);
  }
  const float jump = min_prev + p2;
  for (int d = 0; d < n; ++d) {
    float best = prev[d];
    if (d > 0) {
      best = std::min(best, prev[d - 1] + p1);
    }
    if (d + 1 < n) {
      best = std::min(best, prev[d + 1] + p1);
    }
    best = std::min(best, jump);
    out[d] = cost[static_cast<std::size_t>(d)] + (best - min_prev);
  }
}

void check_smoothness(double p1, double p2)
{
  if (!(p1 >= 0.0 && p2 >= p1)) {
    throw Error(ErrorCode::InvalidArgument, "require 0 <= p1_smooth <= p2_smooth");
  }
}

}  // namespace

CostVolume sad_cost_volume(
  const GrayImage & left, const GrayImage & right, const MatchingParams & params)
{
  check_pair(left, right, params);
  const int w = left.width;
  const int h = left.height;
  const int nd = params.max_disparity + 1;
  const int r = params.block_radius;
  CostVolume volume(w, h, nd);

#pragma omp parallel
  {
    std::vector<double> column(static_cast<std::size_t>(w));
    std::vector<double> prefix(static_cast<std::size_t>(w + 2 * r + 1));
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int d = 0; d < nd; ++d) {
        // Vertical block sums, rows clamped to the border.
        for (int x = 0; x < w; ++x) {
          double s = 0.0;
          for (int j = -r; j <= r; ++j) {
            s += abs_diff(left, right, x, clampi(y + j, 0, h - 1), d);
          }
          column[static_cast<std::size_t>(x)] = s;
        }
        // Horizontal sliding window over the border-clamped column sums.
        prefix[0] = 0.0;
        for (int k = 0; k < w + 2 * r; ++k) {
          const int x = clampi(k - r, 0, w - 1);
          prefix[static_cast<std::size_t>(k + 1)] =
            prefix[static_cast<std::size_t>(k)] + column[static_cast<std::size_t>(x)];
        }
        for (int x = 0; x < w; ++x) {
          const double s = prefix[static_cast<std::size_t>(x + 2 * r + 1)] -
                           prefix[static_cast<std::size_t>(x)];
          volume.at(x, y, d) = static_cast<float>(s);
        }
      }
    }
  }
  return volume;
}

CostVolume aggregate_path(
  const CostVolume & costs, PathDirection direction, double p1_smooth, double p2_smooth)
{
  check_smoothness(p1_smooth, p2_smooth);
  const int w = costs.width();
  const int h = costs.height();
  const int nd = costs.num_disparities();
  const float p1 = static_cast<float>(p1_smooth);
  const float p2 = static_cast<float>(p2_smooth);
  CostVolume out(w, h, nd);

  // Scan so that p - r is always visited before p.
  const bool y_up = direction.dy >= 0;
  const bool x_up = direction.dx >= 0;
  for (int yi = 0; yi < h; ++yi) {
    const int y = y_up ? yi : h - 1 - yi;
    for (int xi = 0; xi < w; ++xi) {
      const int x = x_up ? xi : w - 1 - xi;
      const int px = x - direction.dx;
      const int py = y - direction.dy;
      auto dst = out.costs(x, y);
      if (px < 0 || py < 0 || px >= w || py >= h) {
        std::copy(costs.costs(x, y).begin(), costs.costs(x, y).end(), dst.begin());
        continue;
      }
      path_step(costs.costs(x, y), out.costs(px, py).data(), dst.data(), p1, p2);
    }
  }
  return out;
}

CostVolume sgm_aggregate(const CostVolume & costs, const MatchingParams & params)
{
  check_smoothness(params.p1_smooth, params.p2_smooth);
  if (params.num_paths != 4 && params.num_paths != 8) {
    throw Error(ErrorCode::InvalidArgument, "num_paths must be 4 or 8");
  }
  const int w = costs.width();
  const int h = costs.height();
  const int nd = costs.num_disparities();
  const float p1 = static_cast<float>(params.p1_smooth);
  const float p2 = static_cast<float>(params.p2_smooth);
  CostVolume total(w, h, nd);

  for (int k = 0; k < params.num_paths; ++k) {
    const PathDirection dir = kPathDirections[static_cast<std::size_t>(k)];
    // Each path start owns the pixels along its line, so lines run independently.
    std::vector<std::pair<int, int>> starts;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int px = x - dir.dx;
        const int py = y - dir.dy;
        if (px < 0 || py < 0 || px >= w || py >= h) {
          starts.emplace_back(x, y);
        }
      }
    }
    const int num_starts = static_cast<int>(starts.size());
#pragma omp parallel
    {
      std::vector<float> prev(static_cast<std::size_t>(nd));
      std::vector<float> cur(static_cast<std::size_t>(nd));
#pragma omp for schedule(dynamic, 16)
      for (int s = 0; s < num_starts; ++s) {
        int x = starts[static_cast<std::size_t>(s)].first;
        int y = starts[static_cast<std::size_t>(s)].second;
        auto c0 = costs.costs(x, y);
        std::copy(c0.begin(), c0.end(), prev.begin());
        auto t0 = total.costs(x, y);
        for (int d = 0; d < nd; ++d) {
          t0[static_cast<std::size_t>(d)] += prev[static_cast<std::size_t>(d)];
        }
        x += dir.dx;
        y += dir.dy;
        while (x >= 0 && y >= 0 && x < w && y < h) {
          path_step(costs.costs(x, y), prev.data(), cur.data(), p1, p2);
          auto t = total.costs(x, y);
          for (int d = 0; d < nd; ++d) {
            t[static_cast<std::size_t>(d)] += cur[static_cast<std::size_t>(d)];
          }
          std::swap(prev, cur);
          x += dir.dx;
          y += dir.dy;
        }
      }
    }
  }
  return total;
}

DisparityMap winner_take_all(const CostVolume & costs, const MatchingParams & params)
{
  const int w = costs.width();
  const int h = costs.height();
  const int nd = costs.num_disparities();
  DisparityMap out(w, h);
  const float ratio = static_cast<float>(params.uniqueness_ratio);

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto c = costs.costs(x, y);
      int best_d = 0;
      for (int d = 1; d < nd; ++d) {
        if (c[static_cast<std::size_t>(d)] < c[static_cast<std::size_t>(best_d)]) {
          best_d = d;
        }
      }
      const float best = c[static_cast<std::size_t>(best_d)];
      if (best_d == 0 || best_d == nd - 1) {
        continue;
      }
      float second = std::numeric_limits<float>::infinity();
      for (int d = 0; d < nd; ++d) {
        if (std::abs(d - best_d) > 1) {
          second = std::min(second, c[static_cast<std::size_t>(d)]);
        }
      }
      if (second <= ratio * best) {
        continue;
      }
      double disparity = best_d;
      if (params.subpixel) {
        const double cm = c[static_cast<std::size_t>(best_d - 1)];
        const double c0 = best;
        const double cp = c[static_cast<std::size_t>(best_d + 1)];
        const double denom = cm - 2.0 * c0 + cp;
        if (denom > 0.0) {
          disparity += std::clamp((cm - cp) / (2.0 * denom), -0.5, 0.5);
        }
      }
      out.disparity.at(x, y) = static_cast<float>(disparity);
      out.valid.at(x, y) = 1;
    }
  }
  return out;
}

DisparityMap compute_disparity(
  const GrayImage & left, const GrayImage & right, const MatchingParams & params)
{
  params.validate();
  const CostVolume raw = sad_cost_volume(left, right, params);
  DisparityMap map = winner_take_all(sgm_aggregate(raw, params), params);
  if (params.invalidate_left_border) {
    const int band = std::min(params.max_disparity, map.width());
    for (int v = 0; v < map.height(); ++v) {
      for (int u = 0; u < band; ++u) {
        map.valid.at(u, v) = 0;
        map.disparity.at(u, v) = 0.0f;
      }
    }
  }
  return map;
}

DisparityMap disparity_from_fixed_point(const Image<std::uint16_t> & raster)
{
  DisparityMap map(raster.width, raster.height);
  for (std::size_t i = 0; i < raster.size(); ++i) {
    if (raster.data[i] != 0) {
      map.disparity.data[i] = static_cast<float>(raster.data[i]) / 16.0f;
      map.valid.data[i] = 1;
    }
  }
  return map;
}

Image<std::uint16_t> disparity_to_fixed_point(const DisparityMap & map)
{
  Image<std::uint16_t> raster(map.width(), map.height(), 0);
  for (std::size_t i = 0; i < raster.size(); ++i) {
    if (map.valid.data[i] != 0) {
      const long v = std::lround(static_cast<double>(map.disparity.data[i]) * 16.0);
      raster.data[i] = static_cast<std::uint16_t>(std::clamp<long>(v, 1, 65535));
    }
  }
  return raster;
}

DisparityMap load_disparity(const std::filesystem::path & path)
{
  return disparity_from_fixed_point(load_u16(path));
}

void save_disparity(const std::filesystem::path & path, const DisparityMap & map)
{
  save_u16(path, disparity_to_fixed_point(map));
}

namespace reference
{

CostVolume sad_cost_volume(
  const GrayImage & left, const GrayImage & right, const MatchingParams & params)
{
  check_pair(left, right, params);
  const int w = left.width;
  const int h = left.height;
  const int nd = params.max_disparity + 1;
  const int r = params.block_radius;
  CostVolume volume(w, h, nd);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int d = 0; d < nd; ++d) {
        double s = 0.0;
        for (int j = -r; j <= r; ++j) {
          for (int i = -r; i <= r; ++i) {
            s += abs_diff(left, right, clampi(x + i, 0, w - 1), clampi(y + j, 0, h - 1), d);
          }
        }
        volume.at(x, y, d) = static_cast<float>(s);
      }
    }
  }
  return volume;
}

CostVolume sgm_aggregate(const CostVolume & costs, const MatchingParams & params)
{
  CostVolume total(costs.width(), costs.height(), costs.num_disparities());
  for (int k = 0; k < params.num_paths; ++k) {
    const CostVolume path = aggregate_path(
      costs, kPathDirections[static_cast<std::size_t>(k)], params.p1_smooth, params.p2_smooth);
    for (std::size_t i = 0; i < total.raw().size(); ++i) {
      total.raw()[i] += path.raw()[i];
    }
  }
  return total;
}

}  // namespace reference

}  // namespace semmap
