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

#include "semmap/plane_baseline.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "semmap/error.hpp"

namespace semmap
{

std::optional<PlaneModel> PlaneModel::through(
  const Eigen::Vector3d & a, const Eigen::Vector3d & b, const Eigen::Vector3d & c)
{
  const Eigen::Vector3d ab = b - a;
  const Eigen::Vector3d ac = c - a;
  const Eigen::Vector3d n = ab.cross(ac);
  const double scale = ab.norm() * ac.norm();
  if (!(scale > 0.0) || !(n.norm() > 1e-9 * scale)) {
    return std::nullopt;
  }
  const Eigen::Vector3d unit = n.normalized();
  return PlaneModel{unit, unit.dot(a)};
}

PlaneModel PlaneModel::oriented_towards(const Eigen::Vector3d & sensor) const
{
  const double side = signed_distance(sensor);
  bool flip = side < 0.0;
  if (side == 0.0) {
    // Sensor on the plane: pick the sign with a positive dominant component.
    Eigen::Index k = 0;
    normal.cwiseAbs().maxCoeff(&k);
    flip = normal[k] < 0.0;
  }
  return flip ? PlaneModel{-normal, -offset_m} : *this;
}

void MlesacParams::validate() const
{
  if (iterations < 1) {
    throw Error(ErrorCode::InvalidArgument, "iterations must be >= 1");
  }
  if (!(inlier_sigma_m > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "inlier_sigma_m must be positive");
  }
  if (!(outlier_span_m > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "outlier_span_m must be positive");
  }
  if (em_steps < 1 || em_steps > 50) {
    throw Error(ErrorCode::InvalidArgument, "em_steps must be in [1, 50]");
  }
  if (!(min_sample_separation_m >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "min_sample_separation_m must be >= 0");
  }
}

MlesacParams MlesacParams::from_config(const KeyValueConfig & cfg, const std::string & prefix)
{
  MlesacParams p;
  p.iterations = static_cast<int>(cfg.get_int(prefix + "iterations", p.iterations));
  p.inlier_sigma_m = cfg.get_double(prefix + "inlier_sigma_m", p.inlier_sigma_m);
  p.outlier_span_m = cfg.get_double(prefix + "outlier_span_m", p.outlier_span_m);
  p.em_steps = static_cast<int>(cfg.get_int(prefix + "em_steps", p.em_steps));
  p.min_sample_separation_m =
    cfg.get_double(prefix + "min_sample_separation_m", p.min_sample_separation_m);
  p.seed = static_cast<std::uint64_t>(cfg.get_int(prefix + "seed", 0));
  p.max_fit_points = static_cast<std::size_t>(
    cfg.get_int(prefix + "max_fit_points", static_cast<long long>(p.max_fit_points)));
  p.validate();
  return p;
}

void MlesacParams::to_config(KeyValueConfig & cfg, const std::string & prefix) const
{
  cfg.set(prefix + "iterations", std::to_string(iterations));
  cfg.set(prefix + "inlier_sigma_m", format_double(inlier_sigma_m));
  cfg.set(prefix + "outlier_span_m", format_double(outlier_span_m));
  cfg.set(prefix + "em_steps", std::to_string(em_steps));
  cfg.set(prefix + "min_sample_separation_m", format_double(min_sample_separation_m));
  cfg.set(prefix + "seed", std::to_string(seed));
  cfg.set(prefix + "max_fit_points", std::to_string(max_fit_points));
}

void HeightClassifierParams::validate() const
{
  if (!(rock_height_threshold_m > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rock_height_threshold_m must be positive");
  }
}

HeightClassifierParams HeightClassifierParams::from_config(
  const KeyValueConfig & cfg, const std::string & prefix)
{
  HeightClassifierParams p;
  p.rock_height_threshold_m =
    cfg.get_double(prefix + "rock_height_threshold_m", p.rock_height_threshold_m);
  p.validate();
  return p;
}

void HeightClassifierParams::to_config(KeyValueConfig & cfg, const std::string & prefix) const
{
  cfg.set(prefix + "rock_height_threshold_m", format_double(rock_height_threshold_m));
}

namespace
{

struct Mixture
{
  double gauss_norm;
  double inv_two_var;
  double uniform;
};

Mixture mixture_of(const MlesacParams & params)
{
  const double s = params.inlier_sigma_m;
  return Mixture{
    1.0 / (std::sqrt(2.0 * std::numbers::pi) * s), 1.0 / (2.0 * s * s),
    1.0 / params.outlier_span_m};
}

double unit_uniform(std::mt19937_64 & rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Minimal sample for one iteration, seeded from (seed, iteration) so the draw
// does not depend on which thread evaluates it.
std::optional<PlaneModel> sample_hypothesis(
  std::span<const Eigen::Vector3d> points, const MlesacParams & params, int iteration)
{
  std::seed_seq seq{
    static_cast<std::uint32_t>(params.seed & 0xffffffffu),
    static_cast<std::uint32_t>(params.seed >> 32), static_cast<std::uint32_t>(iteration)};
  std::mt19937_64 rng(seq);
  const std::size_t n = points.size();
  const double min_sep2 = params.min_sample_separation_m * params.min_sample_separation_m;
  constexpr int kAttempts = 16;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::size_t idx[3];
    for (auto & i : idx) {
      i = std::min(n - 1, static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n)));
    }
    if (idx[0] == idx[1] || idx[0] == idx[2] || idx[1] == idx[2]) {
      continue;
    }
    const auto & a = points[idx[0]];
    const auto & b = points[idx[1]];
    const auto & c = points[idx[2]];
    if (
      (a - b).squaredNorm() < min_sep2 || (a - c).squaredNorm() < min_sep2 ||
      (b - c).squaredNorm() < min_sep2) {
      continue;
    }
    if (auto plane = PlaneModel::through(a, b, c)) {
      return plane;
    }
  }
  return std::nullopt;
}

std::vector<Eigen::Vector3d> strided_subset(
  std::span<const Eigen::Vector3d> points, std::size_t max_points)
{
  const std::size_t n = points.size();
  if (max_points == 0 || n <= max_points) {
    return {points.begin(), points.end()};
  }
  std::vector<Eigen::Vector3d> out;
  out.reserve(max_points);
  for (std::size_t k = 0; k < max_points; ++k) {
    out.push_back(points[k * n / max_points]);
  }
  return out;
}

void check_input(std::span<const Eigen::Vector3d> points, const MlesacParams & params)
{
  params.validate();
  if (points.size() < 3) {
    throw Error(ErrorCode::TooFewPoints, "MLESAC needs at least 3 points");
  }
}

MlesacResult finish(
  std::span<const Eigen::Vector3d> points, std::span<const Eigen::Vector3d> scoring,
  const MlesacParams & params, const Eigen::Vector3d & sensor,
  std::vector<std::optional<PlaneModel>> hypotheses, std::vector<MlesacScore> scores)
{
  MlesacResult result;
  result.candidate_costs.resize(scores.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!hypotheses[i]) {
      continue;
    }
    result.candidate_costs[i] = scores[i].cost;
    // Strict comparison keeps the lowest iteration index on ties.
    if (result.best_iteration < 0 || scores[i].cost < result.cost) {
      result.best_iteration = static_cast<int>(i);
      result.cost = scores[i].cost;
      result.inlier_fraction = scores[i].inlier_fraction;
    }
  }
  if (result.best_iteration < 0) {
    throw Error(ErrorCode::DegenerateGeometry, "no non-degenerate minimal sample found");
  }
  result.hypothesis =
    hypotheses[static_cast<std::size_t>(result.best_iteration)]->oriented_towards(sensor);
  result.plane = result.hypothesis;

  std::vector<std::uint8_t> mask(points.size(), 0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = result.hypothesis.signed_distance(points[i]);
    if (inlier_posterior(r, result.inlier_fraction, params) > 0.5) {
      mask[i] = 1;
      ++count;
    }
  }
  if (count >= 3) {
    try {
      const PlaneModel refit = fit_plane_least_squares(points, mask).oriented_towards(sensor);
      const MlesacScore s = mlesac_score(scoring, refit, params);
      if (s.cost <= result.cost) {
        result.plane = refit;
        result.cost = s.cost;
        result.inlier_fraction = s.inlier_fraction;
        result.refined = true;
      }
    } catch (const Error &) {
      // Degenerate inlier set: keep the sampled hypothesis.
    }
  }

  result.inliers.assign(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = result.plane.signed_distance(points[i]);
    result.inliers[i] = inlier_posterior(r, result.inlier_fraction, params) > 0.5 ? 1 : 0;
  }
  return result;
}

}  // namespace

double inlier_posterior(double residual, double inlier_fraction, const MlesacParams & params)
{
  const Mixture m = mixture_of(params);
  const double g = inlier_fraction * m.gauss_norm * std::exp(-residual * residual * m.inv_two_var);
  const double u = (1.0 - inlier_fraction) * m.uniform;
  const double total = g + u;
  return total > 0.0 ? g / total : 0.0;
}

MlesacScore mlesac_score(
  std::span<const Eigen::Vector3d> points, const PlaneModel & plane, const MlesacParams & params)
{
  const Mixture m = mixture_of(params);
  const std::size_t n = points.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = plane.signed_distance(points[i]);
    g[i] = m.gauss_norm * std::exp(-r * r * m.inv_two_var);
  }
  double gamma = 0.5;
  for (int step = 0; step < params.em_steps; ++step) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double in = gamma * g[i];
      sum += in / (in + (1.0 - gamma) * m.uniform);
    }
    gamma = sum / static_cast<double>(n);
  }
  double nll = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    nll -= std::log(gamma * g[i] + (1.0 - gamma) * m.uniform);
  }
  return MlesacScore{nll, gamma};
}

MlesacResult mlesac_plane(
  std::span<const Eigen::Vector3d> points, const MlesacParams & params,
  const Eigen::Vector3d & sensor)
{
  check_input(points, params);
  const std::vector<Eigen::Vector3d> scoring = strided_subset(points, params.max_fit_points);
  const int iters = params.iterations;
  std::vector<std::optional<PlaneModel>> hypotheses(static_cast<std::size_t>(iters));
  std::vector<MlesacScore> scores(static_cast<std::size_t>(iters));

#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < iters; ++i) {
    const auto k = static_cast<std::size_t>(i);
    hypotheses[k] = sample_hypothesis(scoring, params, i);
    if (hypotheses[k]) {
      scores[k] = mlesac_score(scoring, *hypotheses[k], params);
    }
  }
  return finish(points, scoring, params, sensor, std::move(hypotheses), std::move(scores));
}

PlaneModel fit_plane_least_squares(
  std::span<const Eigen::Vector3d> points, std::span<const std::uint8_t> mask)
{
  const bool use_mask = !mask.empty();
  if (use_mask && mask.size() != points.size()) {
    throw Error(ErrorCode::InvalidArgument, "mask size differs from point count");
  }
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  std::size_t n = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!use_mask || mask[i]) {
      centroid += points[i];
      ++n;
    }
  }
  if (n < 3) {
    throw Error(ErrorCode::TooFewPoints, "plane fit needs at least 3 points");
  }
  centroid /= static_cast<double>(n);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!use_mask || mask[i]) {
      const Eigen::Vector3d d = points[i] - centroid;
      cov += d * d.transpose();
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Eigen::Vector3d eig = solver.eigenvalues();
  // Ascending eigenvalues: a second near-zero value means the points are collinear.
  if (!(eig[2] > 0.0) || !(eig[1] > 1e-12 * eig[2])) {
    throw Error(ErrorCode::DegenerateGeometry, "points are collinear");
  }
  const Eigen::Vector3d normal = solver.eigenvectors().col(0).normalized();
  return PlaneModel{normal, normal.dot(centroid)};
}

std::vector<Label> classify_by_height(
  std::span<const Eigen::Vector3d> points, const PlaneModel & plane,
  const HeightClassifierParams & params)
{
  std::vector<Label> labels(points.size(), Label::Sand);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (plane.signed_distance(points[i]) > params.rock_height_threshold_m) {
      labels[i] = Label::Rocks;
    }
  }
  return labels;
}

BaselineFrameResult baseline_pipeline(
  const PointCloud & cloud, const Pose & sensor_pose, SemanticVoxelGrid & grid,
  const MlesacParams & mlesac, const HeightClassifierParams & classifier)
{
  if (cloud.frame != sensor_pose.frame_from()) {
    throw Error(
      ErrorCode::FrameMismatch,
      "cloud in '" + cloud.frame + "', pose expects '" + sensor_pose.frame_from() + "'");
  }
  // The fit runs in the sensor frame, so the sensor sits at the origin.
  BaselineFrameResult result;
  result.fit = mlesac_plane(cloud.points, mlesac, Eigen::Vector3d::Zero());
  PointCloud labeled = cloud;
  labeled.labels = classify_by_height(cloud.points, result.fit.plane, classifier);
  result.stats = grid.insert_labeled_cloud(labeled, sensor_pose);
  return result;
}

namespace reference
{

MlesacResult mlesac_plane(
  std::span<const Eigen::Vector3d> points, const MlesacParams & params,
  const Eigen::Vector3d & sensor)
{
  check_input(points, params);
  const std::vector<Eigen::Vector3d> scoring = strided_subset(points, params.max_fit_points);
  const auto iters = static_cast<std::size_t>(params.iterations);
  std::vector<std::optional<PlaneModel>> hypotheses(iters);
  std::vector<MlesacScore> scores(iters);
  for (std::size_t i = 0; i < iters; ++i) {
    hypotheses[i] = sample_hypothesis(scoring, params, static_cast<int>(i));
    if (hypotheses[i]) {
      scores[i] = mlesac_score(scoring, *hypotheses[i], params);
    }
  }
  return finish(points, scoring, params, sensor, std::move(hypotheses), std::move(scores));
}

}  // namespace reference

}  // namespace semmap
