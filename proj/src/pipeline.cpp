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

#include "semmap/pipeline.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "semmap/error.hpp"
#include "semmap/image.hpp"

namespace semmap
{
namespace fs = std::filesystem;

std::string to_string(Method method) { return method == Method::Cnn ? "cnn" : "mlesac"; }

Method method_from_string(const std::string & name)
{
  if (name == "cnn") {
    return Method::Cnn;
  }
  if (name == "mlesac") {
    return Method::Mlesac;
  }
  throw Error(ErrorCode::ConfigInvalid, "method must be 'cnn' or 'mlesac', got '" + name + "'");
}

FrameRange parse_frame_range(const std::string & text)
{
  const auto sep = text.find("..");
  if (sep == std::string::npos) {
    throw Error(ErrorCode::ConfigInvalid, "frame range must look like 'a..b': '" + text + "'");
  }
  try {
    const long long a = parse_int(text.substr(0, sep), "frames");
    const long long b = parse_int(text.substr(sep + 2), "frames");
    if (a < 0 || b < 0) {
      throw Error(ErrorCode::ConfigInvalid, "frame indices must be non-negative");
    }
    return FrameRange{static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
  } catch (const Error & e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
}

namespace
{

fs::path resolve(const fs::path & base, const std::string & value)
{
  const fs::path p(value);
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

std::string default_dataset_name(const fs::path & dataset)
{
  fs::path p = dataset.lexically_normal();
  if (p.filename().empty()) {
    p = p.parent_path();
  }
  std::error_code ec;
  const fs::path canonical = fs::weakly_canonical(p, ec);
  return ec ? p.filename().string() : canonical.filename().string();
}

}  // namespace

RunConfig RunConfig::from_config(const KeyValueConfig & cfg, const fs::path & base_dir)
{
  try {
    RunConfig c;
    c.dataset = resolve(base_dir, cfg.get_string("dataset"));
    c.dataset_name = cfg.get_string("dataset_name", default_dataset_name(c.dataset));
    c.method = method_from_string(cfg.get_string("method", "cnn"));
    c.camera_path = cfg.has("camera") ? resolve(base_dir, cfg.get_string("camera"))
                                      : c.dataset / "camera.cfg";
    c.labels_dir = cfg.has("labels") ? resolve(base_dir, cfg.get_string("labels"))
                                     : c.dataset / "labels";
    c.output = resolve(base_dir, cfg.get_string("output", "out"));
    if (auto f = cfg.find("frames")) {
      c.frames = parse_frame_range(*f);
    }
    c.fusion = FusionParams::from_config(cfg, "fusion.");
    c.matching = MatchingParams::from_config(cfg, "matching.");
    c.mlesac = MlesacParams::from_config(cfg, "mlesac.");
    c.classifier = HeightClassifierParams::from_config(cfg, "classifier.");
    c.palette = Palette::from_config(cfg, "palette.");
    c.min_disparity = cfg.get_double("min_disparity", c.min_disparity);
    c.use_precomputed_disparity =
      cfg.get_bool("use_precomputed_disparity", c.use_precomputed_disparity);
    return c;
  } catch (const Error & e) {
    if (e.code() == ErrorCode::ConfigInvalid) {
      throw;
    }
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
}

RunConfig RunConfig::load(const fs::path & path)
{
  KeyValueConfig cfg;
  try {
    cfg = KeyValueConfig::load(path);
  } catch (const Error & e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return from_config(cfg, base);
}

void RunConfig::validate() const
{
  if (!fs::is_directory(dataset)) {
    throw Error(ErrorCode::ConfigInvalid, "dataset directory does not exist: " + dataset.string());
  }
  if (!fs::exists(camera_path)) {
    throw Error(ErrorCode::ConfigInvalid, "camera config does not exist: " + camera_path.string());
  }
}

KeyValueConfig RunConfig::to_config() const
{
  KeyValueConfig cfg;
  cfg.set("dataset", fs::absolute(dataset).lexically_normal().string());
  cfg.set("dataset_name", dataset_name);
  cfg.set("method", to_string(method));
  cfg.set("camera", fs::absolute(camera_path).lexically_normal().string());
  cfg.set("labels", fs::absolute(labels_dir).lexically_normal().string());
  cfg.set("output", fs::absolute(output).lexically_normal().string());
  if (frames) {
    cfg.set("frames", std::to_string(frames->first) + ".." + std::to_string(frames->last));
  }
  cfg.set("min_disparity", format_double(min_disparity));
  cfg.set("use_precomputed_disparity", use_precomputed_disparity ? "true" : "false");
  fusion.to_config(cfg, "fusion.");
  matching.to_config(cfg, "matching.");
  mlesac.to_config(cfg, "mlesac.");
  classifier.to_config(cfg, "classifier.");
  palette.to_config(cfg, "palette.");
  return cfg;
}

DatasetIndex index_dataset(const RunConfig & config)
{
  DatasetIndex index;
  try {
    index.camera = CameraModel::load(config.camera_path);
  } catch (const Error & e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }

  const fs::path left_dir = config.dataset / "left";
  if (!fs::is_directory(left_dir)) {
    throw Error(ErrorCode::DatasetIncomplete, "missing " + left_dir.string());
  }
  std::vector<std::string> stems;
  for (const auto & entry : fs::directory_iterator(left_dir)) {
    if (entry.is_regular_file() && (entry.path().extension() == ".png" ||
                                    entry.path().extension() == ".pgm")) {
      stems.push_back(entry.path().stem().string());
    }
  }
  std::sort(stems.begin(), stems.end());

  std::size_t first = 0;
  std::size_t last = stems.empty() ? 0 : stems.size() - 1;
  if (config.frames) {
    first = config.frames->first;
    last = std::min(config.frames->last, last);
  }
  if (stems.empty() || first >= stems.size() || first > last) {
    throw Error(ErrorCode::DatasetIncomplete, "frame selection contains no frames");
  }

  const fs::path poses_path = config.dataset / "poses.csv";
  if (!fs::exists(poses_path)) {
    throw Error(ErrorCode::DatasetIncomplete, "missing " + poses_path.string());
  }
  std::map<std::string, Pose> poses;
  for (auto & sp : load_poses_csv(poses_path)) {
    poses.insert_or_assign(sp.timestamp, sp.pose);
  }

  auto find_image = [](const fs::path & dir, const std::string & stem) -> std::optional<fs::path> {
    for (const char * ext : {".png", ".pgm"}) {
      const fs::path p = dir / (stem + ext);
      if (fs::exists(p)) {
        return p;
      }
    }
    return std::nullopt;
  };

  for (std::size_t i = first; i <= last; ++i) {
    const std::string & stem = stems[i];
    FrameFiles f;
    f.stem = stem;
    f.left = *find_image(left_dir, stem);
    auto right = find_image(config.dataset / "right", stem);
    if (!right) {
      throw Error(
        ErrorCode::DatasetIncomplete, "missing " + (config.dataset / "right" / (stem + ".png")).string());
    }
    f.right = *right;
    auto pose = poses.find(stem);
    if (pose == poses.end()) {
      throw Error(
        ErrorCode::DatasetIncomplete, "missing pose for timestamp " + stem + " in " +
                                        poses_path.string());
    }
    f.pose = pose->second;
    f.labels = find_image(config.labels_dir, stem);
    if (config.method == Method::Cnn && !f.labels) {
      throw Error(
        ErrorCode::DatasetIncomplete,
        "missing " + (config.labels_dir / (stem + ".png")).string());
    }
    if (config.use_precomputed_disparity) {
      f.disparity = find_image(config.dataset / "disparity", stem);
    }
    index.frames.push_back(std::move(f));
  }

  const fs::path gt_raster = config.dataset / "ground_truth" / "raster.png";
  const fs::path gt_geo = config.dataset / "ground_truth" / "raster.geo";
  if (fs::exists(gt_raster) && fs::exists(gt_geo)) {
    index.ground_truth_raster = gt_raster;
    index.ground_truth_georef = gt_geo;
  }
  return index;
}

PointCloud build_cloud(
  const DisparityMap & disparity, const CameraModel & camera, const LabelImage * labels,
  double min_disparity)
{
  if (disparity.width() != camera.width || disparity.height() != camera.height) {
    throw Error(ErrorCode::DimensionMismatch, "disparity map does not match the camera model");
  }
  if (labels && (labels->width != camera.width || labels->height != camera.height)) {
    throw Error(ErrorCode::DimensionMismatch, "label image does not match the camera model");
  }
  PointCloud cloud;
  cloud.frame = kLeftCameraFrame;
  for (int v = 0; v < disparity.height(); ++v) {
    for (int u = 0; u < disparity.width(); ++u) {
      const double d = disparity.disparity.at(u, v);
      if (!disparity.is_valid(u, v) || !(d > min_disparity)) {
        continue;
      }
      const Point3 p = triangulate(u, v, d, camera, min_disparity);
      cloud.points.push_back(p.vec());
      cloud.pixels.emplace_back(u, v);
      if (labels) {
        cloud.labels.push_back(label_at(*labels, u, v));
      }
    }
  }
  return cloud;
}

RunResult run(const RunConfig & config, std::ostream & log)
{
  config.validate();
  const DatasetIndex index = index_dataset(config);
  const CameraModel & cam = index.camera;
  fs::create_directories(config.output);

  RunResult result;
  result.grid = SemanticVoxelGrid(config.fusion, kWorldFrame);

  for (const auto & frame : index.frames) {
    try {
      DisparityMap disparity;
      if (frame.disparity) {
        disparity = load_disparity(*frame.disparity);
      } else {
        const GrayImage left = load_gray(frame.left);
        const GrayImage right = load_gray(frame.right);
        if (left.width != cam.width || left.height != cam.height) {
          throw Error(ErrorCode::DimensionMismatch, frame.left.string() + " does not match camera");
        }
        disparity = compute_disparity(left, right, config.matching);
      }

      if (config.method == Method::Cnn) {
        const LabelImage labels =
          load_label_image(*frame.labels, config.palette, cam.width, cam.height);
        const PointCloud cloud = build_cloud(disparity, cam, &labels, config.min_disparity);
        result.grid.insert_labeled_cloud(cloud, frame.pose);
      } else {
        const PointCloud cloud = build_cloud(disparity, cam, nullptr, config.min_disparity);
        baseline_pipeline(cloud, frame.pose, result.grid, config.mlesac, config.classifier);
      }
      ++result.frames_processed;
    } catch (const Error & e) {
      log << "warning: frame " << frame.stem << " skipped: " << e.what() << '\n';
      ++result.frames_skipped;
      ++result.warnings;
    }
  }

  result.map = extract_semantic_map(result.grid);
  KeyValueConfig manifest = config.to_config();

  const fs::path ply = config.output / "map.ply";
  const fs::path csv = config.output / "grid.csv";
  write_semantic_map_ply(ply, result.grid, result.map, config.palette);
  write_grid_csv(csv, result.grid);
  manifest.add("artifact", fs::absolute(ply).string());
  manifest.add("artifact", fs::absolute(csv).string());

  if (index.ground_truth_raster) {
    const ClassRaster truth =
      load_class_raster(*index.ground_truth_raster, *index.ground_truth_georef, config.palette);
    if (result.map.empty()) {
      log << "warning: semantic map is empty; predicted raster is all unobserved\n";
      ++result.warnings;
    }
    ClassRaster predicted =
      collapse_to_2d(result.map, config.fusion.voxel_size_m, truth.geometry);
    const fs::path raster = config.output / "predicted_raster.png";
    save_class_raster(raster, predicted, config.palette);
    manifest.add("artifact", fs::absolute(raster).string());
    try {
      const ConfusionMatrix cm = compute_confusion(predicted, truth, observed_mask(predicted, truth));
      const MetricsReport report = metrics(cm, to_string(config.method), config.dataset_name);
      const fs::path metrics_path = config.output / "metrics.csv";
      write_metrics_csv(metrics_path, {report});
      manifest.add("artifact", fs::absolute(metrics_path).string());
      manifest.set("metrics", fs::absolute(metrics_path).string());
      result.metrics = report;
    } catch (const Error & e) {
      if (e.code() != ErrorCode::EmptyEvaluation) {
        throw;
      }
      log << "warning: " << e.what() << '\n';
      ++result.warnings;
    }
    result.predicted = std::move(predicted);
  }

  manifest.set("frames_processed", std::to_string(result.frames_processed));
  manifest.set("frames_skipped", std::to_string(result.frames_skipped));
  result.manifest = config.output / "run_manifest.cfg";
  manifest.save(result.manifest);
  return result;
}

std::string compare(const fs::path & manifest_a, const fs::path & manifest_b)
{
  std::vector<MetricsReport> rows;
  std::string dataset;
  std::string dataset_name;
  for (const auto & path : {manifest_a, manifest_b}) {
    const KeyValueConfig m = KeyValueConfig::load(path);
    const std::string ds = m.get_string("dataset");
    const std::string name = m.get_string("dataset_name", ds);
    if (dataset.empty()) {
      dataset = ds;
      dataset_name = name;
    } else if (ds != dataset || name != dataset_name) {
      throw Error(
        ErrorCode::MismatchedDatasets, "runs use different datasets: '" + dataset + "' vs '" + ds +
                                         "'");
    }
    const auto metrics_path = m.find("metrics");
    if (!metrics_path) {
      throw Error(ErrorCode::DatasetIncomplete, path.string() + " has no metrics (no ground truth?)");
    }
    for (auto & r : read_metrics_csv(*metrics_path)) {
      rows.push_back(std::move(r));
    }
  }
  return format_metrics_table(rows);
}

}  // namespace semmap
