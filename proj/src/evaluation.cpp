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

#include "semmap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "semmap/error.hpp"

namespace semmap
{

void RasterGeometry::validate() const
{
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "raster dimensions must be positive");
  }
  if (!(cell_size_m > 0.0) || !std::isfinite(cell_size_m)) {
    throw Error(ErrorCode::InvalidArgument, "cell_size_m must be positive");
  }
  if (!std::isfinite(origin_x) || !std::isfinite(origin_y) || !std::isfinite(rotation)) {
    throw Error(ErrorCode::InvalidArgument, "raster georeference is not finite");
  }
}

Eigen::Vector2d RasterGeometry::to_local(const Eigen::Vector2d & world) const
{
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  const Eigen::Vector2d d = world - Eigen::Vector2d(origin_x, origin_y);
  return {c * d.x() + s * d.y(), -s * d.x() + c * d.y()};
}

Eigen::Vector2d RasterGeometry::to_world(const Eigen::Vector2d & local) const
{
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  return {origin_x + c * local.x() - s * local.y(), origin_y + s * local.x() + c * local.y()};
}

std::optional<std::pair<int, int>> RasterGeometry::cell_of(const Eigen::Vector2d & world) const
{
  const Eigen::Vector2d local = to_local(world);
  const double col = std::floor(local.x() / cell_size_m);
  const double row = std::floor(local.y() / cell_size_m);
  if (!(col >= 0.0 && row >= 0.0 && col < width && row < height)) {
    return std::nullopt;
  }
  return std::make_pair(static_cast<int>(col), static_cast<int>(row));
}

RasterGeometry load_georeference(const std::filesystem::path & path, int width, int height)
{
  const KeyValueConfig cfg = KeyValueConfig::load(path);
  RasterGeometry g;
  g.width = width;
  g.height = height;
  g.origin_x = cfg.get_double("origin_x");
  g.origin_y = cfg.get_double("origin_y");
  g.cell_size_m = cfg.get_double("cell_size_m");
  g.rotation = cfg.get_double("rotation", 0.0);
  g.validate();
  return g;
}

void save_georeference(const std::filesystem::path & path, const RasterGeometry & geometry)
{
  KeyValueConfig cfg;
  cfg.set("origin_x", format_double(geometry.origin_x));
  cfg.set("origin_y", format_double(geometry.origin_y));
  cfg.set("cell_size_m", format_double(geometry.cell_size_m));
  cfg.set("rotation", format_double(geometry.rotation));
  cfg.save(path);
}

ClassRaster load_class_raster(
  const std::filesystem::path & raster_path, const std::filesystem::path & georef_path,
  const Palette & palette)
{
  const LabelImage labels = load_label_image(raster_path, palette);
  ClassRaster out(load_georeference(georef_path, labels.width, labels.height));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (labels.data[i]) {
      case Label::Rocks: out.cells.data[i] = RasterCell::Rock; break;
      case Label::Sand: out.cells.data[i] = RasterCell::NotRock; break;
      case Label::Background: out.cells.data[i] = RasterCell::Unobserved; break;
    }
  }
  return out;
}

void save_class_raster(
  const std::filesystem::path & raster_path, const ClassRaster & raster, const Palette & palette)
{
  LabelImage labels(raster.cells.width, raster.cells.height);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (raster.cells.data[i]) {
      case RasterCell::Rock: labels.data[i] = Label::Rocks; break;
      case RasterCell::NotRock: labels.data[i] = Label::Sand; break;
      case RasterCell::Unobserved: labels.data[i] = Label::Background; break;
    }
  }
  save_label_image(raster_path, labels, palette);
}

ClassRaster collapse_to_2d(
  const std::vector<SemanticVoxel> & map, double voxel_size_m, const RasterGeometry & geometry)
{
  geometry.validate();
  ClassRaster out(geometry, RasterCell::Unobserved);
  for (const auto & v : map) {
    const Eigen::Vector2d center(
      (v.index.ix + 0.5) * voxel_size_m, (v.index.iy + 0.5) * voxel_size_m);
    const auto cell = geometry.cell_of(center);
    if (!cell) {
      continue;
    }
    RasterCell & c = out.cells.at(cell->first, cell->second);
    if (v.label == Label::Rocks) {
      c = RasterCell::Rock;
    } else if (c == RasterCell::Unobserved) {
      c = RasterCell::NotRock;
    }
  }
  return out;
}

Image<std::uint8_t> observed_mask(const ClassRaster & predicted, const ClassRaster & truth)
{
  if (!(predicted.geometry == truth.geometry)) {
    throw Error(ErrorCode::GeometryMismatch, "predicted and ground-truth rasters differ");
  }
  Image<std::uint8_t> mask(predicted.cells.width, predicted.cells.height, 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask.data[i] = predicted.cells.data[i] != RasterCell::Unobserved &&
                   truth.cells.data[i] != RasterCell::Unobserved;
  }
  return mask;
}

ConfusionMatrix compute_confusion(
  const ClassRaster & predicted, const ClassRaster & truth, const Image<std::uint8_t> & mask)
{
  if (!(predicted.geometry == truth.geometry)) {
    throw Error(ErrorCode::GeometryMismatch, "predicted and ground-truth rasters differ");
  }
  if (
    predicted.cells.width != truth.cells.width || predicted.cells.height != truth.cells.height ||
    mask.width != truth.cells.width || mask.height != truth.cells.height) {
    throw Error(ErrorCode::GeometryMismatch, "raster or mask dimensions differ");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask.data[i]) {
      continue;
    }
    const RasterCell p = predicted.cells.data[i];
    const RasterCell t = truth.cells.data[i];
    if (p == RasterCell::Unobserved || t == RasterCell::Unobserved) {
      throw Error(ErrorCode::InvalidArgument, "evaluation mask selects an unobserved cell");
    }
    const bool pred_rock = p == RasterCell::Rock;
    const bool true_rock = t == RasterCell::Rock;
    if (pred_rock && true_rock) {
      ++cm.tp;
    } else if (!pred_rock && !true_rock) {
      ++cm.tn;
    } else if (pred_rock) {
      ++cm.fp;
    } else {
      ++cm.fn;
    }
  }
  return cm;
}

MetricsReport metrics(
  const ConfusionMatrix & confusion, const std::string & method, const std::string & dataset)
{
  const std::uint64_t total = confusion.total();
  if (total == 0) {
    throw Error(ErrorCode::EmptyEvaluation, "no evaluated cells");
  }
  MetricsReport r;
  r.confusion = confusion;
  r.method = method;
  r.dataset = dataset;
  r.accuracy = static_cast<double>(confusion.tp + confusion.tn) / static_cast<double>(total);
  const std::uint64_t union_count = confusion.tp + confusion.fp + confusion.fn;
  r.iou = union_count == 0 ? 1.0
                           : static_cast<double>(confusion.tp) / static_cast<double>(union_count);
  return r;
}

void write_metrics_csv(const std::filesystem::path & path, const std::vector<MetricsReport> & rows)
{
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << "method,dataset,accuracy,iou,tp,tn,fp,fn\n";
  for (const auto & r : rows) {
    out << r.method << ',' << r.dataset << ',' << format_double(r.accuracy) << ','
        << format_double(r.iou) << ',' << r.confusion.tp << ',' << r.confusion.tn << ','
        << r.confusion.fp << ',' << r.confusion.fn << '\n';
  }
}

std::vector<MetricsReport> read_metrics_csv(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::vector<MetricsReport> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || (line_no == 1 && line.rfind("method,", 0) == 0)) {
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      f.push_back(trim(field));
    }
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (f.size() != 8) {
      throw Error(ErrorCode::ParseError, where + ": expected 8 fields");
    }
    ConfusionMatrix cm;
    cm.tp = static_cast<std::uint64_t>(parse_int(f[4], where));
    cm.tn = static_cast<std::uint64_t>(parse_int(f[5], where));
    cm.fp = static_cast<std::uint64_t>(parse_int(f[6], where));
    cm.fn = static_cast<std::uint64_t>(parse_int(f[7], where));
    MetricsReport r = metrics(cm, f[0], f[1]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_metrics_table(const std::vector<MetricsReport> & rows)
{
  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  for (const auto & r : rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) {
      datasets.push_back(r.dataset);
    }
  }
  std::size_t method_w = 6;
  for (const auto & m : methods) {
    method_w = std::max(method_w, m.size());
  }
  constexpr std::size_t kCol = 10;
  std::size_t pair_w = 2 * kCol + 1;
  for (const auto & d : datasets) {
    pair_w = std::max(pair_w, d.size() + 2);
  }
  const std::size_t metric_w = (pair_w - 1) / 2;

  auto pad = [](const std::string & s, std::size_t w) {
    const std::size_t total = w > s.size() ? w - s.size() : 0;
    return std::string(total / 2, ' ') + s + std::string(total - total / 2, ' ');
  };
  auto rule = [&] {
    std::string s = "+" + std::string(method_w + 2, '-');
    for (std::size_t i = 0; i < datasets.size(); ++i) {
      s += "+" + std::string(metric_w, '-') + "+" +
           std::string(pair_w - 1 - metric_w, '-');
    }
    return s + "+\n";
  };

  std::ostringstream out;
  out << rule();
  out << "| " << std::string(method_w, ' ') << ' ';
  for (const auto & d : datasets) {
    out << '|' << pad(d, pair_w);
  }
  out << "|\n";
  out << "| " << std::string(method_w, ' ') << ' ';
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    out << '|' << pad("Accuracy", metric_w) << '|' << pad("IoU", pair_w - 1 - metric_w);
  }
  out << "|\n" << rule();
  for (const auto & m : methods) {
    out << "| " << m << std::string(method_w - m.size(), ' ') << ' ';
    for (const auto & d : datasets) {
      auto it = std::find_if(rows.begin(), rows.end(), [&](const MetricsReport & r) {
        return r.method == m && r.dataset == d;
      });
      std::string acc = "-";
      std::string iou = "-";
      if (it != rows.end()) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", it->accuracy);
        acc = buf;
        std::snprintf(buf, sizeof(buf), "%.2f", it->iou);
        iou = buf;
      }
      out << '|' << pad(acc, metric_w) << '|' << pad(iou, pair_w - 1 - metric_w);
    }
    out << "|\n";
  }
  out << rule();
  return out.str();
}

}  // namespace semmap
