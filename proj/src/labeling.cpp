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

#include "semmap/labeling.hpp"

#include <cmath>
#include <random>

#include "semmap/error.hpp"
#include "semmap/scene_synth.hpp"

namespace semmap
{

std::string_view to_string(Label label)
{
  switch (label) {
    case Label::Sand: return "sand";
    case Label::Rocks: return "rocks";
    case Label::Background: return "background";
  }
  return "unknown";
}

std::optional<Label> label_from_string(std::string_view name)
{
  for (Label l : kAllLabels) {
    if (to_string(l) == name) {
      return l;
    }
  }
  return std::nullopt;
}

Palette::Palette() : Palette(Rgb{255, 228, 132}, Rgb{180, 60, 40}, Rgb{0, 0, 0}) {}

Palette::Palette(Rgb sand, Rgb rocks, Rgb background) : colors_{sand, rocks, background}
{
  if (sand == rocks || sand == background || rocks == background) {
    throw Error(ErrorCode::InvalidArgument, "palette colors must be distinct");
  }
}

namespace
{

Rgb parse_rgb(const std::string & text, const std::string & context)
{
  const auto parts = split_whitespace(text);
  if (parts.size() != 3) {
    throw Error(ErrorCode::ParseError, context + ": expected 'r g b'");
  }
  std::array<std::uint8_t, 3> c{};
  for (std::size_t i = 0; i < 3; ++i) {
    const long long v = parse_int(parts[i], context);
    if (v < 0 || v > 255) {
      throw Error(ErrorCode::ParseError, context + ": channel out of range");
    }
    c[i] = static_cast<std::uint8_t>(v);
  }
  return Rgb{c[0], c[1], c[2]};
}

std::string rgb_text(Rgb c)
{
  return std::to_string(c.r) + " " + std::to_string(c.g) + " " + std::to_string(c.b);
}

// Uniform double in [0, 1) from the top 53 bits.
double unit_uniform(std::mt19937_64 & rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Palette Palette::from_config(const KeyValueConfig & cfg, const std::string & prefix)
{
  const Palette def;
  auto get = [&](const char * name, Label l) {
    auto v = cfg.find(prefix + name);
    return v ? parse_rgb(*v, prefix + name) : def.color(l);
  };
  return Palette(
    get("sand", Label::Sand), get("rocks", Label::Rocks), get("background", Label::Background));
}

void Palette::to_config(KeyValueConfig & cfg, const std::string & prefix) const
{
  for (Label l : kAllLabels) {
    cfg.set(prefix + std::string(to_string(l)), rgb_text(color(l)));
  }
}

std::optional<Label> Palette::decode(Rgb c) const
{
  for (Label l : kAllLabels) {
    if (color(l) == c) {
      return l;
    }
  }
  return std::nullopt;
}

LabelImage decode_label_image(
  const RgbImage & raster, const Palette & palette, std::optional<int> expected_width,
  std::optional<int> expected_height)
{
  if (
    (expected_width && *expected_width != raster.width) ||
    (expected_height && *expected_height != raster.height)) {
    throw Error(
      ErrorCode::DimensionMismatch, "label raster is " + std::to_string(raster.width) + "x" +
                                      std::to_string(raster.height) +
                                      ", camera image size differs");
  }
  LabelImage out(raster.width, raster.height, Label::Background);
  for (int y = 0; y < raster.height; ++y) {
    for (int x = 0; x < raster.width; ++x) {
      const Rgb c = raster.at(x, y);
      const auto l = palette.decode(c);
      if (!l) {
        throw Error(
          ErrorCode::UnknownColor, "color (" + rgb_text(c) + ") at pixel (" + std::to_string(x) +
                                     ", " + std::to_string(y) + ")");
      }
      out.at(x, y) = *l;
    }
  }
  return out;
}

LabelImage load_label_image(
  const std::filesystem::path & path, const Palette & palette, std::optional<int> expected_width,
  std::optional<int> expected_height)
{
  try {
    return decode_label_image(load_rgb(path), palette, expected_width, expected_height);
  } catch (const Error & e) {
    if (e.code() == ErrorCode::UnknownColor || e.code() == ErrorCode::DimensionMismatch) {
      throw Error(e.code(), path.string() + ": " + e.what());
    }
    throw;
  }
}

RgbImage encode_label_image(const LabelImage & labels, const Palette & palette)
{
  RgbImage out(labels.width, labels.height);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out.data[i] = palette.color(labels.data[i]);
  }
  return out;
}

void save_label_image(
  const std::filesystem::path & path, const LabelImage & labels, const Palette & palette)
{
  save_rgb(path, encode_label_image(labels, palette));
}

Label label_at(const LabelImage & img, double u, double v)
{
  const double ru = std::round(u);
  const double rv = std::round(v);
  if (!(ru >= 0.0 && rv >= 0.0 && ru < img.width && rv < img.height)) {
    throw Error(
      ErrorCode::OutOfBounds, "label lookup at (" + format_double(u) + ", " + format_double(v) +
                                ")");
  }
  return img.at(static_cast<int>(ru), static_cast<int>(rv));
}

LabelImage corrupt_labels(const LabelImage & clean, const LabelCorruption & corruption)
{
  if (corruption.dilate_rocks_px < 0 || !(corruption.flip_fraction >= 0.0) ||
      !(corruption.flip_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid label corruption parameters");
  }
  LabelImage out = clean;
  const int k = corruption.dilate_rocks_px;
  if (k > 0) {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < clean.height; ++y) {
      for (int x = 0; x < clean.width; ++x) {
        if (clean.at(x, y) == Label::Rocks) {
          continue;
        }
        bool near_rock = false;
        for (int dy = -k; dy <= k && !near_rock; ++dy) {
          for (int dx = -k; dx <= k; ++dx) {
            if (dx * dx + dy * dy <= k * k && clean.contains(x + dx, y + dy) &&
                clean.at(x + dx, y + dy) == Label::Rocks) {
              near_rock = true;
              break;
            }
          }
        }
        if (near_rock) {
          out.at(x, y) = Label::Rocks;
        }
      }
    }
  }
  if (corruption.flip_fraction > 0.0) {
    std::mt19937_64 rng(corruption.seed);
    for (auto & l : out.data) {
      const bool flip = unit_uniform(rng) < corruption.flip_fraction;
      const bool second = unit_uniform(rng) < 0.5;
      if (flip) {
        const auto code = static_cast<std::uint8_t>(l);
        l = static_cast<Label>((code + (second ? 2 : 1)) % 3);
      }
    }
  }
  return out;
}

LabelImage oracle_labeler(
  const SyntheticScene & scene, std::size_t pose_index, const LabelCorruption & corruption)
{
  return corrupt_labels(render_labels(scene, pose_index), corruption);
}

}  // namespace semmap
