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

#ifndef SEMMAP_LABELING_HPP_
#define SEMMAP_LABELING_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "semmap/config.hpp"
#include "semmap/image.hpp"

namespace semmap
{

enum class Label : std::uint8_t { Sand = 0, Rocks = 1, Background = 2 };

inline constexpr std::array<Label, 3> kAllLabels{Label::Sand, Label::Rocks, Label::Background};

std::string_view to_string(Label label);
std::optional<Label> label_from_string(std::string_view name);

using LabelImage = Image<Label>;

/// Color to label mapping for label rasters.
class Palette
{
public:
  /// sand (255,228,132), rocks (180,60,40), background (0,0,0).
  Palette();
  Palette(Rgb sand, Rgb rocks, Rgb background);

  /// Keys `<prefix>sand`, `<prefix>rocks`, `<prefix>background` as "r g b".
  static Palette from_config(const KeyValueConfig & cfg, const std::string & prefix);
  void to_config(KeyValueConfig & cfg, const std::string & prefix) const;

  Rgb color(Label label) const { return colors_[static_cast<std::size_t>(label)]; }
  std::optional<Label> decode(Rgb color) const;

private:
  std::array<Rgb, 3> colors_;
};

/// Throws UnknownColor naming the first unmapped color and pixel, DimensionMismatch
/// when expected dimensions are given and differ.
LabelImage decode_label_image(
  const RgbImage & raster, const Palette & palette, std::optional<int> expected_width = {},
  std::optional<int> expected_height = {});
LabelImage load_label_image(
  const std::filesystem::path & path, const Palette & palette,
  std::optional<int> expected_width = {}, std::optional<int> expected_height = {});

RgbImage encode_label_image(const LabelImage & labels, const Palette & palette);
void save_label_image(
  const std::filesystem::path & path, const LabelImage & labels, const Palette & palette);

/// Nearest-pixel lookup. Throws OutOfBounds when the rounded pixel is outside the image.
Label label_at(const LabelImage & img, double u, double v);

/// Knobs that emulate an imperfect segmenter.
struct LabelCorruption
{
  int dilate_rocks_px{0};
  double flip_fraction{0.0};
  std::uint64_t seed{0};
};

/// Grows Rocks regions by a disk of the given radius, then flips a fraction of
/// pixels to a uniformly chosen different label.
LabelImage corrupt_labels(const LabelImage & clean, const LabelCorruption & corruption);

struct SyntheticScene;

/// Stand-in for an external segmenter: exact labels rendered from the scene
/// geometry at the given trajectory pose, followed by corrupt_labels.
LabelImage oracle_labeler(
  const SyntheticScene & scene, std::size_t pose_index, const LabelCorruption & corruption = {});

}  // namespace semmap

#endif  // SEMMAP_LABELING_HPP_
