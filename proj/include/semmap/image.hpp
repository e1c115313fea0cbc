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

#ifndef SEMMAP_IMAGE_HPP_
#define SEMMAP_IMAGE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace semmap
{

/// Row-major raster.
template <typename T>
struct Image
{
  int width{0};
  int height{0};
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, T fill = T{})
  : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill)
  {
  }

  std::size_t index(int x, int y) const
  {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
  T & at(int x, int y) { return data[index(x, y)]; }
  const T & at(int x, int y) const { return data[index(x, y)]; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  std::size_t size() const { return data.size(); }

  bool operator==(const Image &) const = default;
};

struct Rgb
{
  std::uint8_t r{0};
  std::uint8_t g{0};
  std::uint8_t b{0};

  auto operator<=>(const Rgb &) const = default;
};

/// Intensities in [0, 1].
using GrayImage = Image<float>;
using RgbImage = Image<Rgb>;

/// 8/16-bit grayscale or RGB(A) PNG/PGM. Color is reduced by 0.299R + 0.587G + 0.114B.
GrayImage load_gray(const std::filesystem::path & path);
/// Quantized to 8 bits.
void save_gray(const std::filesystem::path & path, const GrayImage & img);

/// Gray and palette images are expanded to RGB.
RgbImage load_rgb(const std::filesystem::path & path);
void save_rgb(const std::filesystem::path & path, const RgbImage & img);

Image<std::uint16_t> load_u16(const std::filesystem::path & path);
void save_u16(const std::filesystem::path & path, const Image<std::uint16_t> & img);

}  // namespace semmap

#endif  // SEMMAP_IMAGE_HPP_
