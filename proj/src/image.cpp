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

#include "semmap/image.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "semmap/error.hpp"

namespace semmap
{
namespace
{

cv::Mat read_or_throw(const std::filesystem::path & path, int flags)
{
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::IoError, "no such file: " + path.string());
  }
  cv::Mat m = cv::imread(path.string(), flags);
  if (m.empty()) {
    throw Error(ErrorCode::IoError, "cannot decode image: " + path.string());
  }
  return m;
}

void write_or_throw(const std::filesystem::path & path, const cv::Mat & m)
{
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m);
  } catch (const cv::Exception & e) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
}

double channel_scale(int depth)
{
  switch (depth) {
    case CV_8U: return 1.0 / 255.0;
    case CV_16U: return 1.0 / 65535.0;
    default:
      throw Error(ErrorCode::IoError, "unsupported image bit depth");
  }
}

double channel_value(const cv::Mat & m, int y, int x, int c)
{
  const int channels = m.channels();
  if (m.depth() == CV_8U) {
    return m.ptr<std::uint8_t>(y)[x * channels + c];
  }
  return m.ptr<std::uint16_t>(y)[x * channels + c];
}

}  // namespace

GrayImage load_gray(const std::filesystem::path & path)
{
  const cv::Mat m = read_or_throw(path, cv::IMREAD_UNCHANGED);
  const double scale = channel_scale(m.depth());
  const int channels = m.channels();
  GrayImage img(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) {
      double value = 0.0;
      if (channels == 1 || channels == 2) {
        value = channel_value(m, y, x, 0);
      } else {
        // OpenCV stores BGR(A).
        value = 0.299 * channel_value(m, y, x, 2) + 0.587 * channel_value(m, y, x, 1) +
                0.114 * channel_value(m, y, x, 0);
      }
      img.at(x, y) = static_cast<float>(std::clamp(value * scale, 0.0, 1.0));
    }
  }
  return img;
}

void save_gray(const std::filesystem::path & path, const GrayImage & img)
{
  cv::Mat m(img.height, img.width, CV_8UC1);
  for (int y = 0; y < img.height; ++y) {
    auto * row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width; ++x) {
      const double v = std::clamp(static_cast<double>(img.at(x, y)), 0.0, 1.0);
      row[x] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  write_or_throw(path, m);
}

RgbImage load_rgb(const std::filesystem::path & path)
{
  const cv::Mat m = read_or_throw(path, cv::IMREAD_COLOR);
  if (m.depth() != CV_8U) {
    throw Error(ErrorCode::IoError, "expected 8-bit color raster: " + path.string());
  }
  RgbImage img(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    const auto * row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < m.cols; ++x) {
      img.at(x, y) = Rgb{row[x][2], row[x][1], row[x][0]};
    }
  }
  return img;
}

void save_rgb(const std::filesystem::path & path, const RgbImage & img)
{
  cv::Mat m(img.height, img.width, CV_8UC3);
  for (int y = 0; y < img.height; ++y) {
    auto * row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width; ++x) {
      const Rgb & c = img.at(x, y);
      row[x] = cv::Vec3b(c.b, c.g, c.r);
    }
  }
  write_or_throw(path, m);
}

Image<std::uint16_t> load_u16(const std::filesystem::path & path)
{
  const cv::Mat m = read_or_throw(path, cv::IMREAD_UNCHANGED);
  if (m.depth() != CV_16U || m.channels() != 1) {
    throw Error(ErrorCode::IoError, "expected single-channel 16-bit raster: " + path.string());
  }
  Image<std::uint16_t> img(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    std::copy_n(m.ptr<std::uint16_t>(y), m.cols, &img.at(0, y));
  }
  return img;
}

void save_u16(const std::filesystem::path & path, const Image<std::uint16_t> & img)
{
  cv::Mat m(img.height, img.width, CV_16UC1);
  for (int y = 0; y < img.height; ++y) {
    std::copy_n(&img.at(0, y), img.width, m.ptr<std::uint16_t>(y));
  }
  write_or_throw(path, m);
}

}  // namespace semmap
