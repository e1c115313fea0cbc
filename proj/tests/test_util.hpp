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

#ifndef SEMMAP_TESTS_TEST_UTIL_HPP_
#define SEMMAP_TESTS_TEST_UTIL_HPP_

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "semmap/error.hpp"

namespace semmap::testing
{

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir
{
public:
  TempDir()
  {
    const auto * info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = "semmap_";
    if (info) {
      name += std::string(info->test_suite_name()) + "_" + info->name();
    }
    std::random_device rd;
    name += "_" + std::to_string(rd());
    path_ = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir()
  {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir & operator=(const TempDir &) = delete;

  const std::filesystem::path & path() const { return path_; }
  std::filesystem::path operator/(const std::string & name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace semmap::testing

/// Asserts that `statement` throws semmap::Error with the given code.
#define EXPECT_SEMMAP_ERROR(statement, error_code)                           \
  do {                                                                       \
    try {                                                                    \
      statement;                                                             \
      ADD_FAILURE() << "expected " #error_code;                              \
    } catch (const ::semmap::Error & e) {                                    \
      EXPECT_EQ(e.code(), ::semmap::ErrorCode::error_code) << e.what();      \
    }                                                                        \
  } while (false)

#endif  // SEMMAP_TESTS_TEST_UTIL_HPP_
