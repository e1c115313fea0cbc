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

#ifndef SEMMAP_CONFIG_HPP_
#define SEMMAP_CONFIG_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace semmap
{

/// Plain-text `key = value` configuration. Lines starting with '#' are
/// comments. Keys may repeat; repeated keys form a list in file order.
class KeyValueConfig
{
public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(const std::string & text, const std::string & source = "<string>");
  static KeyValueConfig load(const std::filesystem::path & path);

  bool has(const std::string & key) const;

  /// Last value for key, if any.
  std::optional<std::string> find(const std::string & key) const;
  std::vector<std::string> all(const std::string & key) const;

  std::string get_string(const std::string & key) const;
  std::string get_string(const std::string & key, const std::string & fallback) const;
  double get_double(const std::string & key) const;
  double get_double(const std::string & key, double fallback) const;
  long long get_int(const std::string & key) const;
  long long get_int(const std::string & key, long long fallback) const;
  bool get_bool(const std::string & key, bool fallback) const;

  void set(const std::string & key, const std::string & value);
  void add(const std::string & key, const std::string & value);

  const std::vector<std::pair<std::string, std::string>> & entries() const { return entries_; }

  std::string to_string() const;
  void save(const std::filesystem::path & path) const;

private:
  std::string source_{"<config>"};
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest decimal text that round-trips a double exactly.
std::string format_double(double value);

std::vector<std::string> split_whitespace(const std::string & text);
std::string trim(const std::string & text);

double parse_double(const std::string & text, const std::string & context);
long long parse_int(const std::string & text, const std::string & context);

}  // namespace semmap

#endif  // SEMMAP_CONFIG_HPP_
