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

#include "semmap/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "semmap/error.hpp"

namespace semmap
{

std::string trim(const std::string & text)
{
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split_whitespace(const std::string & text)
{
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string token;
  while (in >> token) {
    out.push_back(token);
  }
  return out;
}

double parse_double(const std::string & text, const std::string & context)
{
  const std::string t = trim(text);
  double value = 0.0;
  const auto * end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw Error(ErrorCode::ParseError, context + ": not a number: '" + text + "'");
  }
  return value;
}

long long parse_int(const std::string & text, const std::string & context)
{
  const std::string t = trim(text);
  long long value = 0;
  const auto * end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw Error(ErrorCode::ParseError, context + ": not an integer: '" + text + "'");
  }
  return value;
}

std::string format_double(double value)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    return "nan";
  }
  return std::string(buf, ptr);
}

KeyValueConfig KeyValueConfig::parse(const std::string & text, const std::string & source)
{
  KeyValueConfig cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') {
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(
        ErrorCode::ParseError,
        source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(t.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": empty key");
    }
    cfg.entries_.emplace_back(std::move(key), trim(t.substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

bool KeyValueConfig::has(const std::string & key) const { return find(key).has_value(); }

std::optional<std::string> KeyValueConfig::find(const std::string & key) const
{
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->first == key) {
      return it->second;
    }
  }
  return std::nullopt;
}

std::vector<std::string> KeyValueConfig::all(const std::string & key) const
{
  std::vector<std::string> out;
  for (const auto & [k, v] : entries_) {
    if (k == key) {
      out.push_back(v);
    }
  }
  return out;
}

std::string KeyValueConfig::get_string(const std::string & key) const
{
  auto v = find(key);
  if (!v) {
    throw Error(ErrorCode::ConfigInvalid, source_ + ": missing key '" + key + "'");
  }
  return *v;
}

std::string KeyValueConfig::get_string(const std::string & key, const std::string & fallback) const
{
  return find(key).value_or(fallback);
}

double KeyValueConfig::get_double(const std::string & key) const
{
  return parse_double(get_string(key), source_ + ": " + key);
}

double KeyValueConfig::get_double(const std::string & key, double fallback) const
{
  auto v = find(key);
  return v ? parse_double(*v, source_ + ": " + key) : fallback;
}

long long KeyValueConfig::get_int(const std::string & key) const
{
  return parse_int(get_string(key), source_ + ": " + key);
}

long long KeyValueConfig::get_int(const std::string & key, long long fallback) const
{
  auto v = find(key);
  return v ? parse_int(*v, source_ + ": " + key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string & key, bool fallback) const
{
  auto v = find(key);
  if (!v) {
    return fallback;
  }
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    return true;
  }
  if (s == "false" || s == "0" || s == "no" || s == "off") {
    return false;
  }
  throw Error(ErrorCode::ParseError, source_ + ": " + key + ": not a boolean: '" + *v + "'");
}

void KeyValueConfig::set(const std::string & key, const std::string & value)
{
  std::erase_if(entries_, [&](const auto & e) { return e.first == key; });
  entries_.emplace_back(key, value);
}

void KeyValueConfig::add(const std::string & key, const std::string & value)
{
  entries_.emplace_back(key, value);
}

std::string KeyValueConfig::to_string() const
{
  std::ostringstream out;
  for (const auto & [k, v] : entries_) {
    out << k << " = " << v << '\n';
  }
  return out.str();
}

void KeyValueConfig::save(const std::filesystem::path & path) const
{
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << to_string();
}

}  // namespace semmap
