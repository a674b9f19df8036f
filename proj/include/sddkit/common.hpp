/* Copyright 2026 The sddkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Shared value types, error types and small formatting helpers.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace sddkit {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
// z-component of the 3D cross product of two planar vectors.
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

// Union of the SDD and inD agent classes.
enum class AgentClass { kPedestrian, kBiker, kSkater, kCart, kCar, kBus, kTruckBus };

inline constexpr std::array<AgentClass, 7> kAllClasses = {
    AgentClass::kPedestrian, AgentClass::kBiker, AgentClass::kSkater,
    AgentClass::kCart,       AgentClass::kCar,   AgentClass::kBus,
    AgentClass::kTruckBus};

inline std::string_view to_string(AgentClass c) {
  switch (c) {
    case AgentClass::kPedestrian: return "Pedestrian";
    case AgentClass::kBiker: return "Biker";
    case AgentClass::kSkater: return "Skater";
    case AgentClass::kCart: return "Cart";
    case AgentClass::kCar: return "Car";
    case AgentClass::kBus: return "Bus";
    case AgentClass::kTruckBus: return "TruckBus";
  }
  return "Unknown";
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && to_lower(a) == to_lower(b);
}

// Accepts the canonical names case-insensitively.
inline std::optional<AgentClass> parse_agent_class(std::string_view s) {
  for (AgentClass c : kAllClasses) {
    if (iequals(s, to_string(c))) return c;
  }
  return std::nullopt;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. line() is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

  // Same error with the file name prepended to the message.
  ParseError in_file(const std::string& file) const { return ParseError(file + ": " + what(), line_, 0); }

 private:
  ParseError(const std::string& full, std::size_t line, int) : Error(full), line_(line) {}
  std::size_t line_;
};

// Well-formed input that violates a structural contract (duplicates, gaps...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Non-fatal findings collected while parsing or processing.
struct Diagnostics {
  std::vector<std::string> messages;

  void warn(std::string msg) { messages.push_back(std::move(msg)); }
  bool empty() const { return messages.empty(); }
};

inline void warn(Diagnostics* diag, std::string msg) {
  if (diag) diag->warn(std::move(msg));
}

// Fixed-point formatting used by every report and export.
inline std::string fixed(double v, int decimals) {
  if (v == 0.0) v = 0.0;  // fold -0.0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) return std::nullopt;
  }
  return value;
}

}  // namespace sddkit
