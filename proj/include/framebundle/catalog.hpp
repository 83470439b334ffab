// SPDX-License-Identifier: Apache-2.0
#pragma once

// Builtin ambient spaces and submanifolds.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "framebundle/submanifold.hpp"

namespace fb {

struct BuiltinInfo {
  std::string name;
  std::string description;
  bool takes_kappa = false;
};

inline const std::vector<BuiltinInfo>& builtin_list() {
  static const std::vector<BuiltinInfo> list = {
      {"plane", "(u1, u2, 0) in euclidean R^3", false},
      {"circle", "(cos u1, sin u1) in euclidean R^2", false},
      {"sphere2", "unit sphere (sin u1 cos u2, sin u1 sin u2, cos u1) in euclidean R^3", false},
      {"catenoid", "(cosh u1 cos u2, cosh u1 sin u2, u1) in euclidean R^3", false},
      {"great2", "totally geodesic 2-plane through the origin of the stereographic chart of S^3(1/sqrt(kappa))",
       true},
      {"great3", "totally geodesic 3-plane through the origin of the stereographic chart of S^4(1/sqrt(kappa))",
       true},
      {"clifford", "stereographic image of the Clifford torus in S^3(1)", false},
  };
  return list;
}

inline constexpr double kDefaultKappa = 0.5;

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

/// Builtin submanifold by (case-insensitive) name; `kappa` only affects the
/// great-sphere families.
inline ImmersedSubmanifold builtin_submanifold(const std::string& raw_name, double kappa = kDefaultKappa) {
  const std::string name = lowercase(raw_name);
  using B = ChartBox;
  if (name == "plane")
    return {AmbientSpace::euclidean(3), {"u1", "u2", "0"}, B{{{-1, 1}, {-1, 1}}}, "plane"};
  if (name == "circle") return {AmbientSpace::euclidean(2), {"cos(u1)", "sin(u1)"}, B{{{-1, 1}}}, "circle"};
  if (name == "sphere2") {
    const double c = std::numbers::pi / 2;
    return {AmbientSpace::euclidean(3),
            {"sin(u1)*cos(u2)", "sin(u1)*sin(u2)", "cos(u1)"},
            B{{{c - 0.9, c + 0.9}, {-0.9, 0.9}}},
            "sphere2"};
  }
  if (name == "catenoid")
    return {AmbientSpace::euclidean(3),
            {"cosh(u1)*cos(u2)", "cosh(u1)*sin(u2)", "u1"},
            B{{{-1, 1}, {-0.9, 0.9}}},
            "catenoid"};
  if (name == "great2" || name == "great3") {
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    const double R = 1.0 / std::sqrt(kappa);
    if (name == "great2")
      return {AmbientSpace::sphere_chart(3, R), {"u1", "u2", "0"}, B{{{-1, 1}, {-1, 1}}}, "great2"};
    return {AmbientSpace::sphere_chart(4, R), {"u1", "u2", "u3", "0"}, B{{{-1, 1}, {-1, 1}, {-1, 1}}}, "great3"};
  }
  if (name == "clifford")
    return {AmbientSpace::sphere_chart(3, 1.0),
            {"cos(u1)/(sqrt(2)-sin(u2))", "sin(u1)/(sqrt(2)-sin(u2))", "cos(u2)/(sqrt(2)-sin(u2))"},
            B{{{-1, 1}, {-1, 1}}},
            "clifford"};
  throw std::invalid_argument("unknown builtin '" + raw_name + "'");
}

inline bool is_builtin(const std::string& name) {
  const std::string n = lowercase(name);
  for (const auto& b : builtin_list())
    if (b.name == n) return true;
  return false;
}

/// Parses "euclidean" or "sphere(R)" (dimension supplied separately).
inline std::optional<AmbientSpace> builtin_ambient(const std::string& spec, int dim) {
  std::string s;
  for (char c : spec)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  s = lowercase(s);
  if (s == "euclidean") return AmbientSpace::euclidean(dim);
  if (s.rfind("sphere(", 0) == 0 && s.back() == ')') {
    const std::string arg = s.substr(7, s.size() - 8);
    double R = 0.0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), R);
    if (ec != std::errc() || ptr != arg.data() + arg.size() || !(R > 0.0))
      throw std::invalid_argument("bad sphere radius in '" + spec + "'");
    return AmbientSpace::sphere_chart(dim, R);
  }
  return std::nullopt;
}

}  // namespace fb
