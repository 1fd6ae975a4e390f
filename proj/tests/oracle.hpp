// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

// Test-only reference implementations. Nothing here calls into the code
// paths it is used to check.
#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace posepilot::oracle {

// Unsigned angle from atan2(|cross|, dot), degrees.
inline double angle_deg(double vx, double vy, double rx, double ry) {
  const double cross = vx * ry - vy * rx;
  const double d = vx * rx + vy * ry;
  return std::atan2(std::abs(cross), d) * 180.0 / std::numbers::pi;
}

// Literal transcription of the gesture table, evaluated row by row.
struct Row {
  std::string_view name;
  bool has_a1;
  double a1_lo, a1_hi;
  bool has_a2;
  double a2_lo, a2_hi;
  bool a2_closed;
  int s1;  // -1: s1 < 1, +1: s1 > 1, 0: unconstrained
  int s2;
};

inline const std::vector<Row>& table_rows() {
  static const std::vector<Row> rows = {
      {"snapshot", false, 0, 0, false, 0, 0, false, -1, -1},
      {"backward", true, 0, 40, false, 0, 0, false, 0, -1},
      {"forward", false, 0, 0, true, 0, 40, false, -1, 0},
      {"left", true, 0, 40, true, 70, 100, false, +1, 0},
      {"right", true, 70, 100, true, 0, 40, false, 0, +1},
      {"up", true, 80, 180, true, 80, 180, true, +1, +1},
      {"down", true, 40, 80, true, 40, 80, false, +1, +1},
      {"turn_cw", true, 40, 85, true, 85, 180, false, +1, +1},
      {"turn_ccw", true, 85, 180, true, 40, 85, false, +1, +1},
      {"wait", true, 0, 40, true, 0, 40, false, +1, +1},
  };
  return rows;
}

inline bool row_matches(const Row& r, double a1, double a2, double s1, double s2) {
  if (r.has_a1 && !(a1 >= r.a1_lo && a1 < r.a1_hi)) return false;
  if (r.has_a2 && !(a2 >= r.a2_lo && (r.a2_closed ? a2 <= r.a2_hi : a2 < r.a2_hi))) return false;
  if (r.s1 < 0 && !(s1 < 1)) return false;
  if (r.s1 > 0 && !(s1 > 1)) return false;
  if (r.s2 < 0 && !(s2 < 1)) return false;
  if (r.s2 > 0 && !(s2 > 1)) return false;
  return true;
}

// Every row that fires, in table order.
inline std::vector<std::string_view> all_matches(double a1, double a2, double s1, double s2) {
  std::vector<std::string_view> out;
  for (const auto& r : table_rows()) {
    if (row_matches(r, a1, a2, s1, s2)) out.push_back(r.name);
  }
  return out;
}

inline std::optional<std::string_view> first_match(double a1, double a2, double s1, double s2) {
  const auto m = all_matches(a1, a2, s1, s2);
  if (m.empty()) return std::nullopt;
  return m.front();
}

}  // namespace posepilot::oracle
