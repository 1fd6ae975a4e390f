// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "posepilot/pose_frame.hpp"
#include "posepilot/pose_ingest.hpp"

namespace posepilot {

class DegenerateVector : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Straight down in image coordinates; arms hanging at rest measure near 0 deg.
inline constexpr Vec2 kReferenceDown{0.0, 1.0};

inline constexpr double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

// Unsigned angle between v and r in degrees, from the normalized dot product.
inline double angle_between(Vec2 v, Vec2 r) {
  const double nv = norm(v);
  const double nr = norm(r);
  if (nv == 0.0 || nr == 0.0) throw DegenerateVector("angle_between: zero-length vector");
  const double c = std::clamp(dot(v, r) / (nv * nr), -1.0, 1.0);
  return rad_to_deg(std::acos(c));
}

struct GestureFeatures {
  double alpha1 = 0.0;  // right arm vs. reference, degrees
  double alpha2 = 0.0;  // left arm vs. reference, degrees
  double s1 = 0.0;      // nose-to-right-wrist / shoulder width
  double s2 = 0.0;      // nose-to-left-wrist / shoulder width
  double sr_pixels = 0.0;
};

// Arm vectors are anchored at the neck; distances are normalized by the
// shoulder width so the features do not depend on the user's image scale.
inline GestureFeatures extract_features(const ValidatedFrame& vf) {
  const auto& j = vf.joints();
  const Vec2 neck = vf.at(j.neck);
  const Vec2 nose = vf.at(j.nose);
  const Vec2 right_wrist = vf.at(j.right_wrist);
  const Vec2 left_wrist = vf.at(j.left_wrist);

  const Vec2 right_arm = right_wrist - neck;
  const Vec2 left_arm = left_wrist - neck;
  if (right_arm == Vec2{}) throw DegenerateVector("right wrist coincides with neck");
  if (left_arm == Vec2{}) throw DegenerateVector("left wrist coincides with neck");

  GestureFeatures f;
  f.alpha1 = angle_between(right_arm, kReferenceDown);
  f.alpha2 = angle_between(left_arm, kReferenceDown);
  f.sr_pixels = distance(vf.at(j.right_shoulder), vf.at(j.left_shoulder));
  f.s1 = distance(nose, right_wrist) / f.sr_pixels;
  f.s2 = distance(nose, left_wrist) / f.sr_pixels;
  return f;
}

}  // namespace posepilot
