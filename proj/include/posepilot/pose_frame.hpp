// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <variant>

namespace posepilot {

// 2D vector in image pixels (origin top-left, y grows downward).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator*(double k, Vec2 v) { return {k * v.x, k * v.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;  // 0 means undetected; x/y are then meaningless

  Vec2 position() const { return {x, y}; }
  bool detected() const { return confidence > 0.0; }
  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

inline constexpr std::size_t kNumKeypoints = 18;

// COCO-18 joint indices as exported by the pose estimator.
enum class Joint : std::uint8_t {
  Nose = 0,
  Neck = 1,
  RightShoulder = 2,
  RightElbow = 3,
  RightWrist = 4,
  LeftShoulder = 5,
  LeftElbow = 6,
  LeftWrist = 7,
  RightHip = 8,
  RightKnee = 9,
  RightAnkle = 10,
  LeftHip = 11,
  LeftKnee = 12,
  LeftAnkle = 13,
  RightEye = 14,
  LeftEye = 15,
  RightEar = 16,
  LeftEar = 17,
};

using KeypointArray = std::array<Keypoint, kNumKeypoints>;

// The six keypoints the gesture rules read. Defaults follow the classic
// indexing used by the rule set, where the left-arm point is slot 6; set
// left_wrist to Joint::LeftWrist (7) to measure the true COCO wrist instead.
struct GestureJoints {
  Joint nose = Joint::Nose;
  Joint neck = Joint::Neck;
  Joint right_shoulder = Joint::RightShoulder;
  Joint right_wrist = Joint::RightWrist;
  Joint left_shoulder = Joint::LeftShoulder;
  Joint left_wrist = Joint::LeftElbow;

  std::array<Joint, 6> all() const {
    return {nose, neck, right_shoulder, right_wrist, left_shoulder, left_wrist};
  }
};

struct PoseFrame {
  std::uint64_t seq = 0;
  double timestamp = 0.0;  // seconds, source-relative
  KeypointArray keypoints{};

  const Keypoint& operator[](Joint j) const { return keypoints[static_cast<std::size_t>(j)]; }
  Keypoint& operator[](Joint j) { return keypoints[static_cast<std::size_t>(j)]; }
  friend bool operator==(const PoseFrame&, const PoseFrame&) = default;
};

// The estimator saw nobody in this frame.
struct NoPersonDetected {
  std::uint64_t seq = 0;
  double timestamp = 0.0;
  friend bool operator==(const NoPersonDetected&, const NoPersonDetected&) = default;
};

using FrameRecord = std::variant<PoseFrame, NoPersonDetected>;

inline std::uint64_t seq_of(const FrameRecord& r) {
  return std::visit([](const auto& f) { return f.seq; }, r);
}

inline double time_of(const FrameRecord& r) {
  return std::visit([](const auto& f) { return f.timestamp; }, r);
}

}  // namespace posepilot
