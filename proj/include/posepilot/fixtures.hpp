// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "posepilot/command.hpp"
#include "posepilot/pose_frame.hpp"

namespace posepilot::fixtures {

// Canonical gesture gallery. Every pose shares one upper body (neck at
// (320,200), shoulders 80 px apart, nose 50 px above the neck) and differs
// only in where the two hands are. Each pose satisfies exactly one rule.
struct GesturePose {
  Command command;
  Vec2 right_wrist;
  Vec2 left_wrist;
};

inline constexpr Vec2 kNose{320, 150};
inline constexpr Vec2 kNeck{320, 200};
inline constexpr Vec2 kRightShoulder{280, 200};
inline constexpr Vec2 kLeftShoulder{360, 200};
inline constexpr Vec2 kRightRest{270, 340};
inline constexpr Vec2 kLeftRest{370, 340};
inline constexpr Vec2 kRightNearFace{300, 140};
inline constexpr Vec2 kLeftNearFace{340, 140};
inline constexpr Vec2 kRightLow{180, 280};  // about 60 deg from the body
inline constexpr Vec2 kLeftLow{460, 280};
inline constexpr double kConfidence = 0.9;

inline constexpr std::array<GesturePose, 10> kGallery{{
    {Command::Snapshot, kRightNearFace, kLeftNearFace},
    {Command::Backward, kRightRest, kLeftNearFace},
    {Command::Forward, kRightNearFace, kLeftRest},
    {Command::Left, kRightRest, {480, 200}},
    {Command::Right, {160, 200}, kLeftRest},
    {Command::Up, {260, 80}, {380, 80}},
    {Command::Down, kRightLow, kLeftLow},
    {Command::TurnCW, kRightLow, {420, 100}},
    {Command::TurnCCW, {220, 100}, kLeftLow},
    {Command::Wait, kRightRest, kLeftRest},
}};

inline const GesturePose& pose_for(Command c) {
  for (const auto& p : kGallery) {
    if (p.command == c) return p;
  }
  throw std::invalid_argument("no canonical pose for command");
}

inline KeypointArray skeleton(const GesturePose& pose) {
  KeypointArray k{};
  auto set = [&](Joint j, Vec2 p) { k[static_cast<std::size_t>(j)] = {p.x, p.y, kConfidence}; };
  auto mid = [](Vec2 a, Vec2 b) { return 0.5 * (a + b); };
  set(Joint::Nose, kNose);
  set(Joint::Neck, kNeck);
  set(Joint::RightShoulder, kRightShoulder);
  set(Joint::RightElbow, mid(kRightShoulder, pose.right_wrist));
  set(Joint::RightWrist, pose.right_wrist);
  set(Joint::LeftShoulder, kLeftShoulder);
  // Slot 6 carries the left hand as the gesture rules expect; slot 7 (the
  // COCO left wrist) is kept at the same place.
  set(Joint::LeftElbow, pose.left_wrist);
  set(Joint::LeftWrist, pose.left_wrist);
  set(Joint::RightHip, {295, 330});
  set(Joint::RightKnee, {295, 400});
  set(Joint::RightAnkle, {295, 470});
  set(Joint::LeftHip, {345, 330});
  set(Joint::LeftKnee, {345, 400});
  set(Joint::LeftAnkle, {345, 470});
  set(Joint::RightEye, {310, 140});
  set(Joint::LeftEye, {330, 140});
  set(Joint::RightEar, {300, 145});
  set(Joint::LeftEar, {340, 145});
  return k;
}

inline PoseFrame make_frame(const GesturePose& pose, std::uint64_t seq = 0, double t = 0.0) {
  return {seq, t, skeleton(pose)};
}

// Uniform scale about the image origin followed by a translation.
inline PoseFrame similarity_transform(PoseFrame f, double scale, Vec2 shift) {
  for (auto& kp : f.keypoints) {
    kp.x = scale * kp.x + shift.x;
    kp.y = scale * kp.y + shift.y;
  }
  return f;
}

inline constexpr std::uint32_t kFramesPerGesture = 5;
inline constexpr double kFixtureRate = 30.0;

inline std::vector<FrameRecord> gesture_sequence(Command c, std::uint32_t frames = kFramesPerGesture,
                                                 std::uint64_t first_seq = 1, double rate = kFixtureRate) {
  std::vector<FrameRecord> out;
  out.reserve(frames);
  for (std::uint32_t i = 0; i < frames; ++i) {
    const std::uint64_t seq = first_seq + i;
    out.emplace_back(make_frame(pose_for(c), seq, static_cast<double>(seq - 1) / rate));
  }
  return out;
}

// All ten gestures back to back in rule-table order with continuous seq/t.
inline std::vector<FrameRecord> gallery_corpus(std::uint32_t frames = kFramesPerGesture,
                                               double rate = kFixtureRate) {
  std::vector<FrameRecord> out;
  for (const auto& pose : kGallery) {
    auto part = gesture_sequence(pose.command, frames, out.size() + 1, rate);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// Preset geometry for interactive clients: {"up": [[x,y,c] x 18], ...}.
inline nlohmann::json presets_json() {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& pose : kGallery) {
    auto arr = nlohmann::json::array();
    for (const auto& kp : skeleton(pose)) arr.push_back({kp.x, kp.y, kp.confidence});
    j[std::string(to_string(pose.command))] = std::move(arr);
  }
  return j;
}

}  // namespace posepilot::fixtures
