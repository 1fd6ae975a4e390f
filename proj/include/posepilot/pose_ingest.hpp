// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "posepilot/pose_frame.hpp"

namespace posepilot {

class IngestError : public std::runtime_error {
 public:
  enum class Kind { MalformedInput, ConfidenceOutOfRange };

  IngestError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

namespace detail {

[[noreturn]] inline void malformed(const std::string& msg) {
  throw IngestError(IngestError::Kind::MalformedInput, msg);
}

inline nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
}

inline double finite_number(const nlohmann::json& v, const char* what) {
  if (!v.is_number()) malformed(std::string(what) + " is not a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) malformed(std::string(what) + " is not finite");
  return d;
}

inline Keypoint make_keypoint(double x, double y, double c, std::size_t index) {
  if (c < 0.0 || c > 1.0) {
    throw IngestError(IngestError::Kind::ConfidenceOutOfRange,
                      "keypoint " + std::to_string(index) + " confidence " + std::to_string(c) +
                          " outside [0,1]");
  }
  return {x, y, c};
}

inline void check_flat_arity(std::size_t n) {
  if (n == 75) malformed("25-keypoint body layout is not supported; expected the 18-keypoint layout");
  if (n != 3 * kNumKeypoints) {
    malformed("pose_keypoints_2d has " + std::to_string(n) + " values, expected 54");
  }
}

inline KeypointArray keypoints_from_flat(const nlohmann::json& arr) {
  if (!arr.is_array()) malformed("pose_keypoints_2d is not an array");
  check_flat_arity(arr.size());
  KeypointArray kps;
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    kps[i] = make_keypoint(finite_number(arr[3 * i], "x"), finite_number(arr[3 * i + 1], "y"),
                           finite_number(arr[3 * i + 2], "confidence"), i);
  }
  return kps;
}

inline KeypointArray keypoints_from_triplets(const nlohmann::json& arr) {
  if (!arr.is_array()) malformed("keypoints is neither an array nor null");
  if (arr.size() == 25) malformed("25-keypoint body layout is not supported; expected 18 triplets");
  if (arr.size() != kNumKeypoints) {
    malformed("keypoints has " + std::to_string(arr.size()) + " triplets, expected 18");
  }
  KeypointArray kps;
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    const auto& t = arr[i];
    if (!t.is_array() || t.size() != 3) {
      malformed("keypoint " + std::to_string(i) + " is not an [x,y,c] triplet");
    }
    kps[i] = make_keypoint(finite_number(t[0], "x"), finite_number(t[1], "y"),
                           finite_number(t[2], "confidence"), i);
  }
  return kps;
}

}  // namespace detail

// Parses one frame of the pose estimator's JSON export. Only the first
// person is used; the export carries no timing, so seq/timestamp are supplied.
inline FrameRecord parse_estimator_json(std::string_view bytes, std::uint64_t seq = 0,
                                        double timestamp = 0.0) {
  const auto doc = detail::parse_json(bytes);
  if (!doc.is_object()) detail::malformed("top-level value is not an object");
  const auto people = doc.find("people");
  if (people == doc.end() || !people->is_array()) detail::malformed("missing \"people\" array");
  if (people->empty()) return NoPersonDetected{seq, timestamp};

  const auto& person = (*people)[0];
  if (!person.is_object()) detail::malformed("people[0] is not an object");
  const auto kps = person.find("pose_keypoints_2d");
  if (kps == person.end()) detail::malformed("people[0] has no pose_keypoints_2d");
  return PoseFrame{seq, timestamp, detail::keypoints_from_flat(*kps)};
}

// Parses one replay record: {"seq":N,"t":secs,"keypoints":[[x,y,c]x18] | null}.
inline FrameRecord parse_replay_line(std::string_view line) {
  const auto doc = detail::parse_json(line);
  if (!doc.is_object()) detail::malformed("record is not an object");

  const auto seq = doc.find("seq");
  if (seq == doc.end() || !seq->is_number_unsigned()) {
    detail::malformed("\"seq\" must be a non-negative integer");
  }
  const auto t = doc.find("t");
  if (t == doc.end()) detail::malformed("missing \"t\"");
  const double timestamp = detail::finite_number(*t, "t");

  const auto kps = doc.find("keypoints");
  if (kps == doc.end()) detail::malformed("missing \"keypoints\"");
  const auto n = seq->get<std::uint64_t>();
  if (kps->is_null()) return NoPersonDetected{n, timestamp};
  return PoseFrame{n, timestamp, detail::keypoints_from_triplets(*kps)};
}

inline nlohmann::json to_json(const FrameRecord& record) {
  nlohmann::json j;
  j["seq"] = seq_of(record);
  j["t"] = time_of(record);
  if (const auto* f = std::get_if<PoseFrame>(&record)) {
    auto arr = nlohmann::json::array();
    for (const auto& k : f->keypoints) arr.push_back({k.x, k.y, k.confidence});
    j["keypoints"] = std::move(arr);
  } else {
    j["keypoints"] = nullptr;
  }
  return j;
}

// Inverse of parse_replay_line; no trailing newline.
inline std::string serialize_replay_line(const FrameRecord& record) { return to_json(record).dump(); }

struct InsufficientDetection {
  std::string reason;
};

class ValidatedFrame;
using ValidationResult = std::variant<ValidatedFrame, InsufficientDetection>;

// A frame whose six gesture keypoints are present and whose shoulders are
// distinct, so every downstream division by the shoulder width is defined.
class ValidatedFrame {
 public:
  const PoseFrame& frame() const { return frame_; }
  const GestureJoints& joints() const { return joints_; }
  Vec2 at(Joint j) const { return frame_[j].position(); }

 private:
  ValidatedFrame(PoseFrame frame, GestureJoints joints) : frame_(std::move(frame)), joints_(joints) {}

  PoseFrame frame_;
  GestureJoints joints_;

  friend ValidationResult validate_for_gesture(const PoseFrame&, double, const GestureJoints&);
};

inline constexpr double kDefaultMinConfidence = 0.3;

inline ValidationResult validate_for_gesture(const PoseFrame& frame,
                                             double min_confidence = kDefaultMinConfidence,
                                             const GestureJoints& joints = {}) {
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw std::invalid_argument("min_confidence must lie in [0,1]");
  }
  for (const Joint j : joints.all()) {
    const auto& kp = frame[j];
    // A confidence-0 slot is undetected even with a zero threshold.
    if (kp.confidence < min_confidence || !kp.detected()) {
      return InsufficientDetection{"keypoint " + std::to_string(static_cast<int>(j)) +
                                   " below confidence threshold"};
    }
  }
  if (frame[joints.right_shoulder].position() == frame[joints.left_shoulder].position()) {
    return InsufficientDetection{"shoulders coincide"};
  }
  return ValidatedFrame{frame, joints};
}

}  // namespace posepilot
