// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <string>

#include <gtest/gtest.h>

#include "posepilot/fixtures.hpp"
#include "posepilot/pose_ingest.hpp"

namespace posepilot {
namespace {

std::string estimator_doc(int values, double first_conf = 0.9) {
  std::string arr;
  for (int i = 0; i < values; ++i) {
    if (i) arr += ",";
    if (i == 0) arr += "320";
    else if (i == 1) arr += "150";
    else if (i == 2) arr += std::to_string(first_conf);
    else if (i % 3 == 2) arr += "0.95";
    else arr += std::to_string(100 + i);
  }
  return R"({"version":1.3,"people":[{"pose_keypoints_2d":[)" + arr + "]}]}";
}

IngestError::Kind error_kind(auto&& fn) {
  try {
    fn();
  } catch (const IngestError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected IngestError";
  return IngestError::Kind::MalformedInput;
}

TEST(ParseEstimatorJson, MapsFirstTripletToNose) {
  const auto r = parse_estimator_json(estimator_doc(54), 7, 0.5);
  const auto& f = std::get<PoseFrame>(r);
  EXPECT_EQ(f.seq, 7u);
  EXPECT_DOUBLE_EQ(f.timestamp, 0.5);
  EXPECT_EQ(f[Joint::Nose], (Keypoint{320, 150, 0.9}));
  EXPECT_DOUBLE_EQ(f[Joint::Neck].confidence, 0.95);
}

TEST(ParseEstimatorJson, EmptyPeopleIsNoPerson) {
  const auto r = parse_estimator_json(R"({"people":[]})", 3, 1.0);
  ASSERT_TRUE(std::holds_alternative<NoPersonDetected>(r));
  EXPECT_EQ(std::get<NoPersonDetected>(r).seq, 3u);
}

TEST(ParseEstimatorJson, WrongArityIsMalformed) {
  EXPECT_EQ(error_kind([] { parse_estimator_json(estimator_doc(51)); }), IngestError::Kind::MalformedInput);
}

TEST(ParseEstimatorJson, TwentyFivePointLayoutRejectedDistinctly) {
  try {
    parse_estimator_json(estimator_doc(75));
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.kind(), IngestError::Kind::MalformedInput);
    EXPECT_NE(std::string(e.what()).find("25-keypoint"), std::string::npos);
  }
}

TEST(ParseEstimatorJson, RejectsGarbageAndNonNumbers) {
  EXPECT_EQ(error_kind([] { parse_estimator_json("not json"); }), IngestError::Kind::MalformedInput);
  EXPECT_EQ(error_kind([] { parse_estimator_json(R"({"people":[{"pose_keypoints_2d":"x"}]})"); }),
            IngestError::Kind::MalformedInput);
  EXPECT_EQ(error_kind([] { parse_estimator_json("[1,2,3]"); }), IngestError::Kind::MalformedInput);
  auto doc = estimator_doc(54);
  doc.replace(doc.find("320"), 3, "\"a\"");
  EXPECT_EQ(error_kind([&] { parse_estimator_json(doc); }), IngestError::Kind::MalformedInput);
}

TEST(ParseEstimatorJson, ConfidenceOutOfRange) {
  EXPECT_EQ(error_kind([] { parse_estimator_json(estimator_doc(54, 1.5)); }),
            IngestError::Kind::ConfidenceOutOfRange);
  EXPECT_EQ(error_kind([] { parse_estimator_json(estimator_doc(54, -0.1)); }),
            IngestError::Kind::ConfidenceOutOfRange);
}

TEST(ParseEstimatorJson, TakesFirstOfSeveralPeople) {
  const auto one = estimator_doc(54);
  const auto person = one.substr(one.find("{\"pose"), one.rfind(']') - one.find("{\"pose"));
  std::string other = person;
  other.replace(other.find("320"), 3, "999");
  const auto doc = R"({"people":[)" + person + "," + other + "]}";
  EXPECT_DOUBLE_EQ(std::get<PoseFrame>(parse_estimator_json(doc))[Joint::Nose].x, 320.0);
}

TEST(ParseReplayLine, NullKeypointsIsNoPerson) {
  const auto r = parse_replay_line(R"({"seq":1,"t":0.0,"keypoints":null})");
  EXPECT_EQ(std::get<NoPersonDetected>(r), (NoPersonDetected{1, 0.0}));
}

TEST(ParseReplayLine, ValidRecordKeepsSeq) {
  const auto frame = fixtures::make_frame(fixtures::pose_for(Command::Up), 42, 1.25);
  const auto r = parse_replay_line(serialize_replay_line(frame));
  EXPECT_EQ(std::get<PoseFrame>(r).seq, 42u);
  EXPECT_EQ(std::get<PoseFrame>(r), frame);
}

TEST(ParseReplayLine, SeventeenTripletsIsMalformed) {
  auto j = to_json(FrameRecord{fixtures::make_frame(fixtures::pose_for(Command::Up), 1, 0.0)});
  j["keypoints"].erase(17);
  EXPECT_EQ(error_kind([&] { parse_replay_line(j.dump()); }), IngestError::Kind::MalformedInput);
}

TEST(ParseReplayLine, MissingOrBadFields) {
  EXPECT_EQ(error_kind([] { parse_replay_line(R"({"t":0,"keypoints":null})"); }), IngestError::Kind::MalformedInput);
  EXPECT_EQ(error_kind([] { parse_replay_line(R"({"seq":-1,"t":0,"keypoints":null})"); }),
            IngestError::Kind::MalformedInput);
  EXPECT_EQ(error_kind([] { parse_replay_line(R"({"seq":1,"keypoints":null})"); }), IngestError::Kind::MalformedInput);
  EXPECT_EQ(error_kind([] { parse_replay_line(R"({"seq":1,"t":0})"); }), IngestError::Kind::MalformedInput);
  EXPECT_EQ(error_kind([] { parse_replay_line(R"({"seq":1,"t":0,"keypoints":[[1,2]]})"); }),
            IngestError::Kind::MalformedInput);
}

TEST(ReplayFormat, RoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-5000.0, 5000.0);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    PoseFrame f;
    f.seq = rng() >> 12;
    f.timestamp = conf(rng) * 1e4;
    for (auto& kp : f.keypoints) kp = {coord(rng), coord(rng), trial % 7 == 0 ? 0.0 : conf(rng)};
    const FrameRecord rec = f;
    ASSERT_EQ(parse_replay_line(serialize_replay_line(rec)), rec);
  }
  const FrameRecord none = NoPersonDetected{9, 0.3};
  EXPECT_EQ(parse_replay_line(serialize_replay_line(none)), none);
}

// Arbitrary bytes must come back as a value or an IngestError, never anything else.
TEST(ParserFuzz, ArbitraryBytesNeverEscape) {
  std::mt19937 rng(5);
  const std::string seed = serialize_replay_line(fixtures::make_frame(fixtures::pose_for(Command::Wait), 1, 0.0));
  const std::string est = estimator_doc(54);
  for (int trial = 0; trial < 3000; ++trial) {
    std::string input;
    if (trial % 3 == 0) {
      input.resize(rng() % 200);
      for (auto& c : input) c = static_cast<char>(rng() & 0xff);
    } else {
      input = trial % 3 == 1 ? seed : est;
      const int edits = 1 + static_cast<int>(rng() % 4);
      for (int e = 0; e < edits; ++e) {
        const auto pos = rng() % input.size();
        switch (rng() % 3) {
          case 0: input[pos] = static_cast<char>(rng() & 0xff); break;
          case 1: input.erase(pos, 1 + rng() % 8); break;
          default: input.insert(pos, 1, "[]{},:\"0-e9.n"[rng() % 13]); break;
        }
        if (input.empty()) input = "{";
      }
    }
    try {
      (void)parse_replay_line(input);
    } catch (const IngestError&) {
    }
    try {
      (void)parse_estimator_json(input);
    } catch (const IngestError&) {
    }
  }
}

TEST(ValidateForGesture, AllPresentPasses) {
  const auto f = fixtures::make_frame(fixtures::pose_for(Command::Wait));
  EXPECT_TRUE(std::holds_alternative<ValidatedFrame>(validate_for_gesture(f, 0.3)));
}

TEST(ValidateForGesture, LowConfidenceNoseFails) {
  auto f = fixtures::make_frame(fixtures::pose_for(Command::Wait));
  f[Joint::Nose].confidence = 0.1;
  EXPECT_TRUE(std::holds_alternative<InsufficientDetection>(validate_for_gesture(f, 0.3)));
}

TEST(ValidateForGesture, CoincidentShouldersFail) {
  auto f = fixtures::make_frame(fixtures::pose_for(Command::Wait));
  f[Joint::RightShoulder] = {300, 200, 0.9};
  f[Joint::LeftShoulder] = {300, 200, 0.9};
  const auto r = validate_for_gesture(f, 0.3);
  ASSERT_TRUE(std::holds_alternative<InsufficientDetection>(r));
  EXPECT_EQ(std::get<InsufficientDetection>(r).reason, "shoulders coincide");
}

TEST(ValidateForGesture, OnlyGestureJointsMatter) {
  auto f = fixtures::make_frame(fixtures::pose_for(Command::Wait));
  f[Joint::RightAnkle].confidence = 0.0;
  f[Joint::LeftWrist].confidence = 0.0;  // slot 7 is not read by default
  EXPECT_TRUE(std::holds_alternative<ValidatedFrame>(validate_for_gesture(f, 0.3)));
  GestureJoints coco;
  coco.left_wrist = Joint::LeftWrist;
  EXPECT_TRUE(std::holds_alternative<InsufficientDetection>(validate_for_gesture(f, 0.3, coco)));
}

TEST(ValidateForGesture, UndetectedFailsEvenAtZeroThreshold) {
  auto f = fixtures::make_frame(fixtures::pose_for(Command::Wait));
  f[Joint::Neck].confidence = 0.0;
  EXPECT_TRUE(std::holds_alternative<InsufficientDetection>(validate_for_gesture(f, 0.0)));
}

TEST(ValidateForGesture, MonotoneInThreshold) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    auto f = fixtures::make_frame(fixtures::pose_for(Command::Up));
    for (auto& kp : f.keypoints) kp.confidence = u(rng);
    const double hi = u(rng);
    const double lo = hi * u(rng);
    if (std::holds_alternative<ValidatedFrame>(validate_for_gesture(f, hi))) {
      ASSERT_TRUE(std::holds_alternative<ValidatedFrame>(validate_for_gesture(f, lo)));
    }
  }
}

}  // namespace
}  // namespace posepilot
