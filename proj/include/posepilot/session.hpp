// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "posepilot/classifier.hpp"
#include "posepilot/debouncer.hpp"
#include "posepilot/drone_sim.hpp"
#include "posepilot/pose_ingest.hpp"

namespace posepilot {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SessionConfig {
  double min_confidence = kDefaultMinConfidence;
  DebounceConfig debounce;
  SimMode sim_mode = SimMode::Kinematic;
  double tick_rate = 30.0;  // Hz
  std::string rule_table;   // empty: built-in table
  double hold_timeout = 0.25;  // s a command stays active after its last emission
  MotionLimits limits;
  GestureJoints joints;

  void validate() const {
    if (!(tick_rate >= 1.0 && tick_rate <= 120.0)) throw ConfigError("tick_rate must lie in [1, 120] Hz");
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
      throw ConfigError("min_confidence must lie in [0, 1]");
    }
    if (debounce.threshold < 1) throw ConfigError("debounce_threshold must be >= 1");
    if (!(hold_timeout >= 0.0)) throw ConfigError("hold_timeout must be >= 0");
    if (!(limits.linear_speed >= 0.0) || !(limits.yaw_speed >= 0.0)) {
      throw ConfigError("speeds must be non-negative");
    }
  }
};

inline SessionConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("session config must be a JSON object");
  SessionConfig c;
  try {
    c.min_confidence = j.value("min_confidence", c.min_confidence);
    c.debounce.threshold = j.value("debounce_threshold", c.debounce.threshold);
    c.debounce.keepalive_interval = j.value("keepalive_interval", c.debounce.keepalive_interval);
    const auto mode = j.value("sim_mode", std::string(to_string(c.sim_mode)));
    if (mode == "kinematic") {
      c.sim_mode = SimMode::Kinematic;
    } else if (mode == "dynamic") {
      c.sim_mode = SimMode::Dynamic;
    } else {
      throw ConfigError("sim_mode must be \"kinematic\" or \"dynamic\"");
    }
    c.tick_rate = j.value("tick_rate", c.tick_rate);
    c.rule_table = j.value("rule_table", std::string{});
    if (c.rule_table == "builtin") c.rule_table.clear();
    c.hold_timeout = j.value("hold_timeout", c.hold_timeout);
    c.limits.linear_speed = j.value("linear_speed", c.limits.linear_speed);
    c.limits.yaw_speed = j.value("yaw_speed", c.limits.yaw_speed);
    const int left = j.value("left_wrist_index", static_cast<int>(c.joints.left_wrist));
    if (left != 6 && left != 7) throw ConfigError("left_wrist_index must be 6 or 7");
    c.joints.left_wrist = static_cast<Joint>(left);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("session config: ") + e.what());
  }
  c.validate();
  return c;
}

inline SessionConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

inline std::shared_ptr<const RuleTable> resolve_rules(const SessionConfig& c) {
  if (c.rule_table.empty()) return std::make_shared<const RuleTable>(builtin_rule_table());
  try {
    return std::make_shared<const RuleTable>(load_rule_table(c.rule_table));
  } catch (const RuleTableError& e) {
    throw ConfigError(e.what());
  }
}

enum class Emergency : std::uint8_t { Hover, Land, Resume };

inline std::optional<Emergency> emergency_from_string(std::string_view s) {
  if (s == "hover") return Emergency::Hover;
  if (s == "land") return Emergency::Land;
  if (s == "resume") return Emergency::Resume;
  return std::nullopt;
}

inline constexpr std::string_view to_string(Emergency e) {
  switch (e) {
    case Emergency::Hover: return "hover";
    case Emergency::Land: return "land";
    case Emergency::Resume: return "resume";
  }
  return "?";
}

// What happened to one frame on its way through the session.
struct StepRecord {
  std::uint64_t seq = 0;
  double t = 0.0;
  std::optional<GestureFeatures> features;
  Observation observation;
  EmittedAction action;
};

inline nlohmann::json to_json(const StepRecord& r) {
  nlohmann::json j;
  j["seq"] = r.seq;
  j["t"] = r.t;
  j["observation"] = std::string(to_string(r.observation));
  j["action"] = std::string(to_string(r.action.kind));
  if (r.action.is_silent()) {
    j["command"] = nullptr;
  } else {
    j["command"] = std::string(to_string(r.action.command));
  }
  j["fresh"] = r.action.fresh;
  return j;
}

struct Telemetry {
  double t = 0.0;
  DroneState state;
  Setpoint setpoint;
  std::optional<Command> last_command;
  std::uint64_t snapshot_count = 0;
  std::uint64_t dropped_frames = 0;
  std::optional<std::uint64_t> frame_seq;
  std::optional<Emergency> override_action;
};

inline nlohmann::json to_json(const Telemetry& tm) {
  auto v3 = [](Vec3 v) { return nlohmann::json::array({v.x, v.y, v.z}); };
  nlohmann::json j;
  j["t"] = tm.t;
  j["position"] = v3(tm.state.position);
  j["attitude"] = v3(tm.state.attitude);
  j["velocity"] = v3(tm.state.velocity);
  j["last_command"] = tm.last_command ? nlohmann::json(std::string(to_string(*tm.last_command)))
                                      : nlohmann::json(nullptr);
  j["snapshot_count"] = tm.snapshot_count;
  j["dropped_frames"] = tm.dropped_frames;
  j["setpoint"] = {{"velocity", v3(tm.setpoint.linear_velocity)}, {"yaw_rate", tm.setpoint.yaw_rate}};
  j["frame_seq"] = tm.frame_seq ? nlohmann::json(*tm.frame_seq) : nlohmann::json(nullptr);
  j["override"] = tm.override_action ? nlohmann::json(std::string(to_string(*tm.override_action)))
                                     : nlohmann::json(nullptr);
  return j;
}

// One user's pipeline: validation, classification, debouncing and the
// simulated vehicle. Not thread-safe; drive it from one thread or strand.
class Session {
 public:
  explicit Session(SessionConfig config, std::shared_ptr<const RuleTable> rules = nullptr)
      : config_(std::move(config)),
        rules_(rules ? std::move(rules) : resolve_rules(config_)),
        debouncer_(config_.debounce),
        sim_(config_.sim_mode) {
    config_.validate();
  }

  const SessionConfig& config() const { return config_; }
  const DroneSimulator& simulator() const { return sim_; }
  const Debouncer& debouncer() const { return debouncer_; }
  std::uint64_t snapshot_count() const { return snapshot_count_; }
  std::uint64_t dropped_frames() const { return dropped_; }
  void count_dropped(std::uint64_t n = 1) { dropped_ += n; }

  Classification observe(const FrameRecord& record) const {
    const auto* frame = std::get_if<PoseFrame>(&record);
    if (!frame) return {};
    auto validated = validate_for_gesture(*frame, config_.min_confidence, config_.joints);
    if (const auto* vf = std::get_if<ValidatedFrame>(&validated)) return classify_frame_detailed(*vf, *rules_);
    return {};
  }

  StepRecord process(const FrameRecord& record) {
    auto c = observe(record);
    StepRecord r{seq_of(record), time_of(record), c.features, c.observation, debouncer_.step(c.observation)};
    apply(r.action);
    last_frame_seq_ = r.seq;
    return r;
  }

  void emergency(Emergency e) {
    if (e == Emergency::Resume) {
      override_.reset();
      active_.reset();
    } else {
      override_ = e;
    }
  }
  std::optional<Emergency> override_action() const { return override_; }

  // The setpoint the vehicle is flying right now.
  Setpoint current_setpoint() const {
    if (override_ == Emergency::Hover) return {};
    if (override_ == Emergency::Land) return {{0.0, 0.0, -config_.limits.linear_speed}, 0.0, false};
    if (!active_ || sim_.time() - active_since_ > config_.hold_timeout + 1e-9) return {};
    return *active_;
  }

  void advance(double duration) {
    const double h = sim_.step_size();
    while (duration > 1e-12) {
      const double dt = std::min(h, duration);
      sim_.step(current_setpoint(), dt);
      duration -= dt;
    }
  }

  Telemetry telemetry() const {
    return {sim_.time(),       sim_.state(), current_setpoint(), debouncer_.state().last_emitted,
            snapshot_count_, dropped_,     last_frame_seq_,    override_};
  }

 private:
  void apply(const EmittedAction& a) {
    if (a.is_silent()) return;
    if (a.kind == EmittedAction::Kind::Emit && a.command == Command::Snapshot && a.fresh) ++snapshot_count_;
    active_ = command_to_setpoint(a.command, config_.limits);
    active_since_ = sim_.time();
  }

  SessionConfig config_;
  std::shared_ptr<const RuleTable> rules_;
  Debouncer debouncer_;
  DroneSimulator sim_;
  std::optional<Setpoint> active_;
  double active_since_ = 0.0;
  std::optional<Emergency> override_;
  std::optional<std::uint64_t> last_frame_seq_;
  std::uint64_t snapshot_count_ = 0;
  std::uint64_t dropped_ = 0;
};

}  // namespace posepilot
