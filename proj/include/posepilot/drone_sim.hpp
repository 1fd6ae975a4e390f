// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string_view>

#include "posepilot/command.hpp"

namespace posepilot {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double k, Vec3 v) { return {k * v.x, k * v.y, k * v.z}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

// World frame z-up. attitude = (roll phi, pitch theta, yaw psi) in radians;
// angular_rate holds the Euler-angle rates.
struct DroneState {
  Vec3 position;
  Vec3 velocity;
  Vec3 attitude;
  Vec3 angular_rate;

  friend bool operator==(const DroneState&, const DroneState&) = default;
};

struct VehicleParams {
  double mass = 0.5;      // kg
  double gravity = 9.81;  // m/s^2
  double max_thrust_to_weight = 2.0;
};

// Total thrust in newtons and the three attitude torques (rad/s^2).
struct ControlInput {
  double thrust = 0.0;
  Vec3 torque;
};

// Rigid-body translational model: thrust along the body z axis rotated by
// ZYX Euler angles, minus gravity.
inline Vec3 translational_acceleration(const DroneState& s, const VehicleParams& p,
                                       const ControlInput& u) {
  const double sphi = std::sin(s.attitude.x), cphi = std::cos(s.attitude.x);
  const double sth = std::sin(s.attitude.y), cth = std::cos(s.attitude.y);
  const double spsi = std::sin(s.attitude.z), cpsi = std::cos(s.attitude.z);
  const double k = u.thrust / p.mass;
  return {k * (spsi * sphi + cpsi * sth * cphi), k * (-cpsi * sphi + spsi * sth * cphi),
          k * (cth * cphi) - p.gravity};
}

// Simplified attitude model: Euler-angle accelerations equal the torques.
inline Vec3 attitude_acceleration(const ControlInput& u) { return u.torque; }

inline void clamp_to_ground(DroneState& s) {
  if (s.position.z < 0.0) {
    s.position.z = 0.0;
    s.velocity.z = std::max(s.velocity.z, 0.0);
  }
}

// One step with the control input held constant. Translation uses the exact
// update for constant acceleration; attitude is semi-implicit Euler.
inline DroneState integrate_rigid_body(DroneState s, const VehicleParams& p, const ControlInput& u,
                                       double dt) {
  const Vec3 acc = translational_acceleration(s, p, u);
  s.angular_rate = s.angular_rate + dt * attitude_acceleration(u);
  s.attitude = s.attitude + dt * s.angular_rate;
  s.attitude = {wrap_angle(s.attitude.x), wrap_angle(s.attitude.y), wrap_angle(s.attitude.z)};
  s.position = s.position + dt * s.velocity + (0.5 * dt * dt) * acc;
  s.velocity = s.velocity + dt * acc;
  clamp_to_ground(s);
  return s;
}

// Motion request in the body frame: x forward, y left, z up.
struct Setpoint {
  Vec3 linear_velocity;
  double yaw_rate = 0.0;  // rad/s, positive = counter-clockwise seen from above
  bool snapshot = false;

  friend bool operator==(const Setpoint&, const Setpoint&) = default;
};

struct MotionLimits {
  double linear_speed = 0.5;  // m/s per command
  double yaw_speed = 0.5;     // rad/s per command
  double max_linear_speed = 2.0;
  double max_yaw_speed = 2.0;
};

inline Setpoint command_to_setpoint(Command c, const MotionLimits& lim = {}) {
  const double v = std::clamp(lim.linear_speed, 0.0, lim.max_linear_speed);
  const double w = std::clamp(lim.yaw_speed, 0.0, lim.max_yaw_speed);
  Setpoint sp;
  switch (c) {
    case Command::Forward: sp.linear_velocity.x = v; break;
    case Command::Backward: sp.linear_velocity.x = -v; break;
    case Command::Left: sp.linear_velocity.y = v; break;
    case Command::Right: sp.linear_velocity.y = -v; break;
    case Command::Up: sp.linear_velocity.z = v; break;
    case Command::Down: sp.linear_velocity.z = -v; break;
    case Command::TurnCW: sp.yaw_rate = -w; break;
    case Command::TurnCCW: sp.yaw_rate = w; break;
    case Command::Snapshot: sp.snapshot = true; break;
    case Command::Wait:
    case Command::Hover: break;
  }
  return sp;
}

// Inner-loop gains for the dynamic mode (the real vehicle's autopilot).
struct ControlGains {
  double velocity_kp = 1.0;
  double velocity_kd = 0.2;
  double attitude_kp = 8.0;
  double attitude_kd = 2.0;
  double yaw_rate_kp = 4.0;
  double max_tilt = 0.35;  // rad
};

// Controller memory that does not belong in the vehicle state.
struct ControllerMemory {
  Vec3 previous_velocity;
  bool primed = false;
};

inline Vec3 body_to_world(Vec3 body, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * body.x - s * body.y, s * body.x + c * body.y, body.z};
}

// Velocity PD -> desired tilt and thrust, attitude PD -> torques, then the
// rigid-body model. The derivative acts on the measured velocity.
inline ControlInput dynamic_control(const DroneState& s, const Setpoint& sp, const VehicleParams& p,
                                    const ControlGains& g, ControllerMemory& mem, double dt) {
  const Vec3 target = body_to_world(sp.linear_velocity, s.attitude.z);
  const Vec3 error = target - s.velocity;
  const Vec3 measured_rate = mem.primed ? (1.0 / dt) * (s.velocity - mem.previous_velocity) : Vec3{};
  mem.previous_velocity = s.velocity;
  mem.primed = true;
  const Vec3 acc = g.velocity_kp * error - g.velocity_kd * measured_rate;

  const double tilt_cos = std::cos(s.attitude.x) * std::cos(s.attitude.y);
  const double max_thrust = p.max_thrust_to_weight * p.mass * p.gravity;
  ControlInput u;
  u.thrust = std::clamp(p.mass * (p.gravity + acc.z) / tilt_cos, 0.0, max_thrust);

  const double spsi = std::sin(s.attitude.z), cpsi = std::cos(s.attitude.z);
  const double roll_target = std::clamp((spsi * acc.x - cpsi * acc.y) / p.gravity, -g.max_tilt, g.max_tilt);
  const double pitch_target = std::clamp((cpsi * acc.x + spsi * acc.y) / p.gravity, -g.max_tilt, g.max_tilt);
  u.torque = {g.attitude_kp * (roll_target - s.attitude.x) - g.attitude_kd * s.angular_rate.x,
              g.attitude_kp * (pitch_target - s.attitude.y) - g.attitude_kd * s.angular_rate.y,
              g.yaw_rate_kp * (sp.yaw_rate - s.angular_rate.z)};
  return u;
}

inline constexpr double kDynamicDt = 0.01;
inline constexpr double kKinematicDt = 1.0 / 30.0;

inline DroneState step_dynamic(const DroneState& s, const Setpoint& sp, const VehicleParams& p,
                               const ControlGains& g, ControllerMemory& mem, double dt) {
  if (!(dt > 0.0 && dt <= 0.05)) throw std::invalid_argument("dynamic dt must lie in (0, 0.05]");
  return integrate_rigid_body(s, p, dynamic_control(s, sp, p, g, mem, dt), dt);
}

// First-order mode: the vehicle follows the setpoint instantly and stays level.
inline DroneState step_kinematic(DroneState s, const Setpoint& sp, double dt) {
  if (!(dt > 0.0 && dt <= 0.1)) throw std::invalid_argument("kinematic dt must lie in (0, 0.1]");
  s.velocity = body_to_world(sp.linear_velocity, s.attitude.z);
  s.position = s.position + dt * s.velocity;
  s.attitude = {0.0, 0.0, wrap_angle(s.attitude.z + sp.yaw_rate * dt)};
  s.angular_rate = {0.0, 0.0, sp.yaw_rate};
  clamp_to_ground(s);
  return s;
}

enum class SimMode : std::uint8_t { Kinematic, Dynamic };

inline constexpr std::string_view to_string(SimMode m) {
  return m == SimMode::Kinematic ? "kinematic" : "dynamic";
}

inline constexpr double kDefaultStartAltitude = 2.0;

class DroneSimulator {
 public:
  explicit DroneSimulator(SimMode mode = SimMode::Kinematic, VehicleParams params = {},
                          ControlGains gains = {})
      : mode_(mode), params_(params), gains_(gains) {
    if (!(params_.mass > 0.0) || !(params_.gravity > 0.0)) {
      throw std::invalid_argument("vehicle mass and gravity must be positive");
    }
    state_.position.z = kDefaultStartAltitude;
  }

  SimMode mode() const { return mode_; }
  double step_size() const { return mode_ == SimMode::Dynamic ? kDynamicDt : kKinematicDt; }
  double time() const { return time_; }
  const DroneState& state() const { return state_; }
  void set_state(const DroneState& s) { state_ = s; }

  void step(const Setpoint& sp, double dt) {
    state_ = mode_ == SimMode::Dynamic ? step_dynamic(state_, sp, params_, gains_, memory_, dt)
                                       : step_kinematic(state_, sp, dt);
    time_ += dt;
  }

  // Advances by `duration` seconds in fixed steps, finishing with one
  // shorter step if the duration is not a whole number of steps.
  void advance(const Setpoint& sp, double duration) {
    if (duration <= 0.0) return;
    const double h = step_size();
    const auto whole = static_cast<long>(std::floor(duration / h + 1e-9));
    for (long i = 0; i < whole; ++i) step(sp, h);
    const double rest = duration - static_cast<double>(whole) * h;
    if (rest > 1e-12) step(sp, rest);
  }

 private:
  SimMode mode_;
  VehicleParams params_;
  ControlGains gains_;
  DroneState state_;
  ControllerMemory memory_;
  double time_ = 0.0;
};

}  // namespace posepilot
