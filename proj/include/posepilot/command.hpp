// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace posepilot {

// The ten gesture commands, in rule-table order, plus the Hover fallback
// that only the debouncer produces.
enum class Command : std::uint8_t {
  Snapshot,
  Backward,
  Forward,
  Left,
  Right,
  Up,
  Down,
  TurnCW,
  TurnCCW,
  Wait,
  Hover,
};

inline constexpr std::array<Command, 10> kGestureCommands{
    Command::Snapshot, Command::Backward, Command::Forward, Command::Left,   Command::Right,
    Command::Up,       Command::Down,     Command::TurnCW,  Command::TurnCCW, Command::Wait,
};

inline constexpr std::string_view to_string(Command c) {
  switch (c) {
    case Command::Snapshot: return "snapshot";
    case Command::Backward: return "backward";
    case Command::Forward: return "forward";
    case Command::Left: return "left";
    case Command::Right: return "right";
    case Command::Up: return "up";
    case Command::Down: return "down";
    case Command::TurnCW: return "turn_cw";
    case Command::TurnCCW: return "turn_ccw";
    case Command::Wait: return "wait";
    case Command::Hover: return "hover";
  }
  return "?";
}

inline constexpr std::optional<Command> command_from_string(std::string_view s) {
  for (const Command c : kGestureCommands) {
    if (to_string(c) == s) return c;
  }
  if (s == to_string(Command::Hover)) return Command::Hover;
  return std::nullopt;
}

// What the classifier reports for one frame: a gesture, or nullopt when no
// command was detected (no person, low confidence, degenerate pose, no rule).
using Observation = std::optional<Command>;

inline constexpr std::string_view kNoDetection = "no-detection";

inline constexpr std::string_view to_string(const Observation& o) {
  return o ? to_string(*o) : kNoDetection;
}

}  // namespace posepilot
